"""Mechanical Lagrangians L(x,v) = |v|^2/2 + eta(x).v - U(x) on the torus.

The fiber Hessian is the identity (convexity constant 1), the energy
E = |v|^2/2 + U(x) is conserved by the Euler-Lagrange flow, and the
magnetic one-form eta only bends trajectories through its exterior
derivative.  Integrators: Stormer-Verlet and its 4th-order composition
for the purely mechanical case, a classical one-step RK4 otherwise.
"""

from dataclasses import dataclass, field

import numpy as np

from .fields import FourierSeries, OneForm

# 4th-order triple-jump composition coefficients for Verlet substeps
_YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA = (_YOSHIDA_W1, 1.0 - 2.0 * _YOSHIDA_W1, _YOSHIDA_W1)


class NonFiniteState(FloatingPointError):
    """The integrated state left the finite floats."""


class InvalidBound(ValueError):
    """Speed-bound hypothesis class is empty for the given action level."""


@dataclass(frozen=True)
class PhaseState:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float) % 1.0)
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.x.shape != self.v.shape:
            raise ValueError("position/velocity shape mismatch")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled flow segment; positions stored mod 1."""

    dt: float
    xs: np.ndarray          # (n, d)
    vs: np.ndarray          # (n, d)
    t0: float = 0.0

    def __post_init__(self):
        if len(self.xs) < 2:
            raise ValueError("a trajectory needs at least two samples")

    def __len__(self):
        return len(self.xs)

    def state(self, i):
        return PhaseState(self.xs[i], self.vs[i])

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(len(self))


@dataclass(frozen=True)
class MechanicalLagrangian:
    """L(x, v) = |v|^2/2 + eta(x).v - U(x) on T^dim, dim in {1, 2}."""

    dim: int
    potential: object = None          # scalar field U
    oneform: OneForm = None           # covector field eta

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.potential is None:
            object.__setattr__(self, "potential", FourierSeries.zero(self.dim))
        if self.oneform is None:
            object.__setattr__(self, "oneform", OneForm.zero(self.dim))
        if getattr(self.potential, "dim", self.dim) != self.dim or self.oneform.dim != self.dim:
            raise ValueError("field dimension mismatch")

    def lagrangian(self, x, v):
        x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
        kin = 0.5 * (v * v).sum(axis=-1)
        mag = 0.0 if self.oneform.is_zero() else (self.oneform(x) * v).sum(axis=-1)
        return kin + mag - self.potential(x)

    def force(self, x):
        return -self.potential.grad(x)

    def magnetic_field(self, x):
        """Scalar b with dv/dt += b * J v on T^2; identically zero on T^1."""
        if self.dim == 1 or self.oneform.is_zero():
            return np.zeros(np.asarray(x, dtype=float).shape[:-1])
        return self.oneform.curl2(x)

    def acceleration(self, x, v):
        acc = self.force(x)
        if self.dim == 2 and not self.oneform.is_zero():
            b = self.magnetic_field(x)[..., None]
            acc = acc + b * np.stack([v[..., 1], -v[..., 0]], axis=-1)
        return acc

    def is_mechanical(self):
        """True when the magnetic term cannot bend trajectories."""
        return self.dim == 1 or self.oneform.is_zero()


def energy(L: MechanicalLagrangian, s: PhaseState):
    """E = dL/dv . v - L = |v|^2/2 + U(x); the magnetic term cancels."""
    return float(0.5 * (s.v * s.v).sum() + L.potential(s.x))


def _verlet_steps(L, x, v, dt, n):
    xs = np.empty((n + 1,) + x.shape)
    vs = np.empty_like(xs)
    xs[0], vs[0] = x % 1.0, v
    acc = L.force(x)
    for i in range(n):
        vh = v + 0.5 * dt * acc
        x = x + dt * vh
        acc = L.force(x)
        v = vh + 0.5 * dt * acc
        xs[i + 1], vs[i + 1] = x % 1.0, v
    return xs, vs


def _yoshida4_steps(L, x, v, dt, n):
    xs = np.empty((n + 1,) + x.shape)
    vs = np.empty_like(xs)
    xs[0], vs[0] = x % 1.0, v
    for i in range(n):
        for w in _YOSHIDA:
            h = w * dt
            vh = v + 0.5 * h * L.force(x)
            x = x + h * vh
            v = vh + 0.5 * h * L.force(x)
        xs[i + 1], vs[i + 1] = x % 1.0, v
    return xs, vs


def _rk4_steps(L, x, v, dt, n):
    xs = np.empty((n + 1,) + x.shape)
    vs = np.empty_like(xs)
    xs[0], vs[0] = x % 1.0, v
    for i in range(n):
        k1x, k1v = v, L.acceleration(x, v)
        k2x, k2v = v + 0.5 * dt * k1v, L.acceleration(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = v + 0.5 * dt * k2v, L.acceleration(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = v + dt * k3v, L.acceleration(x + dt * k3x, v + dt * k3v)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        xs[i + 1], vs[i + 1] = x % 1.0, v
    return xs, vs


_INTEGRATORS = {"verlet": _verlet_steps, "yoshida4": _yoshida4_steps, "rk4": _rk4_steps}


def el_flow(L: MechanicalLagrangian, s0: PhaseState, T, dt, integrator=None):
    """Integrate the Euler-Lagrange flow for time T with step dt.

    Defaults to the symplectic 4th-order Verlet composition when the
    magnetic term is inert, otherwise RK4 (the velocity-dependent force
    breaks the kick-drift splitting).
    """
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    if integrator is None:
        integrator = "yoshida4" if L.is_mechanical() else "rk4"
    if integrator in ("verlet", "yoshida4") and not L.is_mechanical():
        raise ValueError("Verlet splitting needs an inert magnetic term")
    n = int(round(T / dt))
    xs, vs = _INTEGRATORS[integrator](L, s0.x.copy(), s0.v.copy(), dt, n)
    if not (np.isfinite(xs).all() and np.isfinite(vs).all()):
        raise NonFiniteState("integration produced non-finite coordinates")
    return Trajectory(dt=dt, xs=xs, vs=vs)


def apriori_speed_bound(L: MechanicalLagrangian, C):
    """Speed bound A0 for EL solutions with mean action below C.

    Chain: superlinearity constant B with L > |v| - B gives a time with
    |v| <= B + C; the energy is then at most max U + (B+C)^2/2, and the
    conserved-energy lower bound E >= min U + |v|^2/2 caps the speed.
    All potential bounds are rigorous coefficient-sum bounds.
    """
    u_lo, u_hi = L.potential.value_bounds()
    eta_sup = L.oneform.sup_norm_bound()
    inf_l = -(u_hi + 0.5 * eta_sup**2)   # fiberwise minimum of L, minimized over x
    if C <= inf_l:
        raise InvalidBound(f"mean action below inf L = {inf_l:.6g}: no such orbits")
    b = 0.5 * (1.0 + eta_sup) ** 2 + u_hi
    speed_at_mean = b + C
    energy_cap = u_hi + 0.5 * speed_at_mean**2
    return float(np.sqrt(2.0 * (energy_cap - u_lo)))
