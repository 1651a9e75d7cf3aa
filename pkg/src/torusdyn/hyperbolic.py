"""Linear hyperbolic toral automorphisms and shadowing with explicit constants.

A 2x2 integer matrix with determinant +-1 and spectral radius above 1 acts
on the 2-torus with exact stable/unstable eigen-splittings.  Pseudo-orbits
are corrected into true orbits by pushing stable error components forward
and pulling unstable ones backward through geometric series, which makes
the shadowing constant Q computable from the eigenvalues alone.  Periodic
pseudo-orbits are closed up exactly by solving the cyclic correction
equations in high precision.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.signal import lfilter


class OutOfLocalChart(ValueError):
    """Bracket requested outside the local product chart."""


class ThresholdExceeded(ValueError):
    """Pseudo-orbit jumps too large for unambiguous lifting."""


class HypothesisViolated(ValueError):
    """Orbits leave the closeness tube assumed by the estimate."""

    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


def wrap(x):
    """Reduce torus coordinates to [0, 1) (x % 1.0 alone can return 1.0)."""
    y = np.asarray(x, dtype=float) % 1.0
    return np.where(y >= 1.0, 0.0, y)


def minimal_lift(x):
    """Representative of a torus displacement with entries in [-1/2, 1/2)."""
    return (np.asarray(x, dtype=float) + 0.5) % 1.0 - 0.5


def torus_distance(a, b):
    """Euclidean distance on the torus (flat metric, minimal lifts)."""
    return np.linalg.norm(minimal_lift(np.asarray(a) - np.asarray(b)), axis=-1)


def _int_matmul(a, b):
    return [[a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]]]


def _int_matpow(m, n):
    """Exact integer power of a 2x2 unimodular matrix, n of any sign."""
    if n < 0:
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        inv = [[m[1][1] * det, -m[0][1] * det], [-m[1][0] * det, m[0][0] * det]]
        return _int_matpow(inv, -n)
    out = [[1, 0], [0, 1]]
    base = [list(map(int, row)) for row in m]
    while n:
        if n & 1:
            out = _int_matmul(out, base)
        base = _int_matmul(base, base)
        n >>= 1
    return out


class ToralAutomorphism:
    """Hyperbolic automorphism of T^2 with exact eigen-splitting."""

    def __init__(self, matrix=((2, 1), (1, 1))):
        m = np.asarray(matrix, dtype=np.int64)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 integer matrix")
        det = int(round(np.linalg.det(m)))
        if det not in (-1, 1):
            raise ValueError(f"determinant must be +-1, got {det}")
        tr = int(m[0, 0] + m[1, 1])
        disc = tr * tr - 4 * det
        if disc <= 0:
            raise ValueError("eigenvalues are not real")
        lam1 = (tr + np.sqrt(disc)) / 2.0
        lam2 = (tr - np.sqrt(disc)) / 2.0
        lam_u, lam_s = (lam1, lam2) if abs(lam1) > abs(lam2) else (lam2, lam1)
        if abs(lam_u) <= 1.0 + 1e-9:
            raise ValueError("spectral radius must exceed 1")
        self.matrix = m
        self.det = det
        self.lam_u = float(lam_u)
        self.lam_s = float(lam_s)
        self.e_u = self._eigenvector(lam_u)
        self.e_s = self._eigenvector(lam_s)
        # basis data for the bracket and for norm conversion
        self._basis = np.column_stack([self.e_s, self.e_u])
        self._basis_inv = np.linalg.inv(self._basis)
        self.basis_condition = float(np.linalg.cond(self._basis))
        self.delta0 = 0.1    # local product chart radius
        self.expansivity_D = float(np.sqrt(2.0) * self.basis_condition**2)

    def _eigenvector(self, lam):
        a, b = float(self.matrix[0, 0]), float(self.matrix[0, 1])
        if abs(b) > 1e-14:
            v = np.array([b, lam - a])
        else:
            v = np.array([lam - float(self.matrix[1, 1]), float(self.matrix[1, 0])])
        return v / np.linalg.norm(v)

    @property
    def shadowing_q(self):
        """Q = 1/(1 - 1/lam_u) + 1/(1 - |lam_s|)."""
        return 1.0 / (1.0 - 1.0 / abs(self.lam_u)) + 1.0 / (1.0 - abs(self.lam_s))

    def components(self, vec):
        """Coordinates (stable, unstable) of displacement vectors."""
        out = np.asarray(vec, dtype=float) @ self._basis_inv.T
        return out[..., 0], out[..., 1]

    def recompose(self, s, u):
        return np.outer(np.asarray(s).ravel(), self.e_s).reshape(np.shape(s) + (2,)) \
            + np.outer(np.asarray(u).ravel(), self.e_u).reshape(np.shape(u) + (2,))

    def __repr__(self):
        return f"ToralAutomorphism({self.matrix.tolist()})"


def cat_map():
    """The default automorphism [[2, 1], [1, 1]]."""
    return ToralAutomorphism()


def apply(tm: ToralAutomorphism, x, n=1):
    """T^n x mod 1, via the exact integer power of the matrix."""
    power = np.array(_int_matpow(tm.matrix.tolist(), n), dtype=float)
    return wrap(np.asarray(x, dtype=float) @ power.T)


def orbit(tm: ToralAutomorphism, x0, n_steps, modulus=None):
    """Forward orbit x, Tx, ..., T^(n_steps) x as an (n_steps+1, 2) array.

    With `modulus` q the orbit is computed exactly on the rational lattice
    (k/q) in int64 arithmetic, so long orbits carry no rounding error.
    """
    m = tm.matrix
    if modulus is not None:
        q = int(modulus)
        k = np.asarray(np.round(np.asarray(x0, dtype=float) * q), dtype=np.int64) % q
        pts = np.empty((n_steps + 1, 2))
        for i in range(n_steps + 1):
            pts[i] = k / q
            k = (m @ k) % q
        return pts
    pts = np.empty((n_steps + 1, 2))
    x = wrap(x0)
    for i in range(n_steps + 1):
        pts[i] = x
        x = wrap(m.astype(float) @ x)
    return pts


def orbit_ensemble(tm: ToralAutomorphism, n_orbits, n_steps, *, backward=0,
                   grid=False, rng=None, modulus=2**31):
    """Ensemble of exact orbits on the rational lattice (k/modulus).

    Returns a LabeledOrbitEnsemble whose origin column holds the initial
    points; `backward` extra columns of inverse iterates precede it.  The
    modular integer arithmetic keeps long and backward orbits exact.
    """
    from .entropy import LabeledOrbitEnsemble

    q = int(modulus)
    if grid:
        side = int(round(np.sqrt(n_orbits)))
        if side * side != n_orbits:
            raise ValueError("grid ensembles need a square orbit count")
        ticks = (np.arange(side) * (q // side)) % q
        k0 = np.stack(np.meshgrid(ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 2)
    else:
        if rng is None:
            raise ValueError("random ensembles need an rng")
        k0 = rng.integers(0, q, size=(n_orbits, 2))
    k0 = k0.astype(np.int64)
    m = tm.matrix
    det = tm.det
    adj = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=np.int64)
    minv = (det * adj) % q

    cols = [k0]
    k = k0
    for _ in range(n_steps):
        k = (k @ m.T) % q
        cols.append(k)
    k = k0
    back = []
    for _ in range(backward):
        k = (k @ minv.T) % q
        back.append(k)
    back.reverse()
    stack = np.stack(back + cols, axis=1).astype(float) / q
    return LabeledOrbitEnsemble(stack, dt=1.0, origin=backward)


def perturbed_orbit_ensemble(tm: ToralAutomorphism, eps, n_orbits, n_steps, *,
                             grid=False, rng=None):
    """Forward float orbits of x -> T x + eps*g(x) mod 1 for a fixed smooth g."""
    from .entropy import LabeledOrbitEnsemble

    if grid:
        side = int(round(np.sqrt(n_orbits)))
        if side * side != n_orbits:
            raise ValueError("grid ensembles need a square orbit count")
        ticks = np.arange(side) / side
        x = np.stack(np.meshgrid(ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 2)
    else:
        x = rng.random((n_orbits, 2))
    mf = tm.matrix.astype(float)

    def g(pts):
        return np.stack([np.sin(2 * np.pi * pts[:, 1]),
                         np.cos(2 * np.pi * (pts[:, 0] + pts[:, 1]))], axis=1)

    cols = [x]
    for _ in range(n_steps):
        x = wrap(x @ mf.T + eps * g(x))
        cols.append(x)
    return LabeledOrbitEnsemble(np.stack(cols, axis=1), dt=1.0)


class PseudoOrbit:
    """Finite sequence on T^2 with jump errors d(T x_i, x_{i+1}) <= delta."""

    def __init__(self, tm: ToralAutomorphism, points, delta=None):
        points = wrap(points)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 2:
            raise ValueError("expected an (n, 2) array with n >= 2")
        self.tm = tm
        self.points = points
        mapped = wrap(points[:-1] @ tm.matrix.T.astype(float))
        self.jumps = minimal_lift(points[1:] - mapped)
        actual = float(np.max(np.linalg.norm(self.jumps, axis=1))) if len(self.jumps) else 0.0
        if delta is None:
            delta = actual
        elif actual > delta + 1e-12:
            raise ValueError(f"claimed jump bound {delta} but observed {actual}")
        self.delta = float(delta)

    def __len__(self):
        return len(self.points)


def random_pseudo_orbit(tm, n, delta, rng, x0=None):
    """Pseudo-orbit with i.i.d. jumps of norm <= delta."""
    pts = np.empty((n, 2))
    pts[0] = rng.random(2) if x0 is None else wrap(x0)
    mf = tm.matrix.astype(float)
    angles = rng.uniform(0, 2 * np.pi, n - 1)
    radii = delta * np.sqrt(rng.random(n - 1))
    jumps = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    for i in range(n - 1):
        pts[i + 1] = wrap(mf @ pts[i] + jumps[i])
    return PseudoOrbit(tm, pts, delta)


def random_pseudo_orbit_batch(tm, count, n, delta, rng):
    """`count` independent pseudo-orbits generated in lockstep (vectorized)."""
    mf = tm.matrix.astype(float)
    pts = np.empty((count, n, 2))
    pts[:, 0] = rng.random((count, 2))
    angles = rng.uniform(0, 2 * np.pi, (count, n - 1))
    radii = delta * np.sqrt(rng.random((count, n - 1)))
    jumps = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    cur = pts[:, 0]
    for i in range(n - 1):
        cur = wrap(cur @ mf.T + jumps[:, i])
        pts[:, i + 1] = cur
    return [PseudoOrbit(tm, pts[j], delta) for j in range(count)]


def _stable_corrections(lam_s, es):
    """Solve a_{i+1} = lam_s a_i - es_i with a_0 = 0 (row-wise over batches)."""
    es = np.atleast_2d(es)
    tail = lfilter([1.0], [1.0, -lam_s], -es, axis=1)
    return np.concatenate([np.zeros((es.shape[0], 1)), tail], axis=1)


def _unstable_corrections(lam_u, eu):
    """Bounded solution of b_{i+1} = lam_u b_i - eu_i, i.e. b_i = (b_{i+1}+eu_i)/lam_u."""
    eu = np.atleast_2d(eu)
    rev = eu[:, ::-1] / lam_u
    tail = lfilter([1.0], [1.0, -1.0 / lam_u], rev, axis=1)[:, ::-1]
    return np.concatenate([tail, np.zeros((eu.shape[0], 1))], axis=1)


def shadow(tm: ToralAutomorphism, p: PseudoOrbit):
    """True orbit start x0 with d(T^i x0, p_i) <= Q delta, and the achieved sup.

    The jump errors are decomposed in the eigenbasis; stable components are
    summed forward, unstable ones backward, each a geometric series, which
    is exact for the linear model.  Distances to the pseudo-orbit are the
    correction norms themselves, so no unstable float iteration is needed.
    """
    if p.delta >= 0.25:
        raise ThresholdExceeded(f"delta={p.delta} >= 0.25 risks ambiguous lifts")
    es, eu = tm.components(p.jumps)
    a = _stable_corrections(tm.lam_s, es[None, :])[0]
    b = _unstable_corrections(tm.lam_u, eu[None, :])[0]
    corrections = tm.recompose(a, b)
    x0 = wrap(p.points[0] + corrections[0])
    eps = float(np.max(np.linalg.norm(corrections, axis=1)))
    return x0, eps


def shadow_batch(tm: ToralAutomorphism, orbits):
    """Shadow many equal-length pseudo-orbits at once; returns (starts, eps array)."""
    deltas = np.array([p.delta for p in orbits])
    if np.any(deltas >= 0.25):
        raise ThresholdExceeded("delta >= 0.25 in batch")
    jumps = np.stack([p.jumps for p in orbits])
    es, eu = tm.components(jumps)
    a = _stable_corrections(tm.lam_s, es)
    b = _unstable_corrections(tm.lam_u, eu)
    corr = a[..., None] * tm.e_s + b[..., None] * tm.e_u
    starts = wrap(np.stack([p.points[0] for p in orbits]) + corr[:, 0])
    eps = np.max(np.linalg.norm(corr, axis=2), axis=1)
    return starts, eps


@dataclass
class PeriodicShadowResult:
    point: np.ndarray
    eps_achieved: float
    cover_residual: float


def periodic_shadow(tm: ToralAutomorphism, p: PseudoOrbit, dps=None):
    """Exact periodic point shadowing a periodic pseudo-orbit.

    The pseudo-orbit is read cyclically (the closing jump from T p_{N-1}
    back to p_0 included).  The cyclic correction equations are solved per
    eigencomponent in mpmath, and T^N x - x is re-verified independently
    against the exact integer matrix power; its distance to the nearest
    lattice vector is returned as cover_residual.
    """
    pts = p.points
    n = len(pts)
    closing = minimal_lift(pts[0] - wrap(pts[-1] @ tm.matrix.T.astype(float)))
    delta = max(p.delta, float(np.linalg.norm(closing)))
    if delta >= 0.25:
        raise ThresholdExceeded(f"delta={delta} >= 0.25 risks ambiguous lifts")
    jumps = np.vstack([p.jumps, closing])

    if dps is None:
        dps = max(40, int(n * np.log10(abs(tm.lam_u))) + 30)
    with mp.workdps(dps):
        a_, b_, c_, d_ = (int(v) for v in tm.matrix.ravel())
        tr, det = a_ + d_, a_ * d_ - b_ * c_
        disc = mp.sqrt(tr * tr - 4 * det)
        l1, l2 = (tr + disc) / 2, (tr - disc) / 2
        lam_u, lam_s = (l1, l2) if abs(l1) > abs(l2) else (l2, l1)

        def eigvec(lam):
            v = (mp.mpf(b_), lam - a_) if b_ != 0 else (lam - d_, mp.mpf(c_))
            norm = mp.sqrt(v[0] ** 2 + v[1] ** 2)
            return (v[0] / norm, v[1] / norm)

        es_v, eu_v = eigvec(lam_s), eigvec(lam_u)
        det_b = es_v[0] * eu_v[1] - es_v[1] * eu_v[0]
        es = [(mp.mpf(e[0]) * eu_v[1] - mp.mpf(e[1]) * eu_v[0]) / det_b for e in jumps]
        eu = [(es_v[0] * mp.mpf(e[1]) - es_v[1] * mp.mpf(e[0])) / det_b for e in jumps]

        # periodic solutions of c_{i+1} = lam c_i - e_i for both components
        a0 = -sum(lam_s ** k * es[(-1 - k) % n] for k in range(n)) / (1 - lam_s ** n)
        b0 = sum(lam_u ** (-k) * eu[(k - 1) % n] for k in range(1, n + 1)) / (1 - lam_u ** (-n))
        a_seq = [a0]
        for i in range(n - 1):
            a_seq.append(lam_s * a_seq[-1] - es[i])  # forward: contracts
        b_seq = [mp.mpf(0)] * n
        b_seq[0] = b0
        nxt = b0  # backward recursion b_i = (b_{i+1} + eu_i)/lam_u: contracts
        for i in range(n - 1, 0, -1):
            nxt = (nxt + eu[i]) / lam_u
            b_seq[i] = nxt

        x0 = (mp.mpf(pts[0][0]) + a0 * es_v[0] + b0 * eu_v[0],
              mp.mpf(pts[0][1]) + a0 * es_v[1] + b0 * eu_v[1])
        power = _int_matpow(tm.matrix.tolist(), n)
        y = (power[0][0] * x0[0] + power[0][1] * x0[1],
             power[1][0] * x0[0] + power[1][1] * x0[1])
        res = [y[k] - x0[k] for k in range(2)]
        res = [r - mp.nint(r) for r in res]
        cover_residual = float(mp.sqrt(res[0] ** 2 + res[1] ** 2))

        eps = 0.0
        for i in range(n):
            cx = a_seq[i] * es_v[0] + b_seq[i] * eu_v[0]
            cy = a_seq[i] * es_v[1] + b_seq[i] * eu_v[1]
            eps = max(eps, float(mp.sqrt(cx * cx + cy * cy)))
        point = wrap(np.array([float(x0[0]), float(x0[1])]))
    return PeriodicShadowResult(point, eps, cover_residual)


def bracket(tm: ToralAutomorphism, x, y, gamma=0.05):
    """Local product point w = W^s_loc(x) cap W^u_loc(y) in canonical coordinates.

    Solves x + s e_s = y + u e_u for the minimal lift of y - x; the
    intersection exists iff both |s| and |u| stay within gamma.
    """
    x, y = wrap(x), wrap(y)
    z = minimal_lift(y - x)
    if np.linalg.norm(z) > tm.delta0:
        raise OutOfLocalChart(f"d(x,y)={np.linalg.norm(z):.4f} exceeds {tm.delta0}")
    sol = np.linalg.solve(np.column_stack([tm.e_s, -tm.e_u]), z)
    s, u = float(sol[0]), float(sol[1])
    w = wrap(x + s * tm.e_s)
    exists = abs(s) <= gamma and abs(u) <= gamma
    return w, exists


def expansivity_gap(tm: ToralAutomorphism, x, y, L, beta):
    """d(x, y) for orbits beta-close over |n| <= L; contract d <= D beta e^(-lambda L).

    Raises HypothesisViolated (reporting the first bad step) if the orbits
    leave the beta-tube.
    """
    x, y = wrap(x), wrap(y)
    for n in range(-L, L + 1):
        d = torus_distance(apply(tm, x, n), apply(tm, y, n))
        if d > beta:
            raise HypothesisViolated(f"d(T^{n} x, T^{n} y) = {d:.3g} > beta={beta}", step=n)
    return float(torus_distance(x, y))


class Specification:
    """Strictly increasing integer times with gaps >= L and points on T^2.

    delta-possibility means each point, flowed over its gap, lands within
    delta of the next point.
    """

    def __init__(self, tm: ToralAutomorphism, times, points, gap_lower_bound=None):
        times = [int(t) for t in times]
        points = wrap(points)
        if len(times) != len(points) or len(times) < 2:
            raise ValueError("need matching times and points, at least two")
        gaps = [t2 - t1 for t1, t2 in zip(times, times[1:])]
        if min(gaps) <= 0:
            raise ValueError("times must be strictly increasing")
        self.gap = min(gaps)
        if gap_lower_bound is not None and self.gap < gap_lower_bound:
            raise ValueError(f"gap {self.gap} below required {gap_lower_bound}")
        self.tm = tm
        self.times = times
        self.points = points
        errs = [torus_distance(apply(tm, points[i], gaps[i]), points[i + 1])
                for i in range(len(gaps))]
        self.delta = float(max(errs))

    def fill(self):
        """Expand into the pseudo-orbit whose only jumps sit at the t_i."""
        segs = []
        for i in range(len(self.times) - 1):
            gap = self.times[i + 1] - self.times[i]
            segs.append(orbit(self.tm, self.points[i], gap - 1))
        segs.append(self.points[-1][None, :])
        return PseudoOrbit(self.tm, np.vstack(segs))


def shadow_specification(tm: ToralAutomorphism, spec: Specification):
    """Shadow a specification by filling its gaps with true orbit segments."""
    return shadow(tm, spec.fill())
