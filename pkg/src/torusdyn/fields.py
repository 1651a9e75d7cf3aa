"""Smooth periodic scalar and covector fields on the d-torus.

Potentials are truncated Fourier series, so values, gradients and rigorous
sup-norm bounds come straight from the coefficients with no
finite-difference noise.  Arbitrary scalar fields (for example perturbing
canal potentials) plug into the same protocol: callable on point batches,
with a `grad` method and conservative `value_bounds`.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


class FourierSeries:
    """Real trigonometric polynomial sum_k [a_k cos(2pi k.x) + b_k sin(2pi k.x)].

    Coefficients are dicts mapping integer index tuples to floats; the
    zero index contributes a constant (its sin term vanishes).
    """

    def __init__(self, dim, cos=None, sin=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.cos = {self._key(k): float(v) for k, v in (cos or {}).items() if v != 0.0}
        self.sin = {self._key(k): float(v) for k, v in (sin or {}).items() if v != 0.0}
        self.sin.pop((0,) * dim, None)
        keys = sorted(set(self.cos) | set(self.sin))
        self._modes = np.array(keys, dtype=float).reshape(len(keys), dim)
        self._a = np.array([self.cos.get(k, 0.0) for k in keys])
        self._b = np.array([self.sin.get(k, 0.0) for k in keys])

    def _key(self, k):
        k = (k,) if np.isscalar(k) else tuple(int(i) for i in k)
        if len(k) != self.dim:
            raise ValueError(f"index {k} has wrong dimension")
        return k

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not len(self._a):
            return np.zeros(x.shape[:-1])
        phase = TWO_PI * (x @ self._modes.T)
        return np.cos(phase) @ self._a + np.sin(phase) @ self._b

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if not len(self._a):
            return np.zeros(x.shape)
        phase = TWO_PI * (x @ self._modes.T)
        coeff = (-np.sin(phase) * self._a + np.cos(phase) * self._b) * TWO_PI
        return coeff @ self._modes

    def value_bounds(self):
        """Rigorous (lo, hi): constant term +- the l1 norm of the other modes."""
        const = self.cos.get((0,) * self.dim, 0.0)
        spread = sum(abs(v) for k, v in self.cos.items() if any(k)) \
            + sum(abs(v) for v in self.sin.values())
        return const - spread, const + spread

    def is_zero(self):
        return not len(self._a)

    @classmethod
    def zero(cls, dim):
        return cls(dim)


class SumField:
    """Signed sum of scalar fields sharing a dimension."""

    def __init__(self, terms):
        self.terms = [(float(sign), field) for sign, field in terms]
        self.dim = self.terms[0][1].dim

    def __call__(self, x):
        return sum(sign * field(x) for sign, field in self.terms)

    def grad(self, x):
        return sum(sign * field.grad(x) for sign, field in self.terms)

    def value_bounds(self):
        lo = hi = 0.0
        for sign, field in self.terms:
            flo, fhi = field.value_bounds()
            if sign >= 0:
                lo, hi = lo + sign * flo, hi + sign * fhi
            else:
                lo, hi = lo + sign * fhi, hi + sign * flo
        return lo, hi


class OneForm:
    """Covector field on T^d with FourierSeries (or compatible) components."""

    def __init__(self, components):
        self.components = list(components)
        self.dim = len(self.components)
        for c in self.components:
            if c.dim != self.dim:
                raise ValueError("component dimension mismatch")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([c(x) for c in self.components], axis=-1)

    def jacobian(self, x):
        """J[..., i, j] = d eta_i / d x_j."""
        return np.stack([c.grad(x) for c in self.components], axis=-2)

    def curl2(self, x):
        """d eta = (d1 eta_2 - d2 eta_1) dx1^dx2 on T^2."""
        if self.dim != 2:
            raise ValueError("curl2 needs dim 2")
        j = self.jacobian(x)
        return j[..., 1, 0] - j[..., 0, 1]

    def sup_norm_bound(self):
        """Rigorous bound on |eta(x)| (l2 of per-component l1 bounds)."""
        per = []
        for c in self.components:
            lo, hi = c.value_bounds()
            per.append(max(abs(lo), abs(hi)))
        return float(np.linalg.norm(per))

    def is_zero(self):
        return all(getattr(c, "is_zero", lambda: False)() for c in self.components)

    @classmethod
    def zero(cls, dim):
        return cls([FourierSeries.zero(dim) for _ in range(dim)])


def grid_extremum(field, dim, n=512, refine=True):
    """Numeric (min, argmin, max, argmax) of a periodic scalar field.

    Dense grid scan followed by local gradient-descent polish; an oracle
    helper, not a rigorous bound.
    """
    from scipy.optimize import minimize

    axes = [np.arange(n) / n for _ in range(dim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    vals = field(mesh)
    lo_i, hi_i = int(np.argmin(vals)), int(np.argmax(vals))
    best = {"min": (float(vals[lo_i]), mesh[lo_i]), "max": (float(vals[hi_i]), mesh[hi_i])}
    if refine:
        for kind, sign in (("min", 1.0), ("max", -1.0)):
            x0 = best[kind][1]
            res = minimize(lambda x: sign * field(x), x0, jac=lambda x: sign * field.grad(x),
                           method="BFGS", options={"gtol": 1e-12, "maxiter": 200})
            val = sign * res.fun
            if (kind == "min" and val < best[kind][0]) or (kind == "max" and val > best[kind][0]):
                best[kind] = (float(val), res.x % 1.0)
    return best["min"][0], best["min"][1], best["max"][0], best["max"][1]
