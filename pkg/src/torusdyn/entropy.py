"""Entropy estimators on sampled orbit data.

Spanning and separated counts use the dynamic metric d_T(x, y) =
max_{s<=T} d(orbit_x(s), orbit_y(s)) over an ensemble of finitely many
sampled orbits, with greedy covers/packings (lowest index first, so runs
are reproducible).  Growth of the counts across horizons yields an
entropy estimate; partition, conditional and refinement entropies act on
weighted sample measures; Gamma-sets probe entropy expansivity.
"""

from dataclasses import dataclass, field

import numpy as np


class HorizonExceeded(ValueError):
    """Orbit data shorter than the requested refinement horizon."""


class NoValidRadius(ValueError):
    """Inner-partition cores cannot reach the requested mass deficit."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


def torus_metric(a, b):
    """Flat torus distance, broadcasting over leading axes."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    d = np.minimum(d, 1.0 - d)
    return np.sqrt((d * d).sum(axis=-1))


def euclidean_metric(a, b):
    diff = np.asarray(a) - np.asarray(b)
    return np.sqrt((diff * diff).sum(axis=-1))


@dataclass
class LabeledOrbitEnsemble:
    """Equal-length sampled orbits in a metric space, optionally labeled.

    `origin` is the array index of time zero; columns before it hold
    backward iterates for two-sided probes.
    """

    orbits: np.ndarray          # (n_orbits, n_steps, dim)
    dt: float = 1.0
    metric: callable = field(default=torus_metric)
    labels: np.ndarray = None   # (n_orbits, n_steps) ints
    origin: int = 0

    def __post_init__(self):
        self.orbits = np.asarray(self.orbits, dtype=float)
        if self.orbits.ndim != 3:
            raise ValueError("orbits must be (n_orbits, n_steps, dim)")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if self.labels.shape != self.orbits.shape[:2]:
                raise ValueError("labels must match (n_orbits, n_steps)")
        if not 0 <= self.origin < self.orbits.shape[1]:
            raise ValueError("origin outside the sampled window")

    @property
    def n_orbits(self):
        return self.orbits.shape[0]

    @property
    def n_steps(self):
        return self.orbits.shape[1]

    def steps_for(self, T):
        """Number of forward samples covering [0, T]."""
        steps = int(round(T / self.dt)) + 1
        if self.origin + steps > self.n_steps:
            raise ValueError(f"T={T} exceeds the sampled horizon")
        return steps

    def restrict(self, indices):
        return LabeledOrbitEnsemble(
            self.orbits[np.asarray(indices)], self.dt, self.metric,
            None if self.labels is None else self.labels[np.asarray(indices)],
            self.origin)


def _greedy_net(dists, delta):
    """Lowest-index greedy delta-net: centers pairwise > delta, all covered."""
    n = dists.shape[0]
    covered = np.zeros(n, dtype=bool)
    kept = []
    for i in range(n):
        if not covered[i]:
            kept.append(i)
            covered |= dists[i] <= delta
    return kept


def _dynamic_distance_ladder(F: LabeledOrbitEnsemble, steps):
    """Yields (step_index, d_T matrix) with d_T the running max over steps."""
    n = F.n_orbits
    d = np.zeros((n, n))
    for s in range(steps):
        pts = F.orbits[:, F.origin + s, :]
        step_d = F.metric(pts[:, None, :], pts[None, :, :])
        np.maximum(d, step_d, out=d)
        yield s, d


def _final_distances(F, steps):
    for _, d in _dynamic_distance_ladder(F, steps):
        pass
    return d


def spanning_count(F: LabeledOrbitEnsemble, T, delta):
    """Greedy (T, delta)-cover size r^ of the ensemble.

    Greedy centers are pairwise more than delta apart, so
    r(F,T,delta) <= r^ <= r(F,T,delta/2).
    """
    d = _final_distances(F, F.steps_for(T))
    return len(_greedy_net(d, delta))


def separated_count(F: LabeledOrbitEnsemble, T, delta):
    """Greedy maximal (T, delta)-separated set size s^ (packing, s^ <= s)."""
    d = _final_distances(F, F.steps_for(T))
    n = d.shape[0]
    kept = []
    for i in range(n):
        if all(d[i, j] > delta for j in kept):
            kept.append(i)
    return len(kept)


def count_ladder(F: LabeledOrbitEnsemble, T, delta):
    """Greedy cover sizes r^(t) for every sampled horizon t = 0..T."""
    sizes = []
    for _, d in _dynamic_distance_ladder(F, F.steps_for(T)):
        sizes.append(len(_greedy_net(d, delta)))
    return sizes


def pair_survival_ladder(F: LabeledOrbitEnsemble, T, delta):
    """Number of orbit pairs that are still not (t, delta)-separated, t = 0..T."""
    iu = np.triu_indices(F.n_orbits, k=1)
    counts = []
    for _, d in _dynamic_distance_ladder(F, F.steps_for(T)):
        counts.append(int(np.count_nonzero(d[iu] <= delta)))
    return counts


def entropy_estimate(F: LabeledOrbitEnsemble, T, delta, floor=16):
    """Entropy estimate: decay rate of delta-close orbit pairs under d_t.

    Cover counts of a finite ensemble saturate at the orbit count within a
    couple of steps, which caps any (1/T) log r^ at log(n)/T; the number
    of not-yet-separated pairs instead decays like e^(-h t) with no such
    floor.  The estimate is the least-squares slope of its logarithm over
    the horizons still holding at least `floor` pairs.
    """
    counts = np.array(pair_survival_ladder(F, T, delta), dtype=float)
    usable = np.flatnonzero(counts >= floor)
    t_max = int(usable[-1]) if len(usable) else 0
    if t_max == 0:
        return 0.0
    steps = np.arange(t_max + 1, dtype=float) * F.dt
    slope = np.polyfit(steps, np.log(counts[:t_max + 1]), 1)[0]
    return float(max(-slope, 0.0))


def gamma_set(x, F: LabeledOrbitEnsemble, eps, horizon):
    """Orbit indices that stay eps-close to orbit x for all |n| <= horizon."""
    steps = int(round(horizon / F.dt))
    if F.origin - steps < 0 or F.origin + steps >= F.n_steps:
        raise ValueError("two-sided data shorter than the requested horizon")
    window = F.orbits[:, F.origin - steps:F.origin + steps + 1, :]
    d = F.metric(window[x][None, :, :], window).max(axis=1)
    return np.flatnonzero(d <= eps)


def h_expansivity_probe(F: LabeledOrbitEnsemble, eps, horizon, delta, sample=None):
    """Max entropy estimate over the Gamma_eps indistinguishability classes.

    Near zero when eps is below an expansivity constant; with eps at the
    diameter it degenerates to the plain ensemble estimate.
    """
    forward_T = (F.n_steps - 1 - F.origin) * F.dt
    idx = range(F.n_orbits) if sample is None else sample
    worst = 0.0
    for x in idx:
        members = gamma_set(x, F, eps, horizon)
        if len(members) < 2:
            continue
        worst = max(worst, entropy_estimate(F.restrict(members), forward_T, delta))
    return worst


@dataclass
class WeightedMeasure:
    """Atomic probability on sample points."""

    points: np.ndarray    # (n, dim) coordinates
    weights: np.ndarray   # (n,) nonnegative, summing to 1

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.points):
            raise ValueError("one weight per atom")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        total = self.weights.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")

    @classmethod
    def uniform(cls, points):
        points = np.asarray(points, dtype=float)
        return cls(points, np.full(len(points), 1.0 / len(points)))


@dataclass
class FinitePartition:
    """Cell labels in {0..k-1} for every sample point."""

    labels: np.ndarray
    k: int = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.k is None:
            self.k = int(self.labels.max()) + 1 if len(self.labels) else 0
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.k):
            raise ValueError("labels out of range")

    @classmethod
    def trivial(cls, n):
        return cls(np.zeros(n, dtype=int), 1)


def _plogp(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = -p[mask] * np.log(p[mask])
    return out


def partition_entropy(mu: WeightedMeasure, P: FinitePartition):
    """H_mu(P) = -sum mu(cell) log mu(cell), with 0 log 0 = 0."""
    masses = np.bincount(P.labels, weights=mu.weights, minlength=P.k)
    return float(_plogp(masses).sum())


def conditional_entropy(mu: WeightedMeasure, P: FinitePartition, Q: FinitePartition):
    """H_mu(P | Q) = -sum mu(A&B) log( mu(A&B)/mu(B) ).

    The joint masses come from the same bincount accumulation as
    partition_entropy, so conditioning on the trivial partition reproduces
    H_mu(P) bit for bit.
    """
    joint = np.bincount(P.labels * Q.k + Q.labels, weights=mu.weights,
                        minlength=P.k * Q.k).reshape(P.k, Q.k)
    q_mass = joint.sum(axis=0)
    total = 0.0
    for j in range(Q.k):
        if q_mass[j] > 0:
            total += q_mass[j] * _plogp(joint[:, j] / q_mass[j]).sum()
    return float(total)


def refine_entropy(mu: WeightedMeasure, P: FinitePartition, f, N):
    """(1/N) H_mu( join of f^{-n} P for n < N ), by label-sequence histograms.

    `f` maps atom indices to atom indices (-1 marks missing images).  The
    histogram key of an atom is its label itinerary of length N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    f = np.asarray(f, dtype=int)
    n = len(mu.weights)
    seq = np.empty((n, N), dtype=int)
    idx = np.arange(n)
    for step in range(N):
        if np.any(idx < 0):
            raise HorizonExceeded(f"orbit data ends before horizon {N}")
        seq[:, step] = P.labels[idx]
        if step + 1 < N:
            idx = np.where(idx >= 0, f[idx], -1)
    _, inverse = np.unique(seq, axis=0, return_inverse=True)
    masses = np.bincount(inverse.ravel(), weights=mu.weights)
    return float(_plogp(masses).sum()) / N


def jensen_bound(a):
    """(lhs, rhs) with lhs = -sum a_i log a_i and rhs = 1 + (sum a_i) log n.

    Always lhs <= rhs; when sum a_i = 1 additionally lhs <= log n.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("entries must be nonnegative")
    n = len(a)
    lhs = float(_plogp(a).sum())
    rhs = 1.0 + float(a.sum()) * np.log(n) if n else 1.0
    return lhs, rhs


def build_inner_partition(mu: WeightedMeasure, P: FinitePartition, eps,
                          metric=torus_metric):
    """Shrink each cell to a compact core, collecting shaved mass in cell 0.

    Core i keeps the atoms of cell i at distance >= r_i from the cell's
    complement, with r_i the largest sampled radius whose shaved mass
    stays below eps; the remainder cell 0 then has mass < k*eps.
    Returns (partition with cells 0..k, array of chosen radii).
    """
    if eps <= 0:
        raise NoValidRadius("deficit budget must be positive", achieved=0.0)
    n = len(mu.weights)
    labels = np.zeros(n, dtype=int)
    radii = np.zeros(P.k)
    pair_d = metric(mu.points[:, None, :], mu.points[None, :, :])
    for c in range(P.k):
        inside = P.labels == c
        if not inside.any():
            continue
        outside = ~inside
        if not outside.any():
            # lone cell on a closed space: no complement, keep it whole
            labels[inside] = c + 1
            continue
        dist_to_comp = pair_d[np.ix_(inside, outside)].min(axis=1)
        cell_idx = np.flatnonzero(inside)
        order = np.argsort(dist_to_comp, kind="stable")
        # shaved[j] = mass removed when the core keeps atoms order[j:]
        shaved = np.concatenate([[0.0], np.cumsum(mu.weights[cell_idx][order])])
        pick = int(np.flatnonzero(shaved < eps)[-1])
        if pick == len(cell_idx):
            continue  # whole cell lighter than eps: core empty, collar absorbs it
        radius = float(dist_to_comp[order[pick]])
        if radius <= 0.0:
            positive = np.flatnonzero(dist_to_comp[order] > 0)
            needed = shaved[positive[0]] if len(positive) else float(shaved[-1])
            raise NoValidRadius(
                f"cell {c}: atoms too sparse for a positive inset radius",
                achieved=float(needed))
        labels[cell_idx[order[pick:]]] = c + 1
        radii[c] = radius
    return FinitePartition(labels, P.k + 1), radii


# ---------------------------------------------------------------------------
# CSV ensemble I/O: rows of (orbit id, step, coordinates...)

def ensemble_to_csv(F: LabeledOrbitEnsemble):
    dim = F.orbits.shape[2]
    header = "orbit,step," + ",".join(f"x{i+1}" for i in range(dim))
    lines = [header]
    for o in range(F.n_orbits):
        for s in range(F.n_steps):
            coords = ",".join(repr(float(v)) for v in F.orbits[o, s])
            lines.append(f"{o},{s - F.origin},{coords}")
    return "\n".join(lines) + "\n"


def ensemble_from_csv(text, dt=1.0, metric=torus_metric):
    rows = []
    for ln in text.strip().splitlines():
        ln = ln.strip()
        if not ln or ln[0].isalpha():
            continue
        parts = ln.split(",")
        rows.append((int(parts[0]), int(parts[1]), [float(v) for v in parts[2:]]))
    if not rows:
        raise ValueError("no data rows")
    orbit_ids = sorted({r[0] for r in rows})
    steps = sorted({r[1] for r in rows})
    id_pos = {o: i for i, o in enumerate(orbit_ids)}
    step_pos = {s: i for i, s in enumerate(steps)}
    dim = len(rows[0][2])
    orbits = np.full((len(orbit_ids), len(steps), dim), np.nan)
    for o, s, coords in rows:
        orbits[id_pos[o], step_pos[s]] = coords
    if np.isnan(orbits).any():
        raise ValueError("ragged ensemble: missing (orbit, step) rows")
    return LabeledOrbitEnsemble(orbits, dt=dt, metric=metric, origin=step_pos[0] if 0 in step_pos else 0)
