"""Subshifts of finite type.

A 0/1 transition matrix A determines the two-sided shift space of all
bi-infinite symbol sequences whose consecutive pairs are allowed by A.
This module provides word counting, topological entropy via the Perron
root, shortest periodic orbits together with the 1 + M*e^(1-h) period
bound, the n-block recoding Z^(n) whose symbols are legal n-words, and
the a^(-n) cylinder metric on symbol windows.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np


class ZeroShift(ValueError):
    """The essential part of the transition matrix is empty."""


class NoCycle(ValueError):
    """The transition graph is acyclic."""


class EmptyRecode(ValueError):
    """No legal words of the requested length."""


class IllegalConcatenation(ValueError):
    """A block cycle violates the 2n-word transition rule."""


class WindowMismatch(ValueError):
    """Symbol windows have different radii."""


class TransitionMatrix:
    """0/1 transition matrix of a subshift of finite type."""

    def __init__(self, bits):
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise ValueError("transition matrix must be square")
        self.bits = bits.astype(bool)
        self.m = bits.shape[0]
        if not self.bits.any():
            raise ValueError("transition matrix allows no transition")

    def __eq__(self, other):
        return isinstance(other, TransitionMatrix) and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"TransitionMatrix(m={self.m})"

    def essential_part(self):
        """Iteratively drop symbols without outgoing or incoming edges.

        Returns (reduced TransitionMatrix or None, kept symbol indices).
        """
        keep = np.ones(self.m, dtype=bool)
        bits = self.bits
        while True:
            sub = bits[np.ix_(keep, keep)]
            alive = sub.any(axis=1) & sub.any(axis=0)
            if alive.all():
                break
            idx = np.flatnonzero(keep)
            keep[idx[~alive]] = False
            if not keep.any():
                return None, np.array([], dtype=int)
        kept = np.flatnonzero(keep)
        return TransitionMatrix(bits[np.ix_(keep, keep)]), kept

    def is_legal_word(self, word):
        """A(w_i, w_{i+1}) = 1 for all consecutive symbols."""
        word = tuple(word)
        if any(not (0 <= s < self.m) for s in word):
            return False
        return all(self.bits[word[i], word[i + 1]] for i in range(len(word) - 1))

    def legal_words(self, n):
        """All legal words of length n, lexicographic order."""
        if n < 1:
            raise ValueError("word length must be >= 1")
        words = [(s,) for s in range(self.m)]
        for _ in range(n - 1):
            words = [w + (int(t),) for w in words for t in np.flatnonzero(self.bits[w[-1]])]
        return words

    # word-source protocol used by block_recode
    def words(self, n):
        return self.legal_words(n)

    def is_legal(self, word):
        return self.is_legal_word(word)


class FiniteWordSource:
    """Subshift language given by an explicit finite list of legal words.

    Legal n-words are the length-n subwords of the listed words; lengths
    beyond the longest listed word are not defined.
    """

    def __init__(self, words):
        self._by_length = {}
        for w in words:
            w = tuple(w)
            for n in range(1, len(w) + 1):
                bucket = self._by_length.setdefault(n, set())
                for i in range(len(w) - n + 1):
                    bucket.add(w[i:i + n])

    def words(self, n):
        if n not in self._by_length:
            raise ValueError(f"no words of length {n} available")
        return sorted(self._by_length[n])

    def is_legal(self, word):
        word = tuple(word)
        if len(word) not in self._by_length:
            raise ValueError(f"no words of length {len(word)} available")
        return word in self._by_length[len(word)]


@dataclass
class PeriodicOrbit:
    """A periodic symbol sequence, stored as one period."""

    cycle: tuple
    minimal: bool = False

    def __post_init__(self):
        self.cycle = tuple(self.cycle)
        if not self.cycle:
            raise ValueError("empty cycle")

    @property
    def period(self):
        return len(self.cycle)

    def is_legal(self, A: TransitionMatrix):
        """Legality of the cycle including the wraparound transition."""
        return A.is_legal_word(self.cycle + (self.cycle[0],))


def _power_iteration_root(bits, rtol, max_iter):
    """Perron root of an irreducible 0/1 block, via power iteration on A + I.

    The shift by I makes the block primitive without moving eigenvectors,
    so the iteration converges geometrically to the (simple) Perron pair.
    """
    B = bits.astype(float) + np.eye(bits.shape[0])
    v = np.ones(bits.shape[0])
    for _ in range(max_iter):
        w = B @ v
        lam = float(v @ w) / float(v @ v)
        resid = np.max(np.abs(w - lam * v))
        v = w / np.max(w)
        if resid <= rtol * lam:
            return lam - 1.0
    raise RuntimeError(f"power iteration did not reach rtol={rtol}")


def top_entropy(A: TransitionMatrix, rtol=1e-12, max_iter=200000):
    """log of the Perron root of A, by power iteration.

    The Perron root of a reducible matrix can be defective, where power
    iteration stalls; it equals the largest root over strongly connected
    components, each of which is irreducible, so the iteration runs per
    component.
    """
    from scipy.sparse.csgraph import connected_components

    ess, _ = A.essential_part()
    if ess is None:
        raise ZeroShift("essential part of the shift is empty")
    n_comp, labels = connected_components(ess.bits, directed=True, connection="strong")
    root = 0.0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        block = ess.bits[np.ix_(idx, idx)]
        if len(idx) == 1 and not block[0, 0]:
            continue  # transient symbol, no cycle through it
        root = max(root, _power_iteration_root(block, rtol, max_iter))
    if root <= 0.0:
        raise ZeroShift("no cycles in the essential part")
    return float(np.log(root))


def count_words(A: TransitionMatrix, n):
    """Exact number of legal n-words (Python integers, never overflows)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = [1] * A.m
    rows = [list(np.flatnonzero(A.bits[i])) for i in range(A.m)]
    for _ in range(n - 1):
        counts = [sum(counts[j] for j in rows[i]) for i in range(A.m)]
    return sum(counts)


def shortest_cycle(A: TransitionMatrix):
    """Minimum-period periodic orbit, by BFS from every symbol."""
    rows = [list(np.flatnonzero(A.bits[i])) for i in range(A.m)]
    best = None
    for s in range(A.m):
        # BFS over the transition graph; dist[u] = shortest path length s -> u
        dist = {s: 0}
        parent = {}
        frontier = [s]
        found = None
        while frontier and found is None:
            nxt = []
            for u in frontier:
                for v in rows[u]:
                    if v == s:
                        found = u
                        break
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
                if found is not None:
                    break
            frontier = nxt
        if found is None:
            continue
        path = [found]
        while path[-1] != s:
            path.append(parent[path[-1]])
        cycle = tuple(reversed(path))
        if best is None or len(cycle) < len(best):
            best = cycle
    if best is None:
        raise NoCycle("transition graph is acyclic")
    return PeriodicOrbit(best, minimal=True)


def brute_force_min_period(A: TransitionMatrix, max_period=None):
    """Independent oracle: min{k : trace(A^k) > 0} via exact integer powers."""
    if max_period is None:
        max_period = A.m
    ints = A.bits.astype(object).astype(int)
    power = np.eye(A.m, dtype=object)
    for k in range(1, max_period + 1):
        power = power @ ints
        if sum(power[i, i] for i in range(A.m)) > 0:
            return k
    raise NoCycle(f"no cycle of period <= {max_period}")


def bq_bound(A: TransitionMatrix):
    """Upper bound 1 + M*e^(1-h) on the shortest period, h = top_entropy(A)."""
    h = top_entropy(A)
    return 1.0 + A.m * np.exp(1.0 - h)


@dataclass
class BlockRecoding:
    """The subshift Z^(n): symbols are legal n-words of the source."""

    matrix: TransitionMatrix
    words: list
    n: int
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}


def block_recode(source, n):
    """Recode a subshift into the 1-step shift on its legal n-words.

    A transition u -> v is allowed iff the concatenation uv of length 2n
    is legal in the source.  For a 1-step SFT source this reduces to the
    single bridge transition between the last symbol of u and the first
    of v.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    words = [tuple(w) for w in source.words(n)]
    if not words:
        raise EmptyRecode(f"no legal {n}-words")
    k = len(words)
    bits = np.zeros((k, k), dtype=bool)
    if isinstance(source, TransitionMatrix):
        for i, u in enumerate(words):
            for j, v in enumerate(words):
                bits[i, j] = source.bits[u[-1], v[0]]
    else:
        legal_2n = set(map(tuple, source.words(2 * n)))
        for i, u in enumerate(words):
            for j, v in enumerate(words):
                bits[i, j] = (u + v) in legal_2n
    if not bits.any():
        raise EmptyRecode(f"no legal {2 * n}-words")
    return BlockRecoding(TransitionMatrix(bits), words, n)


def project_cycle(recoding: BlockRecoding, z: PeriodicOrbit, source=None):
    """Concatenate the n-word symbols of a Z^(n) cycle into a base cycle.

    Every cyclic length-n window of the result must be a legal n-word of
    the source; violations mean the 2n rule was broken upstream.
    """
    A = recoding.matrix
    cyc = z.cycle
    for i in range(len(cyc)):
        if not A.bits[cyc[i], cyc[(i + 1) % len(cyc)]]:
            raise IllegalConcatenation(f"transition {i} illegal in Z^({recoding.n})")
    word = tuple(s for i in cyc for s in recoding.words[i])
    if source is not None:
        n = recoding.n
        doubled = word + word
        for i in range(len(word)):
            if not source.is_legal(doubled[i:i + n]):
                raise IllegalConcatenation(f"window at {i} not a legal {n}-word")
    return PeriodicOrbit(word)


def d_a_distance(u, w, a=2.0):
    """Cylinder metric a^(-n) on symbol windows of equal radius.

    n is the largest k with agreement on all |i| <= k.  Full agreement on
    the window returns 0 (true distance is <= a^(-radius)); disagreement
    at the center returns a (boundary convention).
    """
    if a <= 1:
        raise ValueError("metric base a must be > 1")
    u, w = tuple(u), tuple(w)
    if len(u) != len(w) or len(u) % 2 == 0:
        raise WindowMismatch("windows must share the same odd length")
    r = len(u) // 2
    if u[r] != w[r]:
        return float(a)
    n = 0
    while n < r and u[r - n - 1] == w[r - n - 1] and u[r + n + 1] == w[r + n + 1]:
        n += 1
    if n == r:
        return 0.0
    return float(a) ** (-n)


def closed_walks(A: TransitionMatrix, p):
    """All legal words of length p whose wraparound transition is also legal.

    The set is closed under rotation, so cyclic shift acts on it; there are
    trace(A^p) of them.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    return [w for w in A.legal_words(p) if A.bits[w[-1], w[0]]]


def cylinder_growth(A: TransitionMatrix, n):
    """Measured K_n = (# n-words) * e^(-n*h); exposed as data only."""
    h = top_entropy(A)
    return count_words(A, n) * np.exp(-n * h)


# ---------------------------------------------------------------------------
# matrix and word-list I/O

def format_matrix(A: TransitionMatrix, fmt="grid"):
    """Serialize as a 0/1 grid or as run-length tokens `count*bit`."""
    if fmt == "grid":
        return "\n".join("".join("1" if b else "0" for b in row) for row in A.bits) + "\n"
    if fmt == "rle":
        flat = A.bits.astype(int).ravel()
        runs = []
        start = 0
        for i in range(1, len(flat) + 1):
            if i == len(flat) or flat[i] != flat[start]:
                runs.append(f"{i - start}*{flat[start]}")
                start = i
        return f"rle {A.m}\n" + " ".join(runs) + "\n"
    raise ValueError(f"unknown matrix format {fmt!r}")


def parse_matrix(text):
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    if lines[0].startswith("rle"):
        m = int(lines[0].split()[1])
        bits = []
        for tok in " ".join(lines[1:]).split():
            count, bit = tok.split("*")
            bits.extend([int(bit)] * int(count))
        if len(bits) != m * m:
            raise ValueError(f"run-length data has {len(bits)} bits, expected {m * m}")
        return TransitionMatrix(np.array(bits).reshape(m, m))
    rows = []
    for ln in lines:
        row = [int(c) for c in (ln.split() if " " in ln else ln)]
        rows.append(row)
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix grid is not square")
    return TransitionMatrix(np.array(rows))


def load_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def save_matrix(A: TransitionMatrix, path, fmt="grid"):
    with open(path, "w") as fh:
        fh.write(format_matrix(A, fmt))


def format_words(words):
    """Newline-delimited symbol strings; commas when symbols exceed one digit."""
    out = []
    for w in words:
        w = tuple(w)
        if all(0 <= s <= 9 for s in w):
            out.append("".join(str(s) for s in w))
        else:
            out.append(",".join(str(s) for s in w))
    return "\n".join(out) + "\n"


def parse_words(text):
    words = []
    for ln in text.strip().splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if "," in ln:
            words.append(tuple(int(t) for t in ln.split(",")))
        else:
            words.append(tuple(int(c) for c in ln))
    return words


def random_transition_matrix(rng, m, density, require_cycle=True, max_tries=100):
    """Random essential transition matrix with the given edge density."""
    for _ in range(max_tries):
        bits = rng.random((m, m)) < density
        if not bits.any():
            continue
        ess, _ = TransitionMatrix(bits).essential_part()
        if ess is None:
            continue
        if require_cycle:
            try:
                shortest_cycle(ess)
            except NoCycle:
                continue
        return ess
    raise RuntimeError("failed to sample an essential matrix")


GOLDEN_MEAN = TransitionMatrix([[1, 1], [1, 0]])


def full_shift(m):
    return TransitionMatrix(np.ones((m, m), dtype=bool))
