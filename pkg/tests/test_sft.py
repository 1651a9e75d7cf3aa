import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusdyn import sft
from torusdyn.sft import (
    GOLDEN_MEAN,
    FiniteWordSource,
    PeriodicOrbit,
    TransitionMatrix,
    block_recode,
    bq_bound,
    brute_force_min_period,
    count_words,
    d_a_distance,
    full_shift,
    project_cycle,
    shortest_cycle,
    top_entropy,
)

LOG_PHI = np.log((1 + np.sqrt(5)) / 2)


class TestTopEntropy:
    def test_full_shift(self):
        assert abs(top_entropy(full_shift(4)) - np.log(4)) <= 1e-12

    def test_golden_mean_closed_form(self):
        assert abs(top_entropy(GOLDEN_MEAN) - LOG_PHI) <= 1e-9

    def test_single_cycle_zero_entropy(self):
        perm = TransitionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        assert abs(top_entropy(perm)) <= 1e-12

    def test_empty_essential_part(self):
        # one edge, no return path: essential part is empty
        A = TransitionMatrix([[0, 1], [0, 0]])
        with pytest.raises(sft.ZeroShift):
            top_entropy(A)


class TestCountWords:
    def test_golden_mean_fibonacci(self):
        assert [count_words(GOLDEN_MEAN, n) for n in range(1, 7)] == [2, 3, 5, 8, 13, 21]

    def test_full_shift_power(self):
        assert count_words(full_shift(3), 5) == 3**5

    def test_single_cycle(self):
        perm = TransitionMatrix([[0, 1], [1, 0]])
        for n in (1, 4, 9):
            assert count_words(perm, n) == 2

    def test_no_overflow(self):
        # way past int64 territory
        assert count_words(full_shift(10), 30) == 10**30

    def test_word_count_rate_decreases_to_entropy(self):
        h = top_entropy(GOLDEN_MEAN)
        rates = [np.log(count_words(GOLDEN_MEAN, n)) / n for n in range(1, 13)]
        assert all(a >= b - 1e-12 for a, b in zip(rates, rates[1:]))
        assert rates[-1] - h <= 0.02


class TestShortestCycle:
    def test_self_loop(self):
        A = TransitionMatrix([[0, 1], [1, 1]])
        assert shortest_cycle(A).period == 1

    def test_golden_mean_period_one(self):
        orbit = shortest_cycle(GOLDEN_MEAN)
        assert orbit.period == 1 and orbit.cycle == (0,)

    def test_three_cycle(self):
        perm = TransitionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        orbit = shortest_cycle(perm)
        assert orbit.period == 3
        assert orbit.is_legal(perm)

    def test_acyclic_raises(self):
        A = TransitionMatrix([[0, 1], [0, 0]])
        with pytest.raises(sft.NoCycle):
            shortest_cycle(A)

    def test_agrees_with_trace_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            A = sft.random_transition_matrix(rng, int(rng.integers(2, 9)), rng.uniform(0.2, 0.8))
            assert shortest_cycle(A).period == brute_force_min_period(A)


class TestBqBound:
    def test_full_shift_three(self):
        assert abs(bq_bound(full_shift(3)) - (1 + np.e)) <= 1e-9

    def test_golden_mean_value(self):
        expected = 1 + 2 * np.exp(1 - LOG_PHI)
        assert abs(bq_bound(GOLDEN_MEAN) - expected) <= 1e-9
        assert shortest_cycle(GOLDEN_MEAN).period <= expected

    def test_single_self_loop(self):
        A = TransitionMatrix([[1]])
        assert abs(bq_bound(A) - (1 + np.e)) <= 1e-9

    def test_random_matrices_respect_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            A = sft.random_transition_matrix(rng, int(rng.integers(2, 13)), rng.uniform(0.1, 0.9))
            assert shortest_cycle(A).period <= bq_bound(A) + 1e-9

    def test_short_word_determined_by_symbol_set(self):
        # proof-order uniqueness claim, checked on instances: if the shortest
        # period is k+1, the symbol set of a legal k-word determines the word
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(300):
            bits = rng.random((int(rng.integers(3, 8)),) * 2) < rng.uniform(0.15, 0.5)
            np.fill_diagonal(bits, False)  # no period-1 orbits
            ess, _ = TransitionMatrix(bits).essential_part() if bits.any() else (None, None)
            if ess is None:
                continue
            try:
                k = shortest_cycle(ess).period - 1
            except sft.NoCycle:
                continue
            A = ess
            if not 1 <= k <= 6:
                continue
            seen = {}
            for w in A.legal_words(k):
                key = frozenset(w)
                assert seen.setdefault(key, w) == w
            checked += 1
        assert checked > 20


class TestBlockRecode:
    def test_golden_mean_n2_symbols(self):
        rec = block_recode(GOLDEN_MEAN, 2)
        assert rec.words == [(0, 0), (0, 1), (1, 0)]
        assert top_entropy(rec.matrix) >= 2 * LOG_PHI - 1e-9

    def test_full_shift_recode(self):
        rec = block_recode(full_shift(2), 2)
        assert rec.matrix.m == 4
        assert rec.matrix.bits.all()
        assert abs(top_entropy(rec.matrix) - 2 * np.log(2)) <= 1e-9

    def test_fixed_point_shift(self):
        A = TransitionMatrix([[1]])
        rec = block_recode(A, 5)
        assert rec.matrix.m == 1 and rec.matrix.bits[0, 0]

    def test_entropy_inequality_small_n(self):
        three = TransitionMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        for A in (GOLDEN_MEAN, three):
            h = top_entropy(A)
            for n in range(1, 7):
                rec = block_recode(A, n)
                assert top_entropy(rec.matrix) >= n * h - 1e-9

    def test_word_list_source_matches_matrix_source(self):
        n = 3
        words = GOLDEN_MEAN.legal_words(2 * n)
        src = FiniteWordSource(words)
        rec_a = block_recode(GOLDEN_MEAN, n)
        rec_b = block_recode(src, n)
        assert rec_a.words == rec_b.words
        assert np.array_equal(rec_a.matrix.bits, rec_b.matrix.bits)


class TestProjectCycle:
    def test_self_loop_projection(self):
        rec = block_recode(GOLDEN_MEAN, 2)
        z = PeriodicOrbit((0,))  # the word 00 has a self-loop
        proj = project_cycle(rec, z, source=GOLDEN_MEAN)
        assert proj.cycle == (0, 0)

    def test_two_cycle_projection(self):
        rec = block_recode(GOLDEN_MEAN, 2)
        i, j = rec.index[(0, 1)], rec.index[(0, 0)]
        proj = project_cycle(rec, PeriodicOrbit((i, j)), source=GOLDEN_MEAN)
        assert proj.cycle == (0, 1, 0, 0)
        doubled = proj.cycle * 2
        assert all(GOLDEN_MEAN.is_legal_word(doubled[t:t + 2]) for t in range(4))

    def test_concatenation_with_illegal_window_rejected(self):
        # (0,1) -> (1,0) would project to 0110, whose window 11 is illegal,
        # and the 2n rule indeed forbids that transition
        rec = block_recode(GOLDEN_MEAN, 2)
        i, j = rec.index[(0, 1)], rec.index[(1, 0)]
        assert not rec.matrix.bits[i, j]
        with pytest.raises(sft.IllegalConcatenation):
            project_cycle(rec, PeriodicOrbit((i, j)), source=GOLDEN_MEAN)

    def test_recoded_full_shift_period(self):
        rec = block_recode(full_shift(2), 3)
        z = shortest_cycle(rec.matrix)
        proj = project_cycle(rec, z, source=full_shift(2))
        assert proj.period == 3 * z.period

    def test_illegal_transition_raises(self):
        # golden-mean Z^(2) allows every bridge, so test on the 3-cycle
        perm = TransitionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        rec3 = block_recode(perm, 2)
        w01 = rec3.index[(0, 1)]
        assert not rec3.matrix.bits[w01, w01]
        with pytest.raises(sft.IllegalConcatenation):
            project_cycle(rec3, PeriodicOrbit((w01, w01)), source=perm)

    def test_projections_have_legal_windows(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            A = sft.random_transition_matrix(rng, int(rng.integers(2, 6)), rng.uniform(0.3, 0.8))
            for n in (2, 3):
                rec = block_recode(A, n)
                z = shortest_cycle(rec.matrix)
                proj = project_cycle(rec, z, source=A)  # raises on any illegal window
                assert proj.period == n * z.period


class TestDaDistance:
    def test_identical_windows(self):
        w = (0, 1, 0, 1, 0)
        assert d_a_distance(w, w) == 0.0

    def test_agree_up_to_three(self):
        u = (9, 0, 1, 0, 1, 0, 1, 0, 9)  # radius 4, disagree at |i|=4
        w = (8, 0, 1, 0, 1, 0, 1, 0, 8)
        assert d_a_distance(u, w, a=2.0) == 2.0 ** (-3)

    def test_center_disagreement_convention(self):
        assert d_a_distance((0, 1, 0), (0, 0, 0), a=3.0) == 3.0

    def test_radius_mismatch(self):
        with pytest.raises(sft.WindowMismatch):
            d_a_distance((0, 1, 0), (0, 1, 0, 1, 0))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 4), st.data())
    def test_ultrametric(self, r, data):
        n = 2 * r + 1
        sym = st.tuples(*[st.integers(0, 1)] * n)
        u, v, w = data.draw(sym), data.draw(sym), data.draw(sym)
        duv = d_a_distance(u, v)
        assert duv <= max(d_a_distance(u, w), d_a_distance(w, v)) + 1e-15


class TestMatrixIO:
    def test_grid_round_trip(self):
        text = sft.format_matrix(GOLDEN_MEAN, "grid")
        assert sft.parse_matrix(text) == GOLDEN_MEAN

    def test_rle_round_trip(self):
        rng = np.random.default_rng(7)
        A = sft.random_transition_matrix(rng, 9, 0.4)
        text = sft.format_matrix(A, "rle")
        assert sft.parse_matrix(text) == A

    def test_spaced_grid(self):
        assert sft.parse_matrix("1 1\n1 0\n") == GOLDEN_MEAN

    def test_word_list_round_trip(self):
        words = GOLDEN_MEAN.legal_words(4)
        assert sft.parse_words(sft.format_words(words)) == words

    def test_word_list_commas(self):
        words = [(10, 3), (2, 11, 0)]
        assert sft.parse_words(sft.format_words(words)) == words


def test_cylinder_growth_exposed():
    k6 = sft.cylinder_growth(GOLDEN_MEAN, 6)
    assert k6 > 0
