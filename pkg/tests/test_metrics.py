import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosodyclone import metrics
from prosodyclone.dsp import FrameConfig, MelSpectrogram
from prosodyclone.errors import DegenerateInputError, InvalidInputError


def spec(frames):
    return MelSpectrogram(np.asarray(frames, dtype=np.float64), FrameConfig())


def brute_force_dtw(dist):
    """Minimal path cost by enumerating every monotone path."""
    tx, ty = dist.shape
    best = [np.inf]

    def walk(i, j, cost):
        cost += dist[i, j]
        if cost >= best[0]:
            return
        if (i, j) == (tx - 1, ty - 1):
            best[0] = cost
            return
        if i + 1 < tx and j + 1 < ty:
            walk(i + 1, j + 1, cost)
        if i + 1 < tx:
            walk(i + 1, j, cost)
        if j + 1 < ty:
            walk(i, j + 1, cost)

    walk(0, 0, 0.0)
    return best[0]


class TestDtw:
    def test_identity_is_zero_diagonal(self):
        x = spec(np.arange(12.0).reshape(4, 3))
        result = metrics.dtw(x, x)
        assert result.total_cost == 0.0
        assert result.path == ((0, 0), (1, 1), (2, 2), (3, 3))

    def test_single_frames_unit_distance(self):
        assert metrics.dtw(spec([[0.0]]), spec([[1.0]])).total_cost == 1.0

    def test_matches_exhaustive_search(self):
        rng = np.random.default_rng(17)
        for trial in range(100):
            tx, ty = rng.integers(1, 5, size=2)
            x = rng.normal(size=(tx, 3))
            y = rng.normal(size=(ty, 3))
            from scipy.spatial.distance import cdist

            expected = brute_force_dtw(cdist(x, y))
            got = metrics.dtw(x, y).total_cost
            assert got == pytest.approx(expected, abs=1e-12), f"trial {trial}"

    def test_path_structure(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(6, 2))
        y = rng.normal(size=(4, 2))
        path = metrics.dtw(x, y).path
        assert path[0] == (0, 0)
        assert path[-1] == (5, 3)
        for (i0, j0), (i1, j1) in zip(path, path[1:]):
            assert (i1 - i0, j1 - j0) in {(1, 0), (0, 1), (1, 1)}

    def test_cost_bounded_by_diagonal_path(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            x = rng.normal(size=(5, 4))
            y = rng.normal(size=(5, 4))
            diagonal = sum(
                float(np.linalg.norm(x[i] - y[i])) for i in range(5)
            )
            assert metrics.dtw(x, y).total_cost <= diagonal + 1e-12

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            metrics.dtw(np.zeros((3, 4)), np.zeros((3, 5)))


class TestMsd:
    def test_self_distance_zero(self):
        x = spec(np.random.default_rng(0).normal(size=(5, 3)))
        assert metrics.msd(x, x) == 0.0

    def test_single_frame_normalization(self):
        assert metrics.msd(spec([[0.0]]), spec([[1.0]])) == 1.0

    def test_asymmetric_normalization_identity(self):
        # symmetric steps make the raw cost symmetric, so the ratio of
        # the two orderings equals the inverse ratio of frame counts
        rng = np.random.default_rng(29)
        for _ in range(20):
            tx, ty = rng.integers(2, 7, size=2)
            x = rng.normal(size=(tx, 3))
            y = rng.normal(size=(ty, 3))
            forward = metrics.msd(x, y)
            backward = metrics.msd(y, x)
            if forward > 0:
                assert forward / backward == pytest.approx(ty / tx, rel=1e-12)

    def test_non_negative(self):
        rng = np.random.default_rng(31)
        x = rng.normal(size=(4, 3))
        y = rng.normal(size=(6, 3))
        assert metrics.msd(x, y) >= 0.0


class TestVoicingAndPitchErrors:
    def test_identical_contours_no_errors(self):
        x = np.array([100.0, 0.0, 150.0])
        assert metrics.vde(x, x) == set()
        assert metrics.gpe(x, x) == set()
        assert metrics.ffe(x, x) == 0.0

    def test_vde_flags_voicing_mismatch(self):
        assert metrics.vde([100.0, 0.0], [100.0, 90.0]) == {1}

    def test_vde_empty_for_all_unvoiced(self):
        assert metrics.vde([0.0, 0.0], [0.0, 0.0]) == set()

    def test_gpe_inclusive_upper_bound(self):
        x = np.array([100.0, 200.0, 300.0])
        assert metrics.gpe(x, 1.2 * x) == set()
        assert metrics.gpe(x, 0.8 * x) == set()

    def test_gpe_just_outside_band(self):
        x = np.array([100.0])
        assert metrics.gpe(x, np.array([120.1])) == {0}
        assert metrics.gpe(x, np.array([79.9])) == {0}

    def test_worked_four_frame_example(self):
        x = np.array([100.0, 0.0, 200.0, 150.0])
        y = np.array([100.0, 90.0, 250.0, 150.0])
        assert metrics.vde(x, y) == {1}
        assert metrics.gpe(x, y) == {1, 2}
        assert metrics.ffe(x, y) == 0.5

    def test_gpe_voiced_only_variant(self):
        x = np.array([100.0, 0.0, 200.0, 150.0])
        y = np.array([100.0, 90.0, 250.0, 150.0])
        assert metrics.gpe(x, y, voiced_only=True) == {2}

    def test_ffe_all_voicing_errors(self):
        x = np.array([100.0, 150.0, 200.0])
        y = np.zeros(3)
        assert metrics.ffe(x, y) == 1.0

    def test_length_mismatch_rejected(self):
        for fn in (metrics.vde, metrics.gpe, metrics.ffe):
            with pytest.raises(InvalidInputError):
                fn([100.0, 0.0], [100.0])

    @settings(deadline=None, max_examples=60)
    @given(
        st.lists(
            st.tuples(
                st.one_of(st.just(0.0), st.floats(60.0, 400.0)),
                st.one_of(st.just(0.0), st.floats(60.0, 400.0)),
            ),
            min_size=1,
            max_size=24,
        )
    )
    def test_set_membership_matches_per_frame_reevaluation(self, pairs):
        x = np.array([p[0] for p in pairs])
        y = np.array([p[1] for p in pairs])
        vde_set = metrics.vde(x, y)
        gpe_set = metrics.gpe(x, y)
        for t in range(len(pairs)):
            assert (t in vde_set) == ((x[t] == 0) != (y[t] == 0))
            assert (t in gpe_set) == (not (x[t] * 0.8 <= y[t] <= x[t] * 1.2))
        ffe = metrics.ffe(x, y)
        assert 0.0 <= ffe <= 1.0
        assert (ffe == 0.0) == (not vde_set and not gpe_set)


def oracle_levenshtein(a, b):
    """Independent recursive edit distance."""
    from functools import lru_cache

    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def dist(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        return min(
            dist(i + 1, j) + 1,
            dist(i, j + 1) + 1,
            dist(i + 1, j + 1) + (a[i] != b[j]),
        )

    return dist(0, 0)


class TestPer:
    def test_identical_sequences(self):
        assert metrics.per(["a", "b", "c"], ["a", "b", "c"]) == 0.0

    def test_single_substitution(self):
        assert metrics.per(["a", "b"], ["a", "c"]) == 0.5

    def test_insert_plus_substitute(self):
        assert metrics.per(["a", "b", "c", "d"], ["a", "x", "b", "c"]) == 0.5

    def test_empty_hypothesis(self):
        assert metrics.per(["a", "b"], []) == 1.0

    def test_empty_reference_rejected(self):
        with pytest.raises(InvalidInputError):
            metrics.per([], ["a"])

    def test_can_exceed_one(self):
        assert metrics.per(["a"], ["b", "c", "d"]) == 3.0

    @settings(deadline=None, max_examples=60)
    @given(
        st.lists(st.sampled_from("abcd"), min_size=1, max_size=8),
        st.lists(st.sampled_from("abcd"), max_size=8),
    )
    def test_matches_recursive_oracle(self, ref, hyp):
        assert metrics.levenshtein(ref, hyp) == oracle_levenshtein(ref, hyp)

    @settings(deadline=None, max_examples=60)
    @given(
        st.lists(st.sampled_from("abc"), min_size=1, max_size=6),
        st.lists(st.sampled_from("abc"), min_size=1, max_size=6),
        st.lists(st.sampled_from("abc"), min_size=1, max_size=6),
    )
    def test_distance_subadditivity(self, a, b, c):
        assert metrics.levenshtein(a, c) <= (
            metrics.levenshtein(a, b) + metrics.levenshtein(b, c)
        )


class TestCosineSimilarity:
    def test_identical_vectors(self):
        v = np.array([1.0, 2.0, 3.0])
        assert metrics.cosine_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal_unit_vectors(self):
        assert metrics.cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_scale_invariance(self):
        v = np.array([0.3, -0.8, 0.1])
        assert metrics.cosine_similarity(v, 2.0 * v) == pytest.approx(1.0)

    def test_zero_vector_degenerate(self):
        with pytest.raises(DegenerateInputError):
            metrics.cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            metrics.cosine_similarity([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_bounded(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            a = rng.normal(size=8)
            b = rng.normal(size=8)
            assert -1.0 <= metrics.cosine_similarity(a, b) <= 1.0
