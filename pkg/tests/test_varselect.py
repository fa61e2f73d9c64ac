import math

import numpy as np
import pytest

import modehunt.varselect as vs
from modehunt.varselect import (
    IseTestOutcome,
    RelevanceCounter,
    ise_statistic,
    ise_test,
    select_variables,
    write_counter_csv,
)

from helpers import tensor_ise_2d, trapezoid_ise_1d


def shifted_pair(rng, n=120, d=1, shift=0.0):
    a = rng.normal(size=(n, d))
    b = rng.normal(size=(n, d))
    b[:, 0] += shift
    return a, b


class TestStatisticOracle:
    def test_matches_1d_quadrature(self, any_backend):
        rng = np.random.default_rng(50)
        for _ in range(10):
            n1, n2 = rng.integers(5, 40, 2)
            a = rng.normal(0.0, 1.0, (int(n1), 1))
            b = rng.normal(rng.uniform(-1, 1), 1.2, (int(n2), 1))
            h = float(rng.uniform(0.3, 1.0))
            expected = trapezoid_ise_1d(a, b, h)
            assert ise_statistic(a, b, h) == pytest.approx(expected, rel=1e-6)

    def test_matches_2d_tensor_quadrature(self, any_backend):
        rng = np.random.default_rng(51)
        for _ in range(3):
            a = rng.normal(0.0, 1.0, (20, 2))
            b = rng.normal(0.5, 1.0, (25, 2))
            h = 0.6
            expected = tensor_ise_2d(a, b, h)
            assert ise_statistic(a, b, h) == pytest.approx(expected, rel=1e-6)

    def test_identical_samples_give_zero(self, any_backend):
        rng = np.random.default_rng(52)
        a = rng.normal(size=(50, 3))
        assert ise_statistic(a, a.copy(), 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_two_point_masses_closed_form(self):
        h, delta = 0.7, 1.3
        s = h * math.sqrt(2.0)
        phi = lambda u: math.exp(-0.5 * (u / s) ** 2) / (math.sqrt(2 * math.pi) * s)
        expected = 2.0 * (phi(0.0) - phi(delta))
        got = ise_statistic(np.array([[0.0]]), np.array([[delta]]), h)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_symmetry_in_arguments(self):
        rng = np.random.default_rng(53)
        a, b = shifted_pair(rng, n=40, shift=0.8)
        assert ise_statistic(a, b, 0.5) == pytest.approx(ise_statistic(b, a, 0.5), rel=1e-14)

    def test_translation_invariance(self):
        rng = np.random.default_rng(54)
        a, b = shifted_pair(rng, n=40, d=2, shift=0.5)
        base = ise_statistic(a, b, 0.5)
        assert ise_statistic(a + 7.0, b + 7.0, 0.5) == pytest.approx(base, rel=1e-10)

    def test_grows_with_separation(self):
        rng = np.random.default_rng(55)
        a = rng.normal(size=(100, 1))
        b = rng.normal(size=(100, 1))
        values = [ise_statistic(a, b + sh, 0.5) for sh in (0.0, 1.0, 2.0, 4.0)]
        assert all(x < y for x, y in zip(values, values[1:]))

    def test_validation(self):
        a = np.zeros((5, 2))
        with pytest.raises(ValueError, match="dimension mismatch"):
            ise_statistic(a, np.zeros((5, 3)), 0.5)
        with pytest.raises(ValueError, match="bandwidth"):
            ise_statistic(a, a, -1.0)

    def test_accepts_datasets(self):
        from modehunt.dataset import Dataset

        a = Dataset(np.zeros((3, 1)) + [[0.0], [1.0], [2.0]], ("x",))
        b = Dataset(np.ones((3, 1)), ("x",))
        assert ise_statistic(a, b, 0.5) >= 0.0


class TestPermutationTest:
    def test_p_value_bounds(self):
        rng = np.random.default_rng(56)
        a, b = shifted_pair(rng, n=60, shift=0.3)
        out = ise_test(a, b, 0.5, n_perm=99, seed=1)
        assert 1.0 / 100 <= out.p_value <= 1.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(57)
        a, b = shifted_pair(rng, n=50, shift=0.5)
        r1 = ise_test(a, b, 0.5, n_perm=149, seed=9)
        r2 = ise_test(a, b, 0.5, n_perm=149, seed=9)
        assert (r1.statistic, r1.p_value) == (r2.statistic, r2.p_value)

    def test_strong_shift_hits_minimum_p(self, any_backend):
        rng = np.random.default_rng(58)
        a, b = shifted_pair(rng, n=100, shift=3.0)
        out = ise_test(a, b, 0.5, n_perm=199, seed=2)
        assert out.p_value == pytest.approx(1.0 / 200)

    def test_null_p_values_not_degenerate(self):
        rng = np.random.default_rng(59)
        ps = []
        for i in range(40):
            a = rng.normal(size=(60, 1))
            b = rng.normal(size=(60, 1))
            ps.append(ise_test(a, b, 0.5, n_perm=99, seed=i).p_value)
        assert 0.25 < np.mean(ps) < 0.75

    def test_streaming_path_matches_dense(self, monkeypatch):
        rng = np.random.default_rng(60)
        a, b = shifted_pair(rng, n=80, shift=1.0)
        dense = ise_test(a, b, 0.5, n_perm=99, seed=3)
        monkeypatch.setattr(vs, "_DENSE_LIMIT", 16)
        streamed = ise_test(a, b, 0.5, n_perm=99, seed=3)
        assert streamed.statistic == pytest.approx(dense.statistic, rel=1e-10)
        assert streamed.p_value == dense.p_value

    def test_too_few_permutations_rejected(self):
        with pytest.raises(ValueError, match="at least 99"):
            ise_test(np.zeros((5, 1)), np.ones((5, 1)), 0.5, n_perm=10)

    def test_outcome_validation(self):
        with pytest.raises(ValueError, match="p_value"):
            IseTestOutcome(0.1, 1.5, 99)
        with pytest.raises(ValueError, match="nonnegative"):
            IseTestOutcome(-0.1, 0.5, 99)


class TestSelectVariables:
    def test_recovers_planted_pair(self, any_backend):
        rng = np.random.default_rng(61)
        d, n = 6, 150
        a = rng.normal(size=(n, d))
        b = rng.normal(size=(n, d))
        b[:, 0] += 3.0
        b[:, 1] += 3.0
        counter, selected = select_variables(a, b, m_iter=200, k=2, seed=7)
        assert selected == [0, 1]
        assert counter.counts[[0, 1]].min() > counter.counts[2:].max()

    def test_null_data_selects_nothing(self):
        rng = np.random.default_rng(62)
        a = rng.normal(size=(100, 5))
        b = rng.normal(size=(100, 5))
        counter, selected = select_variables(a, b, m_iter=120, k=2, seed=8)
        assert selected == []
        assert counter.counts.max() <= 120

    def test_counts_bounded_by_subset_draws(self):
        rng = np.random.default_rng(63)
        a = rng.normal(size=(80, 4))
        b = rng.normal(size=(80, 4)) + 3.0
        counter, _ = select_variables(a, b, m_iter=60, k=2, seed=9)
        # every iteration rejects here, so total increments = k per iteration
        assert counter.counts.sum() == 60 * 2

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(64)
        a = rng.normal(size=(60, 4))
        b = rng.normal(size=(60, 4))
        b[:, 2] += 3.0
        c1, s1 = select_variables(a, b, m_iter=50, k=2, seed=11)
        c2, s2 = select_variables(a, b, m_iter=50, k=2, seed=11)
        assert s1 == s2
        np.testing.assert_array_equal(c1.counts, c2.counts)

    def test_subset_size_bounds(self):
        a = np.zeros((20, 3))
        with pytest.raises(ValueError, match="subset size"):
            select_variables(a, a, m_iter=10, k=3)
        with pytest.raises(ValueError, match="subset size"):
            select_variables(a, a, m_iter=10, k=0)

    def test_counter_validation(self):
        with pytest.raises(ValueError, match="bounded"):
            RelevanceCounter(np.array([5, 1]), 4, 2, 0.01)

    def test_counter_csv(self, tmp_path):
        counter = RelevanceCounter(np.array([3, 0, 7]), 10, 2, 0.01)
        out = tmp_path / "counts.csv"
        write_counter_csv(counter, ["v1", "v2", "v3"], out)
        lines = out.read_text().strip().splitlines()
        assert lines == ["variable,count", "v1,3", "v2,0", "v3,7"]
        with pytest.raises(ValueError, match="name per"):
            write_counter_csv(counter, ["v1"], out)
