import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from src.core.exact_enumeration import (
    BarrierMeasures,
    barrier_from_profile,
    barrier_measures,
    brute_force_counts,
    brute_force_profile,
    conductance_from_barrier,
    conductance_lower_bound,
    detailed_balance_residual,
    exact_spectral_gap,
    glauber_kernel,
    independent_set_count,
    independent_sets,
    occupancy_counts,
    occupancy_profile,
    partition_function,
    subset_histogram,
)
from src.core.graph_generator import sample_graph, sample_graphs
from src.utils.exceptions import SizeCapExceededError


class TestSubsetHistogram:
    def test_complete_bipartite(self, k33):
        hist = subset_histogram(k33)
        assert hist[0, 3] == 1
        assert [hist[a, 0] for a in range(1, 4)] == [3, 3, 1]
        assert hist.sum() == 8

    def test_gray_walk_matches_direct_table(self, small_graph, monkeypatch):
        direct = subset_histogram(small_graph)
        monkeypatch.setattr("src.core.exact_enumeration.LOW_BLOCK_SIZE", 3)
        monkeypatch.setattr("src.core.exact_enumeration.GRAY_CHUNK_BITS", 2)
        assert np.array_equal(subset_histogram(small_graph), direct)
        assert np.array_equal(subset_histogram(small_graph, threads=3), direct)

    def test_gray_walk_without_low_block(self, small_graph, monkeypatch):
        direct = subset_histogram(small_graph)
        monkeypatch.setattr("src.core.exact_enumeration.LOW_BLOCK_SIZE", 0)
        monkeypatch.setattr("src.core.exact_enumeration.GRAY_CHUNK_BITS", 3)
        assert np.array_equal(subset_histogram(small_graph), direct)

    def test_size_cap(self):
        with pytest.raises(SizeCapExceededError):
            subset_histogram(sample_graph(27, 3, seed=1))


class TestPartitionFunction:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 6.0])
    def test_complete_bipartite(self, k33, lam):
        assert partition_function(k33, lam) == pytest.approx(math.log(2 * (1 + lam) ** 3 - 1), rel=1e-12)

    def test_perfect_matching(self):
        g = sample_graph(7, 1, seed=4)
        assert partition_function(g, 2.0) == pytest.approx(7 * math.log(5.0), rel=1e-12)

    def test_triple_edge(self, triple_edge):
        assert partition_function(triple_edge, 1.0) == pytest.approx(math.log(3.0))

    def test_rejects_non_positive_activity(self, k33):
        with pytest.raises(ValueError):
            partition_function(k33, 0.0)

    def test_agrees_with_profile(self, small_graph):
        profile = occupancy_profile(small_graph, 1.7)
        assert profile.log_partition == pytest.approx(partition_function(small_graph, 1.7), rel=1e-12)


class TestOccupancyProfile:
    def test_counts_match_brute_force(self, small_graph):
        assert occupancy_counts(subset_histogram(small_graph)) == brute_force_counts(small_graph)

    def test_complete_bipartite_counts(self, k33):
        counts = occupancy_profile(k33, 1.0).counts
        assert counts[0] == (1, 3, 3, 1)
        assert [row[0] for row in counts] == [1, 3, 3, 1]
        assert counts[1][1] == 0

    def test_zero_counts_are_minus_infinity(self, k33):
        profile = occupancy_profile(k33, 2.0)
        assert profile.log_weights[1, 1] == -math.inf
        assert profile.log_weights[2, 0] == pytest.approx(math.log(3) + 2 * math.log(2))

    def test_probabilities_sum_to_one(self, small_graph):
        assert occupancy_profile(small_graph, 3.0).probabilities().sum() == pytest.approx(1.0)

    def test_rows(self, k33):
        rows = occupancy_profile(k33, 1.0).as_rows()
        assert len(rows) == 4
        assert list(rows[0]) == ["a", "b0", "b1", "b2", "b3"]

    @pytest.mark.parametrize("lam", [0.5, 1.0, 4.0])
    def test_matches_double_sided_brute_force(self, lam):
        for index in range(20):
            g = sample_graph(2 + index % 4, 3, seed=21, index=index)
            profile = occupancy_profile(g, lam)
            oracle = brute_force_profile(g, lam)
            assert profile.counts == oracle.counts
            np.testing.assert_array_equal(profile.log_weights, oracle.log_weights)
            measures = barrier_from_profile(profile, 0)
            assert measures.mu_I1 + measures.mu_I2 + measures.mu_IB == pytest.approx(1.0, abs=1e-12)

    def test_brute_force_cap(self):
        with pytest.raises(SizeCapExceededError):
            brute_force_counts(sample_graph(9, 3, seed=1))


class TestBarrier:
    def test_triple_edge_is_inapplicable(self, triple_edge):
        measures = barrier_measures(triple_edge, 1.0, 0)
        assert measures.mu_I1 == pytest.approx(1 / 3)
        assert measures.mu_I2 == pytest.approx(1 / 3)
        assert measures.mu_IB == pytest.approx(1 / 3)
        assert measures.bottleneck_ratio == pytest.approx(1.0)

        bound = conductance_from_barrier(measures)
        assert not bound.applicable
        assert bound.mu_A == pytest.approx(2 / 3)
        assert math.isnan(bound.bound)

    def test_lower_bound_on_graph(self, k33):
        bound = conductance_lower_bound(k33, 6.0, 0)
        measures = barrier_measures(k33, 6.0, 0)
        assert bound.mu_B == pytest.approx(measures.mu_IB)
        assert bound.applicable == (bound.mu_A <= 0.5)

    def test_applicable_bound_uses_smaller_lobe(self):
        bound = conductance_from_barrier(BarrierMeasures(tau_n=0, mu_I1=0.3, mu_I2=0.6, mu_IB=0.1))
        assert bound.applicable
        assert bound.lobe == "I1"
        assert bound.bound == pytest.approx(0.5)

    def test_measures_partition_the_mass(self, small_graph):
        profile = occupancy_profile(small_graph, 6.0)
        for t in range(3):
            measures = barrier_from_profile(profile, t)
            assert measures.mu_I1 + measures.mu_I2 + measures.mu_IB == pytest.approx(1.0)

    def test_symmetric_graph_has_symmetric_lobes(self, k33):
        measures = barrier_measures(k33, 6.0, 1)
        assert measures.mu_I1 == pytest.approx(measures.mu_I2)

    def test_tilted_lobes_agree_in_distribution(self):
        lobes = [barrier_from_profile(occupancy_profile(g, 2.0), 0) for g in sample_graphs(8, 3, seed=17, count=500)]
        v1 = [m.mu_I1 for m in lobes]
        v2 = [m.mu_I2 for m in lobes]
        assert v1 != v2
        assert ks_2samp(v1, v2).pvalue > 0.01

    def test_negative_threshold(self, k33):
        with pytest.raises(ValueError):
            barrier_from_profile(occupancy_profile(k33, 1.0), -1)


class TestGlauberKernel:
    def test_states(self, k33):
        kernel = glauber_kernel(k33, 1.0)
        assert len(kernel.states) == 15
        assert kernel.states == sorted(kernel.states)
        assert set(kernel.states) == set(independent_sets(k33))

    def test_rows_are_stochastic(self, small_graph):
        kernel = glauber_kernel(small_graph, 2.5)
        assert np.allclose(np.asarray(kernel.transition.sum(axis=1)).ravel(), 1.0)
        assert kernel.stationary.sum() == pytest.approx(1.0)

    def test_detailed_balance(self, small_graph):
        assert detailed_balance_residual(glauber_kernel(small_graph, 2.5)) <= 1e-12

    def test_stationary_is_hardcore_measure(self, k33):
        kernel = glauber_kernel(k33, 2.0)
        assert kernel.stationary[kernel.states.index((0, 0))] == pytest.approx(1 / (2 * 27 - 1))
        assert kernel.stationary[kernel.states.index((0b111, 0))] == pytest.approx(8 / 53)


class TestSpectralGap:
    def test_triple_edge(self, triple_edge):
        gap = exact_spectral_gap(triple_edge, 1.0)
        assert gap.n_states == 3
        assert gap.gap == pytest.approx(0.25)
        assert gap.second_eigenvalue == pytest.approx(0.75)
        assert gap.smallest_eigenvalue == pytest.approx(0.25)

    def test_lanczos_agrees_with_dense(self, small_graph, monkeypatch):
        dense = exact_spectral_gap(small_graph, 2.0)
        monkeypatch.setattr("src.core.exact_enumeration.DENSE_GAP_STATES", 5)
        sparse = exact_spectral_gap(small_graph, 2.0)
        assert sparse.gap == pytest.approx(dense.gap, rel=1e-6)

    def test_gap_shrinks_with_activity(self, small_graph):
        assert exact_spectral_gap(small_graph, 8.0).gap < exact_spectral_gap(small_graph, 0.5).gap

    def test_state_cap(self, small_graph, monkeypatch):
        monkeypatch.setattr("src.core.exact_enumeration.MAX_GAP_STATES", 10)
        with pytest.raises(SizeCapExceededError):
            glauber_kernel(small_graph, 1.0)


class TestIndependentSetCount:
    def test_complete_bipartite(self, k33):
        assert independent_set_count(k33, 1, 0) == 3
        assert independent_set_count(k33, 0, 2) == 3
        assert independent_set_count(k33, 1, 1) == 0

    def test_matches_brute_force(self, small_graph):
        counts = brute_force_counts(small_graph)
        assert independent_set_count(small_graph, 2, 1) == counts[2][1]

    def test_range(self, k33):
        with pytest.raises(ValueError):
            independent_set_count(k33, 4, 0)
