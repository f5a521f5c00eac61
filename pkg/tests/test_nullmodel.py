import numpy as np
import pytest

from flownet import configuration_model, ensemble, ensemble_statistic, network_reciprocity

from conftest import make_slice, random_digraph
from oracles import matching_edge_probabilities


def assert_strengths_preserved(base, realization):
    assert realization.in_strength == base.in_strength
    assert realization.out_strength == base.out_strength
    assert all(o != d for (o, d) in realization.weights)


class TestConfigurationModel:
    def test_single_edge_forced(self):
        s = make_slice({("A", "B"): 1})
        for seed in range(5):
            assert configuration_model(s, seed).weights == {("A", "B"): 1}

    def test_three_cycle_preserves_unit_strengths(self):
        s = make_slice({("A", "B"): 1, ("B", "C"): 1, ("C", "A"): 1})
        for seed in range(20):
            assert_strengths_preserved(s, configuration_model(s, seed))

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            configuration_model(make_slice({}, nodes={"A"}), 1)

    def test_same_seed_same_realization(self):
        s = make_slice({("A", "B"): 2, ("C", "B"): 2, ("A", "D"): 1, ("C", "D"): 1})
        assert configuration_model(s, 99) == configuration_model(s, 99)

    def test_random_slices_strength_exact(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            names, weights = random_digraph(rng, max_nodes=7, max_weight=5)
            s = make_slice(weights, nodes=names)
            for seed in range(10):
                assert_strengths_preserved(s, configuration_model(s, seed))

    def test_total_weight_conserved_but_edges_may_differ(self):
        s = make_slice({("A", "B"): 3, ("B", "C"): 2, ("C", "A"): 1, ("A", "C"): 2})
        seen_edge_counts = set()
        for seed in range(40):
            r = configuration_model(s, seed)
            assert r.total_weight == s.total_weight
            seen_edge_counts.add(len(r.weights))
        # the rewiring is allowed to change the edge count; with 40 draws of
        # this slice it actually does
        assert len(seen_edge_counts) > 1

    def test_matching_frequencies_against_enumeration(self):
        s = make_slice({("A", "B"): 2, ("C", "B"): 2, ("A", "D"): 1, ("C", "D"): 1})
        out_stubs = []
        in_stubs = []
        for node in s.node_order:
            out_stubs.extend([node] * s.out_strength[node])
            in_stubs.extend([node] * s.in_strength[node])
        exact, valid = matching_edge_probabilities(tuple(out_stubs), tuple(in_stubs))
        assert valid == 720  # no self-loop is possible for this instance

        trials = 2000
        counts = {edge: 0 for edge in exact}
        for seed in range(trials):
            r = configuration_model(s, seed)
            for edge in r.weights:
                counts[edge] += 1
        for edge, p in exact.items():
            se = (p * (1 - p) / trials) ** 0.5 or 1.0 / trials
            assert abs(counts[edge] / trials - p) <= 3 * se


class TestEnsemble:
    def test_forced_ensemble_identical(self):
        s = make_slice({("A", "B"): 1})
        e = ensemble(s, n=3, base_seed=7)
        assert len(e.realizations) == 3
        assert all(r.weights == {("A", "B"): 1} for r in e.realizations)

    def test_reproducible_from_base_seed(self):
        s = make_slice({("A", "B"): 2, ("B", "C"): 2, ("C", "A"): 1, ("A", "C"): 1})
        assert ensemble(s, 5, 123) == ensemble(s, 5, 123)
        assert ensemble(s, 5, 123) != ensemble(s, 5, 124)

    def test_ten_realizations_strength_exact(self):
        s = make_slice({("A", "B"): 4, ("B", "C"): 3, ("C", "A"): 2, ("C", "B"): 1})
        e = ensemble(s, 10, 5)
        assert e.size == 10
        for r in e.realizations:
            assert_strengths_preserved(s, r)

    def test_composite_base_seed(self):
        s = make_slice({("A", "B"): 2, ("B", "A"): 2})
        e = ensemble(s, 2, base_seed=(9, 2014))
        assert e.seeds == ((9, 2014, 0), (9, 2014, 1))

    def test_size_validated(self):
        with pytest.raises(ValueError):
            ensemble(make_slice({("A", "B"): 1}), 0, 1)


class TestEnsembleStatistic:
    def test_constant_metric(self):
        e = ensemble(make_slice({("A", "B"): 1}), 4, 11)
        mean, ci = ensemble_statistic(e, lambda r: 0.5)
        assert mean == 0.5
        assert ci == 0.0

    def test_two_values_hand_checked(self):
        e = ensemble(make_slice({("A", "B"): 1}), 2, 11)
        values = iter([0.8, 1.0])
        mean, ci = ensemble_statistic(e, lambda r: next(values))
        assert mean == pytest.approx(0.9)
        assert ci == pytest.approx(1.96 * np.std([0.8, 1.0], ddof=1) / np.sqrt(2))

    def test_single_realization_no_ci(self):
        e = ensemble(make_slice({("A", "B"): 1}), 1, 11)
        mean, ci = ensemble_statistic(e, network_reciprocity)
        assert mean == 0.0
        assert ci is None

    def test_vector_metric(self):
        e = ensemble(make_slice({("A", "B"): 1}), 3, 11)
        mean, ci = ensemble_statistic(e, lambda r: np.array([1.0, 2.0]))
        assert np.allclose(mean, [1.0, 2.0])
        assert np.allclose(ci, [0.0, 0.0])
