import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flownet import (
    CountryCode,
    MigrationEvent,
    active_nodes,
    build_network,
    edge_count,
    largest_scc_size,
    threshold,
)
from flownet.network import TimeSlice

from conftest import make_slice
from oracles import scc_sizes_by_closure


class TestCountryCode:
    def test_uppercases(self):
        assert CountryCode("gb") == "GB"

    def test_iso_flag(self):
        assert CountryCode("us").is_iso
        assert not CountryCode("CSK1").is_iso
        assert not CountryCode("X1").is_iso

    @pytest.mark.parametrize("bad", ["", "U S", "A,B", "A\tB"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            CountryCode(bad)


class TestMigrationEvent:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            MigrationEvent("US", "us", 2014, 1)

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ValueError):
            MigrationEvent("US", "GB", 2014, 0)


class TestBuildNetwork:
    def test_aggregates_duplicate_quartets(self):
        events = [MigrationEvent("A", "B", 2014, 2), MigrationEvent("A", "B", 2014, 3)]
        net, report = build_network(events, (2000, 2016))
        assert net.weights[("A", "B", 2014)] == 5
        assert report.retained == 1

    def test_empty_events(self):
        net, report = build_network([], (2000, 2016))
        assert len(net.time_domain) == 17
        assert net.nodes == frozenset()
        assert report.retained == 0

    def test_drops_years_outside_domain(self):
        events = [
            MigrationEvent("A", "B", year, 1) for year in range(1950, 2021)
        ]
        net, report = build_network(events, (2000, 2016))
        assert sorted({t for (_, _, t) in net.weights}) == list(range(2000, 2017))
        assert report.dropped_out_of_domain == (2021 - 1950) - 17

    def test_collects_record_errors_from_raw_tuples(self):
        raw = [("A", "B", 2014, 2), ("C", "C", 2014, 1), ("A", "B", 2014, 0)]
        net, report = build_network(raw, (2000, 2016))
        assert net.weights[("A", "B", 2014)] == 2
        assert len(report.rejected) == 2

    def test_roster_extends_nodes(self):
        net, _ = build_network([MigrationEvent("A", "B", 2014, 1)], (2014, 2014), roster=["C"])
        assert net.nodes == frozenset({"A", "B", "C"})

    @given(st.permutations(list(range(8))))
    @settings(max_examples=25, deadline=None)
    def test_order_insensitive(self, order):
        base = [
            ("A", "B", 2014, 2),
            ("A", "B", 2014, 3),
            ("B", "C", 2015, 1),
            ("C", "A", 2014, 4),
            ("A", "C", 2013, 2),
            ("B", "A", 2016, 1),
            ("C", "B", 2015, 2),
            ("A", "B", 2015, 1),
        ]
        events = [MigrationEvent(*base[i]) for i in order]
        net, _ = build_network(events, (2013, 2016))
        reference, _ = build_network([MigrationEvent(*row) for row in base], (2013, 2016))
        assert net == reference


class TestSlice:
    def test_slice_strengths(self):
        net, _ = build_network([MigrationEvent("A", "B", 2014, 5)], (2010, 2016))
        s = net.slice(2014)
        assert s.weights == {("A", "B"): 5}
        assert s.out_strength["A"] == 5
        assert s.in_strength["B"] == 5

    def test_empty_year(self):
        net, _ = build_network([MigrationEvent("A", "B", 2014, 5)], (2010, 2016))
        s = net.slice(2013)
        assert s.weights == {}
        assert all(v == 0 for v in s.in_strength.values())
        assert s.nodes == net.nodes

    def test_outside_domain_raises(self):
        net, _ = build_network([], (2010, 2016))
        with pytest.raises(ValueError):
            net.slice(2009)

    def test_strength_consistency_and_conservation(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            weights = {}
            names = [f"N{i}" for i in range(6)]
            for i in range(6):
                for j in range(6):
                    if i != j and rng.random() < 0.4:
                        weights[(names[i], names[j])] = int(rng.integers(1, 9))
            s = make_slice(weights, nodes=names)
            s_in = {n: 0 for n in names}
            s_out = {n: 0 for n in names}
            for (o, d), w in weights.items():
                s_out[o] += w
                s_in[d] += w
            assert {k: v for k, v in s.in_strength.items()} == {
                CountryCode(k): v for k, v in s_in.items()
            }
            assert sum(s.in_strength.values()) == sum(s.out_strength.values()) == sum(
                weights.values()
            )


class TestActiveNodes:
    def test_examples(self):
        s = make_slice({("A", "B"): 5}, nodes={"A", "B", "C"})
        assert active_nodes(s) == {"A", "B"}
        assert active_nodes(make_slice({}, nodes={"A", "B"})) == frozenset()
        assert active_nodes(make_slice({("A", "B"): 1, ("B", "A"): 1})) == {"A", "B"}


class TestLargestScc:
    def test_two_cycle(self):
        assert largest_scc_size(make_slice({("A", "B"): 1, ("B", "A"): 1})) == 2

    def test_three_cycle(self):
        s = make_slice({("A", "B"): 1, ("B", "C"): 1, ("C", "A"): 1})
        assert largest_scc_size(s) == 3

    def test_path_gives_singletons(self):
        s = make_slice({("A", "B"): 1, ("B", "C"): 1})
        assert largest_scc_size(s) == 1

    def test_edgeless_slice(self):
        assert largest_scc_size(make_slice({}, nodes={"A", "B"})) == 0

    def test_against_closure_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(120):
            n = int(rng.integers(1, 7))
            names = [f"N{i}" for i in range(n)]
            edges = {}
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < 0.35:
                        edges[(names[i], names[j])] = 1
            s = make_slice(edges, nodes=names)
            expected = max(scc_sizes_by_closure(names, edges), default=0)
            assert largest_scc_size(s) == expected


class TestEdgeCount:
    def test_examples(self):
        assert edge_count(make_slice({("A", "B"): 5, ("B", "A"): 1})) == 2
        assert edge_count(make_slice({}, nodes={"A"})) == 0
        assert edge_count(make_slice({("A", "B"): 5, ("A", "C"): 5, ("C", "A"): 1})) == 3


class TestThreshold:
    def test_identity_at_one(self):
        s = make_slice({("A", "B"): 1, ("B", "C"): 2, ("C", "A"): 3})
        lifted, fraction = threshold(s, 1)
        assert lifted == s
        assert fraction == 1.0

    def test_drops_light_edges(self):
        s = make_slice({("A", "B"): 1, ("B", "C"): 2, ("C", "A"): 3})
        lifted, fraction = threshold(s, 2)
        assert lifted.weights == {("B", "C"): 2, ("C", "A"): 3}
        assert fraction == pytest.approx(2 / 3)
        assert lifted.nodes == s.nodes

    def test_edgeless_fraction_is_one(self):
        _, fraction = threshold(make_slice({}, nodes={"A"}), 3)
        assert fraction == 1.0

    def test_monotone_edge_sets(self):
        rng = np.random.default_rng(3)
        weights = {
            (f"N{i}", f"N{j}"): int(rng.integers(1, 6))
            for i in range(5)
            for j in range(5)
            if i != j and rng.random() < 0.5
        }
        s = make_slice(weights)
        previous = set(s.weights)
        for tr in range(1, 8):
            lifted, _ = threshold(s, tr)
            assert set(lifted.weights) <= previous
            previous = set(lifted.weights)

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            threshold(make_slice({("A", "B"): 1}), 0)


class TestTimeSliceValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            TimeSlice.from_weights(2014, {"A"}, {("A", "A"): 1})

    def test_rejects_foreign_endpoint(self):
        with pytest.raises(ValueError):
            TimeSlice.from_weights(2014, {"A"}, {("A", "B"): 1})

    def test_restricted_to(self):
        s = make_slice({("A", "B"): 2, ("B", "C"): 3, ("C", "A"): 4})
        sub = s.restricted_to({"A", "B"})
        assert sub.weights == {("A", "B"): 2}
        assert sub.nodes == {"A", "B"}
