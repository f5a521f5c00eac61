"""Temporal weighted directed network model and per-year slices.

A network is a set of country nodes, a contiguous range of years and an
integer weight for each (origin, destination, year) triple.  Weights count
migrating researchers; a missing entry means no flow.  Networks and slices
are immutable once built and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional

import numpy as np


class CountryCode(str):
    """Country token, canonicalized to uppercase at construction.

    Two-letter alphabetic tokens are flagged as ISO 3166-1 alpha-2 style;
    longer tokens are allowed because historical datasets contain states
    that no longer exist.
    """

    __slots__ = ()

    def __new__(cls, token) -> "CountryCode":
        if isinstance(token, CountryCode):
            return token
        text = str(token)
        if not text:
            raise ValueError("country code must be non-empty")
        if any(ch.isspace() for ch in text) or "," in text:
            raise ValueError(f"country code {text!r} contains whitespace or commas")
        return super().__new__(cls, text.upper())

    @property
    def is_iso(self) -> bool:
        return len(self) == 2 and self.isalpha()


@dataclass(frozen=True)
class MigrationEvent:
    """One migration quartet: ``count`` researchers moved origin -> destination in ``year``."""

    origin: CountryCode
    destination: CountryCode
    year: int
    count: int

    def __post_init__(self):
        object.__setattr__(self, "origin", CountryCode(self.origin))
        object.__setattr__(self, "destination", CountryCode(self.destination))
        object.__setattr__(self, "year", int(self.year))
        object.__setattr__(self, "count", int(self.count))
        if self.origin == self.destination:
            raise ValueError(f"self-migration {self.origin}->{self.destination} is not a migration")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class BuildReport:
    """What `build_network` kept, dropped and rejected."""

    retained: int
    dropped_out_of_domain: int
    rejected: tuple[str, ...]


@dataclass(frozen=True)
class TimeSlice:
    """One year's weighted adjacency with cached in/out strengths.

    The node set always equals the parent network's roster; inactive nodes
    carry zero strengths.  Strengths are exact integers recomputable from
    the weight map.
    """

    year: int
    nodes: frozenset[CountryCode]
    weights: Mapping[tuple[CountryCode, CountryCode], int]
    in_strength: Mapping[CountryCode, int]
    out_strength: Mapping[CountryCode, int]

    @classmethod
    def from_weights(
        cls,
        year: int,
        nodes: Iterable[CountryCode],
        weights: Mapping[tuple[CountryCode, CountryCode], int],
    ) -> "TimeSlice":
        node_set = frozenset(CountryCode(n) for n in nodes)
        clean: dict[tuple[CountryCode, CountryCode], int] = {}
        s_in = {n: 0 for n in node_set}
        s_out = {n: 0 for n in node_set}
        for (o, d), w in weights.items():
            o, d = CountryCode(o), CountryCode(d)
            if o == d:
                raise ValueError(f"self-loop {o}->{d} not allowed")
            w = int(w)
            if w < 1:
                raise ValueError(f"weight must be >= 1, got {w} on {o}->{d}")
            if o not in node_set or d not in node_set:
                raise ValueError(f"edge {o}->{d} has endpoint outside the node set")
            clean[(o, d)] = w
            s_out[o] += w
            s_in[d] += w
        return cls(int(year), node_set, clean, s_in, s_out)

    @cached_property
    def node_order(self) -> tuple[CountryCode, ...]:
        return tuple(sorted(self.nodes))

    @cached_property
    def index(self) -> dict[CountryCode, int]:
        return {node: i for i, node in enumerate(self.node_order)}

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense weight matrix in `node_order`, float64, read-only."""
        n = len(self.node_order)
        W = np.zeros((n, n))
        idx = self.index
        for (o, d), w in self.weights.items():
            W[idx[o], idx[d]] = w
        W.setflags(write=False)
        return W

    @cached_property
    def bool_matrix(self) -> np.ndarray:
        A = self.matrix > 0
        A.setflags(write=False)
        return A

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    @cached_property
    def _succ_map(self) -> dict[CountryCode, frozenset[CountryCode]]:
        out: dict[CountryCode, set[CountryCode]] = {n: set() for n in self.nodes}
        for (o, d) in self.weights:
            out[o].add(d)
        return {n: frozenset(v) for n, v in out.items()}

    @cached_property
    def _pred_map(self) -> dict[CountryCode, frozenset[CountryCode]]:
        inc: dict[CountryCode, set[CountryCode]] = {n: set() for n in self.nodes}
        for (o, d) in self.weights:
            inc[d].add(o)
        return {n: frozenset(v) for n, v in inc.items()}

    def successors(self, i: CountryCode) -> frozenset[CountryCode]:
        return self._succ_map[CountryCode(i)]

    def predecessors(self, i: CountryCode) -> frozenset[CountryCode]:
        return self._pred_map[CountryCode(i)]

    def neighbors(self, i: CountryCode) -> frozenset[CountryCode]:
        return self.successors(i) | self.predecessors(i)

    def restricted_to(self, subset: Iterable[CountryCode]) -> "TimeSlice":
        """Sub-slice induced by `subset`: only edges with both endpoints inside."""
        keep = frozenset(CountryCode(n) for n in subset)
        if not keep <= self.nodes:
            extra = sorted(keep - self.nodes)
            raise ValueError(f"nodes not in slice: {', '.join(extra)}")
        weights = {
            (o, d): w for (o, d), w in self.weights.items() if o in keep and d in keep
        }
        return TimeSlice.from_weights(self.year, keep, weights)


@dataclass(frozen=True)
class TemporalNetwork:
    """Immutable container for the full yearly edge-weight function."""

    nodes: frozenset[CountryCode]
    time_domain: range
    weights: Mapping[tuple[CountryCode, CountryCode, int], int]

    @cached_property
    def _by_year(self) -> dict[int, dict[tuple[CountryCode, CountryCode], int]]:
        per_year: dict[int, dict[tuple[CountryCode, CountryCode], int]] = {
            t: {} for t in self.time_domain
        }
        for (o, d, t), w in self.weights.items():
            per_year[t][(o, d)] = w
        return per_year

    def slice(self, t: int) -> TimeSlice:
        if t not in self.time_domain:
            raise ValueError(
                f"year {t} outside time domain "
                f"[{self.time_domain.start}..{self.time_domain.stop - 1}]"
            )
        return TimeSlice.from_weights(t, self.nodes, self._by_year[t])

    def slices(self) -> list[TimeSlice]:
        return [self.slice(t) for t in self.time_domain]


def build_network(
    events: Iterable,
    time_domain,
    roster: Optional[Iterable[CountryCode]] = None,
) -> tuple[TemporalNetwork, BuildReport]:
    """Aggregate migration events into a temporal network.

    ``time_domain`` is an inclusive ``(first_year, last_year)`` pair or a
    range.  Events outside the domain are dropped and counted; raw tuples
    that violate the event invariants (self-loop, nonpositive count) are
    collected as rejection messages rather than aborting the build.
    Duplicate (origin, destination, year) quartets sum their counts.
    """
    if isinstance(time_domain, range):
        years = time_domain
    else:
        first, last = time_domain
        years = range(int(first), int(last) + 1)
    if len(years) == 0:
        raise ValueError("time domain must be non-empty")

    agg: dict[tuple[CountryCode, CountryCode, int], int] = {}
    endpoints: set[CountryCode] = set()
    dropped = 0
    rejected: list[str] = []
    for pos, ev in enumerate(events):
        if not isinstance(ev, MigrationEvent):
            try:
                ev = MigrationEvent(*ev)
            except (ValueError, TypeError) as exc:
                rejected.append(f"record {pos}: {exc}")
                continue
        if ev.year not in years:
            dropped += 1
            continue
        key = (ev.origin, ev.destination, ev.year)
        agg[key] = agg.get(key, 0) + ev.count
        endpoints.add(ev.origin)
        endpoints.add(ev.destination)

    nodes = frozenset(endpoints)
    if roster is not None:
        nodes = nodes | frozenset(CountryCode(n) for n in roster)
    net = TemporalNetwork(nodes, years, agg)
    report = BuildReport(len(agg), dropped, tuple(rejected))
    return net, report


def active_nodes(s: TimeSlice) -> frozenset[CountryCode]:
    """Nodes with positive in-strength or out-strength."""
    return frozenset(
        n for n in s.nodes if s.in_strength[n] > 0 or s.out_strength[n] > 0
    )


def edge_count(s: TimeSlice) -> int:
    return len(s.weights)


def strongly_connected_components(s: TimeSlice) -> list[frozenset[CountryCode]]:
    """SCCs of the directed edge structure restricted to active nodes.

    Weights are ignored.  Active nodes without any cycle still form
    singleton components; inactive roster nodes are left out entirely.
    """
    order = [n for n in s.node_order if s.in_strength[n] > 0 or s.out_strength[n] > 0]
    if not order:
        return []
    idx = {n: i for i, n in enumerate(order)}
    succ: list[list[int]] = [[] for _ in order]
    for (o, d) in sorted(s.weights):
        succ[idx[o]].append(idx[d])

    # Tarjan, iterative to survive deep recursion on long paths
    n = len(order)
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[frozenset[CountryCode]] = []
    counter = 0
    for root in range(n):
        if index_of[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work.pop()
            if ei == 0:
                index_of[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recursed = False
            for k in range(ei, len(succ[v])):
                w = succ[v][k]
                if index_of[w] == -1:
                    work.append((v, k + 1))
                    work.append((w, 0))
                    recursed = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index_of[w])
            if recursed:
                continue
            if low[v] == index_of[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    members.append(order[w])
                    if w == v:
                        break
                components.append(frozenset(members))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


def largest_scc(s: TimeSlice) -> frozenset[CountryCode]:
    """Largest SCC among active nodes; size ties resolve to the component
    holding the alphabetically smallest member."""
    components = strongly_connected_components(s)
    if not components:
        return frozenset()
    components.sort(key=lambda comp: (-len(comp), min(comp)))
    return components[0]


def largest_scc_size(s: TimeSlice) -> int:
    return len(largest_scc(s))


def threshold(s: TimeSlice, tr: int) -> tuple[TimeSlice, float]:
    """Drop edges with weight below ``tr``; report the retained edge fraction."""
    tr = int(tr)
    if tr < 1:
        raise ValueError(f"threshold must be >= 1, got {tr}")
    before = len(s.weights)
    kept = {edge: w for edge, w in s.weights.items() if w >= tr}
    fraction = 1.0 if before == 0 else len(kept) / before
    return TimeSlice.from_weights(s.year, s.nodes, kept), fraction
