"""Per-node and per-slice scalar metrics.

Metrics that are mathematically undefined for a node (zero-strength drain
index, clustering with fewer than two neighbors, reciprocity of an isolated
node) carry ``nan`` as an explicit undefined marker.  Downstream ranking and
export code treats ``nan`` as "no data", never as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import CountryCode, TimeSlice

UNDEFINED = float("nan")


def is_defined(value: float) -> bool:
    return not math.isnan(value)


@dataclass(frozen=True)
class ScoreVector:
    """Named, year-stamped node scores; ``nan`` marks undefined entries."""

    name: str
    year: int
    scores: dict[CountryCode, float]

    def defined(self) -> dict[CountryCode, float]:
        return {n: v for n, v in self.scores.items() if is_defined(v)}

    def undefined_nodes(self) -> tuple[CountryCode, ...]:
        return tuple(sorted(n for n, v in self.scores.items() if not is_defined(v)))

    def __getitem__(self, node) -> float:
        return self.scores[CountryCode(node)]


@dataclass(frozen=True)
class LorenzCurve:
    """Cumulative (population share, weight share) points plus the Gini value.

    Points start at (0, 0), end at (1, 1) and never rise above the diagonal.
    """

    points: tuple[tuple[float, float], ...]
    gini: float


def drain_index(s: TimeSlice, i: CountryCode) -> float:
    """Normalized out-minus-in strength: +1 pure provider, -1 pure attractor."""
    i = CountryCode(i)
    s_out = s.out_strength[i]
    s_in = s.in_strength[i]
    total = s_out + s_in
    if total == 0:
        return UNDEFINED
    return (s_out - s_in) / total


def clustering_coefficient(s: TimeSlice, i: CountryCode) -> float:
    """Fraction of ordered neighbor pairs of ``i`` that are linked, weights ignored."""
    i = CountryCode(i)
    nbrs = s.neighbors(i)
    k = len(nbrs)
    if k < 2:
        return UNDEFINED
    idx = [s.index[n] for n in nbrs]
    links = int(s.bool_matrix[np.ix_(idx, idx)].sum())
    return links / (k * (k - 1))


def node_reciprocity(s: TimeSlice, i: CountryCode, variant: str = "paper") -> float:
    """Reciprocated-neighbor score of ``i``.

    ``paper`` keeps the published factor 2 (range [0, 2]); ``normalized``
    divides it out so the score is the plain fraction of neighbors that are
    both predecessor and successor.
    """
    if variant not in ("paper", "normalized"):
        raise ValueError(f"unknown reciprocity variant {variant!r}")
    i = CountryCode(i)
    succ = s.successors(i)
    pred = s.predecessors(i)
    k = len(succ | pred)
    if k == 0:
        return UNDEFINED
    mutual = len(succ & pred)
    value = 2.0 * mutual / k
    return value / 2.0 if variant == "normalized" else value


def network_reciprocity(s: TimeSlice) -> float:
    """Fraction of directed edges whose reverse edge also exists."""
    m = len(s.weights)
    if m == 0:
        return UNDEFINED
    reciprocated = sum(1 for (o, d) in s.weights if (d, o) in s.weights)
    return reciprocated / m


def gini(values: Sequence[float]) -> float:
    """Mean absolute difference over all ordered pairs, normalized by 2n*sum.

    Ranges from 0 (all equal) to (n-1)/n (single nonzero value).  Computed
    through the sorted-rank identity, which is algebraically equal to the
    pairwise double sum and exact for constant inputs.
    """
    w = np.asarray(list(values), dtype=float)
    if w.size == 0:
        return UNDEFINED
    if (w < 0).any():
        raise ValueError("gini population must be nonnegative")
    total = float(w.sum())
    if total == 0.0:
        return UNDEFINED
    w = np.sort(w)
    n = w.size
    coef = 2.0 * np.arange(1, n + 1) - n - 1
    return float(coef @ w) / (n * total)


def lorenz(values: Sequence[float]) -> LorenzCurve:
    """Lorenz curve of a nonnegative population, values sorted ascending."""
    g = gini(values)
    if not is_defined(g):
        raise ValueError("lorenz curve undefined for an empty or all-zero population")
    w = np.sort(np.asarray(list(values), dtype=float))
    n = w.size
    shares = np.cumsum(w) / w.sum()
    points = [(0.0, 0.0)]
    points.extend(((k + 1) / n, float(shares[k])) for k in range(n))
    return LorenzCurve(tuple(points), g)


def neighbor_weight_population(s: TimeSlice, i: CountryCode, side: str) -> list[int]:
    """Edge weights leaving (``side='out'``) or entering (``side='in'``) node ``i``."""
    i = CountryCode(i)
    if side == "out":
        return sorted(w for (o, d), w in s.weights.items() if o == i)
    if side == "in":
        return sorted(w for (o, d), w in s.weights.items() if d == i)
    raise ValueError(f"side must be 'out' or 'in', got {side!r}")


# -- whole-slice vectors ----------------------------------------------------

def drain_index_vector(s: TimeSlice) -> ScoreVector:
    return ScoreVector("drain_index", s.year, {n: drain_index(s, n) for n in s.node_order})


def clustering_vector(s: TimeSlice) -> ScoreVector:
    return ScoreVector(
        "clustering", s.year, {n: clustering_coefficient(s, n) for n in s.node_order}
    )


def reciprocity_vector(s: TimeSlice, variant: str = "paper") -> ScoreVector:
    return ScoreVector(
        "reciprocity", s.year, {n: node_reciprocity(s, n, variant) for n in s.node_order}
    )


def strength_vector(s: TimeSlice, side: str) -> ScoreVector:
    if side == "out":
        return ScoreVector("out_strength", s.year, {n: float(s.out_strength[n]) for n in s.node_order})
    if side == "in":
        return ScoreVector("in_strength", s.year, {n: float(s.in_strength[n]) for n in s.node_order})
    raise ValueError(f"side must be 'out' or 'in', got {side!r}")
