"""Composite analyses: rankings, correlations, rank-conditioned statistics,
class-based Lorenz summaries, reciprocity series, metric trajectories and
threshold sweeps.

Rank-conditioned curves align values by rank *position* across years (or
ensemble realizations), not by country identity, and report the mean with a
1.96 * SE confidence band at each position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.special import stdtr

from .metrics import (
    ScoreVector,
    UNDEFINED,
    clustering_coefficient,
    gini,
    is_defined,
    lorenz,
    neighbor_weight_population,
    network_reciprocity,
    node_reciprocity,
)
from .network import CountryCode, TemporalNetwork, TimeSlice, active_nodes, threshold
from .paths import betweenness
from .spectral import hits

DEFAULT_CLASSES = ((1, 10), (11, 50), (51, None))
LORENZ_GRID_POINTS = 101


@dataclass(frozen=True)
class Ranking:
    """Deterministic total order over the defined-score nodes of a vector."""

    year: int
    metric: str
    entries: tuple[tuple[int, CountryCode, float], ...]
    tiebreak: str
    excluded: tuple[CountryCode, ...]

    def nodes(self) -> tuple[CountryCode, ...]:
        return tuple(node for _, node, _ in self.entries)


@dataclass(frozen=True)
class RankConditionedCurve:
    """Mean and CI of a per-node statistic at each rank position."""

    metric: str
    x: tuple[int, ...]
    mean: tuple[float, ...]
    ci95: tuple[float, ...]
    source: str


@dataclass(frozen=True)
class ClassLorenzSummary:
    """Pointwise mean Lorenz curve and CI band for one ranking class."""

    label: str
    first_rank: int
    last_rank: int
    members: tuple[CountryCode, ...]
    grid: tuple[float, ...]
    mean: tuple[float, ...]
    ci95: tuple[float, ...]


@dataclass(frozen=True)
class ReciprocitySeries:
    """Per-year network reciprocity versus the top-k average."""

    score: str
    top_k: int
    variant: str
    years: tuple[int, ...]
    network: tuple[float, ...]
    top_mean: tuple[float, ...]


@dataclass(frozen=True)
class Trajectory:
    """Per-year (betweenness, clustering) points of one country."""

    country: CountryCode
    points: tuple[tuple[int, float, float], ...]
    skipped_years: tuple[int, ...]


@dataclass(frozen=True)
class ThresholdStep:
    tr: int
    retained_fraction: float
    ranking: Ranking


def rank(
    v: ScoreVector,
    direction: str = "desc",
    tiebreak: Optional[ScoreVector] = None,
) -> Ranking:
    """Sort defined-score nodes; ties fall back to the tie-break vector
    (descending) and then to the country code, so the order is total."""
    if direction not in ("desc", "asc"):
        raise ValueError(f"direction must be 'desc' or 'asc', got {direction!r}")
    defined = [(node, score) for node, score in v.scores.items() if is_defined(score)]

    def tb(node) -> float:
        if tiebreak is None:
            return 0.0
        value = tiebreak.scores.get(node, UNDEFINED)
        return value if is_defined(value) else -math.inf

    sign = -1.0 if direction == "desc" else 1.0
    defined.sort(key=lambda item: (sign * item[1], -tb(item[0]), item[0]))
    entries = tuple((pos + 1, node, score) for pos, (node, score) in enumerate(defined))
    label = f"{tiebreak.name},code" if tiebreak is not None else "code"
    return Ranking(v.year, v.name, entries, label, v.undefined_nodes())


def pearson(x: ScoreVector, y: ScoreVector) -> float:
    """Sample Pearson correlation over nodes defined in both vectors."""
    common = [
        (xv, y.scores[node])
        for node, xv in x.scores.items()
        if is_defined(xv) and is_defined(y.scores.get(node, UNDEFINED))
    ]
    if len(common) < 3:
        return UNDEFINED
    xs = np.array([c[0] for c in common])
    ys = np.array([c[1] for c in common])
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        return UNDEFINED
    return float(xd @ yd) / denom


def pearson_pvalue(x: ScoreVector, y: ScoreVector) -> float:
    """Two-sided p-value of the correlation via the t statistic."""
    r = pearson(x, y)
    if not is_defined(r):
        return UNDEFINED
    n = sum(
        1
        for node, xv in x.scores.items()
        if is_defined(xv) and is_defined(y.scores.get(node, UNDEFINED))
    )
    if n < 3:
        return UNDEFINED
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * float(stdtr(n - 2, -abs(t)))


def _ci95(values: Sequence[float]) -> float:
    if len(values) <= 1:
        return 0.0
    return 1.96 * float(np.std(values, ddof=1)) / math.sqrt(len(values))


def _as_slices(net: Union[TemporalNetwork, Iterable[TimeSlice]], roster: str) -> list[TimeSlice]:
    if isinstance(net, TemporalNetwork):
        slices = net.slices()
    else:
        slices = list(net)
    if roster == "per-year":
        slices = [s.restricted_to(active_nodes(s)) for s in slices]
    elif roster != "global":
        raise ValueError(f"roster must be 'global' or 'per-year', got {roster!r}")
    return slices


def _hits_ranking(
    s: TimeSlice, score: str, tol: float, max_iter: int
) -> Optional[Ranking]:
    if score not in ("hub", "authority"):
        raise ValueError(f"score must be 'hub' or 'authority', got {score!r}")
    if len(s.weights) == 0:
        return None
    hub, authority, _ = hits(s, tol=tol, max_iter=max_iter)
    return rank(hub if score == "hub" else authority, "desc")


def _positional_curve(samples: dict[int, list[float]], metric: str, source: str) -> RankConditionedCurve:
    positions = sorted(samples)
    means = []
    cis = []
    for k in positions:
        vals = samples[k]
        if vals:
            means.append(float(np.mean(vals)))
            cis.append(_ci95(vals))
        else:
            means.append(UNDEFINED)
            cis.append(0.0)
    return RankConditionedCurve(metric, tuple(positions), tuple(means), tuple(cis), source)


def rank_conditioned_gini(
    net: Union[TemporalNetwork, Iterable[TimeSlice]],
    score: str = "hub",
    side: Optional[str] = None,
    *,
    roster: str = "global",
    tol: float = 1e-10,
    max_iter: int = 1000,
    source: str = "real-network",
) -> RankConditionedCurve:
    """Average Gini of each ranked node's edge-weight population, by position.

    The default population side follows the score: outgoing weights for hubs,
    incoming weights for authorities.  Positions aggregate over every slice
    (year or null realization) where the position exists and the Gini is
    defined.
    """
    if side is None:
        side = "out" if score == "hub" else "in"
    samples: dict[int, list[float]] = {}
    for s in _as_slices(net, roster):
        ranking = _hits_ranking(s, score, tol, max_iter)
        if ranking is None:
            continue
        for pos, node, _ in ranking.entries:
            bucket = samples.setdefault(pos, [])
            population = neighbor_weight_population(s, node, side)
            if population:
                g = gini(population)
                if is_defined(g):
                    bucket.append(g)
    return _positional_curve(samples, f"gini_{score}_{side}", source)


def rank_conditioned_neighbor_cc(
    net: Union[TemporalNetwork, Iterable[TimeSlice]],
    score: str = "hub",
    *,
    roster: str = "global",
    tol: float = 1e-10,
    max_iter: int = 1000,
    source: str = "real-network",
) -> RankConditionedCurve:
    """Average clustering of the successors of hubs (or predecessors of
    authorities), by rank position."""
    samples: dict[int, list[float]] = {}
    for s in _as_slices(net, roster):
        ranking = _hits_ranking(s, score, tol, max_iter)
        if ranking is None:
            continue
        for pos, node, _ in ranking.entries:
            bucket = samples.setdefault(pos, [])
            group = s.successors(node) if score == "hub" else s.predecessors(node)
            ccs = [
                value
                for member in sorted(group)
                if is_defined(value := clustering_coefficient(s, member))
            ]
            if ccs:
                bucket.append(float(np.mean(ccs)))
    return _positional_curve(samples, f"neighbor_cc_{score}", source)


def lorenz_by_class(
    net: TemporalNetwork,
    year: int,
    score: str = "hub",
    side: Optional[str] = None,
    classes: Sequence[tuple[int, Optional[int]]] = DEFAULT_CLASSES,
    *,
    roster: str = "global",
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> tuple[list[ClassLorenzSummary], list[str]]:
    """Mean Lorenz curve with CI band for each ranking class.

    Classes are inclusive 1-based rank ranges (``None`` upper bound = end of
    ranking).  Member curves are resampled onto a common 101-point population
    share grid by linear interpolation.  Empty classes are omitted and
    reported in the warnings list.
    """
    if side is None:
        side = "out" if score == "hub" else "in"
    s = net.slice(year)
    if roster == "per-year":
        s = s.restricted_to(active_nodes(s))
    ranking = _hits_ranking(s, score, tol, max_iter)
    grid = np.linspace(0.0, 1.0, LORENZ_GRID_POINTS)
    summaries: list[ClassLorenzSummary] = []
    warnings: list[str] = []
    for first, last in classes:
        label = f"{first}-{last if last is not None else 'end'}"
        members: list[CountryCode] = []
        curves: list[np.ndarray] = []
        if ranking is not None:
            for pos, node, _ in ranking.entries:
                if pos < first or (last is not None and pos > last):
                    continue
                population = neighbor_weight_population(s, node, side)
                if not population or sum(population) == 0:
                    continue
                curve = lorenz(population)
                xs = np.array([p[0] for p in curve.points])
                ys = np.array([p[1] for p in curve.points])
                curves.append(np.interp(grid, xs, ys))
                members.append(node)
        if not curves:
            warnings.append(f"class {label}: no members with a defined Lorenz curve")
            continue
        stacked = np.vstack(curves)
        mean = stacked.mean(axis=0)
        if len(curves) > 1:
            ci = 1.96 * stacked.std(axis=0, ddof=1) / math.sqrt(len(curves))
        else:
            ci = np.zeros_like(mean)
        summaries.append(
            ClassLorenzSummary(
                label,
                first,
                last if last is not None else len(ranking.entries),
                tuple(members),
                tuple(float(x) for x in grid),
                tuple(float(x) for x in mean),
                tuple(float(x) for x in ci),
            )
        )
    return summaries, warnings


def reciprocity_timeseries(
    net: Union[TemporalNetwork, Iterable[TimeSlice]],
    top_k: int = 10,
    score: str = "hub",
    variant: str = "paper",
    *,
    roster: str = "global",
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> ReciprocitySeries:
    """Network reciprocity and mean top-k node reciprocity per year."""
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    years: list[int] = []
    network_series: list[float] = []
    top_series: list[float] = []
    for s in _as_slices(net, roster):
        years.append(s.year)
        network_series.append(network_reciprocity(s))
        ranking = _hits_ranking(s, score, tol, max_iter)
        if ranking is None:
            top_series.append(UNDEFINED)
            continue
        values = [
            value
            for _, node, _ in ranking.entries[:top_k]
            if is_defined(value := node_reciprocity(s, node, variant))
        ]
        top_series.append(float(np.mean(values)) if values else UNDEFINED)
    return ReciprocitySeries(
        score, top_k, variant, tuple(years), tuple(network_series), tuple(top_series)
    )


def trajectories(
    net: TemporalNetwork,
    countries: Sequence[CountryCode],
    *,
    roster: str = "global",
) -> list[Trajectory]:
    """Per-country (year, betweenness, clustering) series over the domain.

    Years where the clustering coefficient is undefined for the country are
    skipped and flagged.  Unknown countries raise with the offending codes.
    """
    wanted = [CountryCode(c) for c in countries]
    unknown = sorted(set(wanted) - net.nodes)
    if unknown:
        raise ValueError(f"unknown countries: {', '.join(unknown)}")
    points: dict[CountryCode, list[tuple[int, float, float]]] = {c: [] for c in wanted}
    skipped: dict[CountryCode, list[int]] = {c: [] for c in wanted}
    for s in _as_slices(net, roster):
        cb = betweenness(s)
        for c in wanted:
            if c not in s.nodes:
                skipped[c].append(s.year)
                continue
            cc = clustering_coefficient(s, c)
            cb_value = cb.scores[c]
            if is_defined(cc) and is_defined(cb_value):
                points[c].append((s.year, cb_value, cc))
            else:
                skipped[c].append(s.year)
    return [
        Trajectory(c, tuple(points[c]), tuple(skipped[c])) for c in wanted
    ]


def threshold_sensitivity(
    net: TemporalNetwork,
    year: int,
    metric: Callable[[TimeSlice], ScoreVector],
    thresholds: Sequence[int],
    *,
    direction: str = "desc",
    tiebreak: Optional[Callable[[TimeSlice], ScoreVector]] = None,
) -> list[ThresholdStep]:
    """Recompute a metric ranking after lifting the slice at each threshold."""
    if any(tr < 1 for tr in thresholds):
        raise ValueError("thresholds must be >= 1")
    base = net.slice(year)
    steps: list[ThresholdStep] = []
    for tr in thresholds:
        lifted, fraction = threshold(base, tr)
        vector = metric(lifted)
        tb = tiebreak(lifted) if tiebreak is not None else None
        steps.append(ThresholdStep(int(tr), fraction, rank(vector, direction, tb)))
    return steps
