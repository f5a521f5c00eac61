"""Ego-network extraction and plot-ready serialization.

Every exporter is byte-deterministic: keys are sorted, floats carry 17
significant digits (enough to round-trip doubles exactly), line endings are
LF.  Undefined scores serialize as empty CSV fields or JSON nulls, matching
the "no data" state of the published maps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

from .metrics import ScoreVector, is_defined
from .network import CountryCode, TimeSlice


@dataclass(frozen=True)
class EgoNetwork:
    """Edges of one slice that touch the ego, one direction at a time."""

    ego: CountryCode
    year: int
    direction: str
    edges: Mapping[tuple[CountryCode, CountryCode], int]

    @property
    def max_weight(self) -> int:
        return max(self.edges.values(), default=0)


def ego_network(s: TimeSlice, ego: CountryCode, direction: str) -> EgoNetwork:
    """Incoming or outgoing star of ``ego``; neighbor-to-neighbor edges drop."""
    ego = CountryCode(ego)
    if ego not in s.nodes:
        raise ValueError(f"unknown ego country {ego}")
    if direction == "incoming":
        edges = {(o, d): w for (o, d), w in s.weights.items() if d == ego}
    elif direction == "outgoing":
        edges = {(o, d): w for (o, d), w in s.weights.items() if o == ego}
    else:
        raise ValueError(f"direction must be 'incoming' or 'outgoing', got {direction!r}")
    return EgoNetwork(ego, s.year, direction, edges)


def to_dot(e: EgoNetwork) -> str:
    """DOT digraph text; node and edge statements sorted for byte stability.

    The graph-level ``maxweight`` attribute carries the heaviest flow so
    renderers can normalize edge thickness per ego-network.
    """
    suffix = "in" if e.direction == "incoming" else "out"
    lines = [f"digraph ego_{e.ego}_{e.year}_{suffix} {{"]
    lines.append(f'  graph [maxweight={e.max_weight}];')
    nodes = {e.ego}
    for (o, d) in e.edges:
        nodes.add(o)
        nodes.add(d)
    for node in sorted(nodes):
        lines.append(f'  "{node}";')
    for (o, d) in sorted(e.edges):
        lines.append(f'  "{o}" -> "{d}" [weight={e.edges[(o, d)]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _format_float(value: float) -> str:
    return format(value, ".17g")


def choropleth_csv(v: ScoreVector) -> str:
    """``country,value`` rows sorted by code; undefined scores leave the
    value field empty."""
    lines = ["country,value"]
    for node in sorted(v.scores):
        value = v.scores[node]
        lines.append(f"{node},{_format_float(value)}" if is_defined(value) else f"{node},")
    return "\n".join(lines) + "\n"


def ranking_csv(entries) -> str:
    """``rank,country,score`` rows of a Ranking's entries."""
    lines = ["rank,country,score"]
    for pos, node, score in entries:
        lines.append(f"{pos},{node},{_format_float(score)}")
    return "\n".join(lines) + "\n"


def canonical_json(obj) -> str:
    """Canonical JSON: sorted keys, 17-significant-digit floats, LF newline.

    Non-finite floats become ``null``.  Serialize -> parse -> serialize is
    byte-stable because 17 significant digits round-trip doubles exactly.
    """
    pieces: list[str] = []
    _emit(obj, pieces)
    return "".join(pieces) + "\n"


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, Mapping):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def scores_json(vectors: list[ScoreVector], meta: Mapping) -> str:
    """One document with run metadata and per-metric per-year score maps."""
    blocks: dict[str, dict[str, dict[str, float | None]]] = {}
    for v in vectors:
        year_block = blocks.setdefault(v.name, {}).setdefault(str(v.year), {})
        for node in sorted(v.scores):
            value = v.scores[node]
            year_block[str(node)] = value if is_defined(value) else None
    return canonical_json({"meta": dict(meta), "scores": blocks})
