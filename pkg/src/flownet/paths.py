"""Betweenness centrality on the reciprocal-weight distance graph.

An edge of weight ``w`` has length ``1/w``, so heavier migration flows make
shorter paths.  Scores count, for every ordered source/target pair, the
fraction of minimum-length directed paths running through each intermediate
node.
"""

from __future__ import annotations

import numpy as np

from ._kernels import betweenness_kernel
from .metrics import ScoreVector
from .network import TimeSlice, active_nodes


def _csr_lengths(s: TimeSlice):
    n = len(s.node_order)
    idx = s.index
    rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (o, d), w in s.weights.items():
        rows[idx[o]].append((idx[d], 1.0 / w))
    indptr = np.zeros(n + 1, dtype=np.int64)
    targets = np.zeros(len(s.weights), dtype=np.int64)
    lengths = np.zeros(len(s.weights))
    pos = 0
    for i, row in enumerate(rows):
        for j, ln in sorted(row):
            targets[pos] = j
            lengths[pos] = ln
            pos += 1
        indptr[i + 1] = pos
    return indptr, targets, lengths


def betweenness(s: TimeSlice, normalized: bool = False) -> ScoreVector:
    """Reciprocal-weight betweenness of every roster node.

    Endpoints are excluded from their own paths and unreachable pairs
    contribute nothing.  With ``normalized`` the scores are divided by
    (n-1)(n-2) where n counts the slice's active nodes; slices with fewer
    than three active nodes are left unnormalized because no pair can have
    an intermediary.
    """
    n = len(s.node_order)
    indptr, targets, lengths = _csr_lengths(s)
    cb = betweenness_kernel(indptr, targets, lengths, n)
    if normalized:
        k = len(active_nodes(s))
        denom = (k - 1) * (k - 2)
        if denom > 0:
            cb = cb / denom
    scores = {node: float(cb[i]) for i, node in enumerate(s.node_order)}
    return ScoreVector("betweenness", s.year, scores)
