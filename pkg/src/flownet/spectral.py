"""Fixed-point centralities: weighted PageRank and HITS hubs/authorities.

Both run plain power iteration from the uniform vector 1/|V| and stop when
the L1 change falls below a tolerance.  Scores are reported for every
roster node; nodes outside the edge support keep their teleport-driven
PageRank mass and exactly zero HITS mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import hits_kernel, pagerank_kernel
from .metrics import UNDEFINED, ScoreVector
from .network import TimeSlice


@dataclass(frozen=True)
class IterationReport:
    """Outcome of one power iteration: step count, last L1 change, convergence."""

    iterations: int
    final_delta: float
    converged: bool


def transition_matrix(s: TimeSlice, d: float = 0.85) -> np.ndarray:
    """Row-stochastic PageRank transition for one slice.

    Rows of nodes with outgoing flow mix the damped weight fractions with
    uniform teleport mass; rows of dangling nodes (zero out-strength) are
    uniform so the matrix stays stochastic.
    """
    if not 0.0 < d < 1.0:
        raise ValueError(f"damping factor must be in (0, 1), got {d}")
    n = len(s.node_order)
    if n == 0:
        raise ValueError("slice has no nodes")
    R = np.full((n, n), (1.0 - d) / n)
    W = s.matrix
    out = W.sum(axis=1)
    dangling = out == 0
    R += d * np.divide(W, np.where(dangling, 1.0, out)[:, None])
    R[dangling, :] = 1.0 / n
    return R


def pagerank(
    s: TimeSlice,
    d: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> tuple[ScoreVector, IterationReport]:
    """Weighted PageRank of one slice; the returned vector sums to 1."""
    R = transition_matrix(s, d)
    n = R.shape[0]
    M = np.ascontiguousarray(R.T)
    r0 = np.full(n, 1.0 / n)
    r, iterations, delta, converged = pagerank_kernel(M, r0, tol, max_iter)
    scores = {node: float(r[i]) for i, node in enumerate(s.node_order)}
    return (
        ScoreVector("pagerank", s.year, scores),
        IterationReport(iterations, float(delta), bool(converged)),
    )


def hits(
    s: TimeSlice,
    weighted: bool = True,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> tuple[ScoreVector, ScoreVector, IterationReport]:
    """HITS hub and authority vectors, each normalized to unit sum.

    On an edgeless slice both vectors are undefined for every node and the
    report comes back converged after zero iterations.
    """
    order = s.node_order
    if len(s.weights) == 0:
        nan_scores = {node: UNDEFINED for node in order}
        return (
            ScoreVector("hub", s.year, dict(nan_scores)),
            ScoreVector("authority", s.year, dict(nan_scores)),
            IterationReport(0, 0.0, True),
        )
    W = s.matrix if weighted else s.bool_matrix.astype(float)
    W = np.ascontiguousarray(W)
    h, a, iterations, delta, converged = hits_kernel(W, tol, max_iter)
    hub = {node: float(h[i]) for i, node in enumerate(order)}
    authority = {node: float(a[i]) for i, node in enumerate(order)}
    return (
        ScoreVector("hub", s.year, hub),
        ScoreVector("authority", s.year, authority),
        IterationReport(iterations, float(delta), bool(converged)),
    )
