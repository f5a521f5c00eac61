"""Numeric inner loops with two interchangeable backends.

Every hot kernel exists twice: a vectorized pure-numpy version and a
numba ``@njit`` version with explicit loops.  The active backend is picked
once at import time from the ``FLOWNET_BACKEND`` environment variable:

* ``auto`` (default) - numba when importable, else numpy
* ``numba``          - force numba (falls back with a warning if missing)
* ``numpy``          - force the pure-numpy path

Both variants of each kernel stay importable regardless of the selection so
tests and benchmarks can compare them directly.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def decorate(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorate


# Relative tolerance for "two paths have equal length" in the betweenness
# sweep; validated against an exact-rational oracle in the test suite.
EQUAL_LENGTH_RTOL = 1e-12


# ---------------------------------------------------------------------------
# power-iteration ranking (column-stochastic transition, L1 convergence)
# ---------------------------------------------------------------------------

def pagerank_numpy(M, r0, tol, max_iter):
    """Iterate ``r <- M @ r`` until the L1 change drops below ``tol``.

    ``M`` is the transposed transition matrix (columns sum to 1).
    Returns ``(r, iterations, final_delta, converged)``.
    """
    r = r0.copy()
    delta = np.inf
    for it in range(1, max_iter + 1):
        r_next = M @ r
        delta = np.abs(r_next - r).sum()
        r = r_next
        if delta <= tol:
            return r, it, delta, True
    return r, max_iter, delta, False


@njit(cache=True)
def pagerank_numba(M, r0, tol, max_iter):
    n = M.shape[0]
    r = r0.copy()
    r_next = np.zeros(n)
    delta = np.inf
    for it in range(1, max_iter + 1):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += M[i, j] * r[j]
            r_next[i] = acc
        delta = 0.0
        for i in range(n):
            delta += abs(r_next[i] - r[i])
            r[i] = r_next[i]
        if delta <= tol:
            return r, it, delta, True
    return r, max_iter, delta, False


# ---------------------------------------------------------------------------
# hub/authority mutual reinforcement (sum-to-one normalization each step)
# ---------------------------------------------------------------------------

def hits_numpy(W, tol, max_iter):
    """Alternate authority/hub updates on the weight matrix ``W``.

    The authority vector is refreshed from the previous hub vector, the hub
    vector from the fresh authority vector; both are normalized to unit sum
    every step.  Returns ``(h, a, iterations, final_delta, converged)``.
    """
    n = W.shape[0]
    h = np.full(n, 1.0 / n)
    a = np.full(n, 1.0 / n)
    delta = np.inf
    for it in range(1, max_iter + 1):
        a_next = W.T @ h
        a_next /= a_next.sum()
        h_next = W @ a_next
        h_next /= h_next.sum()
        delta = max(np.abs(a_next - a).sum(), np.abs(h_next - h).sum())
        a, h = a_next, h_next
        if delta <= tol:
            return h, a, it, delta, True
    return h, a, max_iter, delta, False


@njit(cache=True)
def hits_numba(W, tol, max_iter):
    n = W.shape[0]
    h = np.full(n, 1.0 / n)
    a = np.full(n, 1.0 / n)
    a_next = np.zeros(n)
    h_next = np.zeros(n)
    delta = np.inf
    for it in range(1, max_iter + 1):
        for j in range(n):
            a_next[j] = 0.0
        for i in range(n):
            hi = h[i]
            for j in range(n):
                a_next[j] += W[i, j] * hi
        a_sum = 0.0
        for j in range(n):
            a_sum += a_next[j]
        for j in range(n):
            a_next[j] /= a_sum
        h_sum = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += W[i, j] * a_next[j]
            h_next[i] = acc
            h_sum += acc
        for i in range(n):
            h_next[i] /= h_sum
        da = 0.0
        dh = 0.0
        for i in range(n):
            da += abs(a_next[i] - a[i])
            dh += abs(h_next[i] - h[i])
        delta = da if da > dh else dh
        for i in range(n):
            a[i] = a_next[i]
            h[i] = h_next[i]
        if delta <= tol:
            return h, a, it, delta, True
    return h, a, max_iter, delta, False


# ---------------------------------------------------------------------------
# betweenness on reciprocal-weight lengths (Brandes accumulation)
# ---------------------------------------------------------------------------

def betweenness_numpy(indptr, targets, lengths, n):
    """Shortest-path betweenness for a CSR digraph with float edge lengths.

    Equal-length paths are detected with a relative tolerance of
    ``EQUAL_LENGTH_RTOL``.  Returns the unnormalized score array.
    """
    cb = np.zeros(n)
    for s in range(n):
        if indptr[s + 1] == indptr[s]:
            # no outgoing edges: no paths start here
            continue
        dist = np.full(n, np.inf)
        sigma = np.zeros(n)
        pred = np.zeros((n, n), dtype=np.bool_)
        done = np.zeros(n, dtype=np.bool_)
        order = np.empty(n, dtype=np.int64)
        dist[s] = 0.0
        sigma[s] = 1.0
        count = 0
        while True:
            masked = np.where(done, np.inf, dist)
            v = int(np.argmin(masked))
            if not np.isfinite(masked[v]):
                break
            done[v] = True
            order[count] = v
            count += 1
            lo, hi = indptr[v], indptr[v + 1]
            ws = targets[lo:hi]
            alts = dist[v] + lengths[lo:hi]
            undone = ~done[ws]
            ws = ws[undone]
            alts = alts[undone]
            if ws.size == 0:
                continue
            dw = dist[ws]
            finite = np.isfinite(dw)
            eps = EQUAL_LENGTH_RTOL * np.where(finite & (dw > alts), dw, alts)
            better = ~finite | (alts < dw - eps)
            equal = ~better & (np.abs(alts - dw) <= eps)
            idx = ws[better]
            dist[idx] = alts[better]
            sigma[idx] = sigma[v]
            pred[idx, :] = False
            pred[idx, v] = True
            idx = ws[equal]
            sigma[idx] += sigma[v]
            pred[idx, v] = True
        delta = np.zeros(n)
        for k in range(count - 1, -1, -1):
            w = order[k]
            coeff = (1.0 + delta[w]) / sigma[w]
            delta += pred[w] * (sigma * coeff)
            if w != s:
                cb[w] += delta[w]
    return cb


@njit(cache=True)
def betweenness_numba(indptr, targets, lengths, n):
    cb = np.zeros(n)
    dist = np.empty(n)
    sigma = np.empty(n)
    delta = np.empty(n)
    pred = np.empty((n, n), dtype=np.bool_)
    done = np.empty(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        if indptr[s + 1] == indptr[s]:
            continue
        for i in range(n):
            dist[i] = np.inf
            sigma[i] = 0.0
            done[i] = False
            for j in range(n):
                pred[i, j] = False
        dist[s] = 0.0
        sigma[s] = 1.0
        count = 0
        while True:
            v = -1
            best = np.inf
            for i in range(n):
                if not done[i] and dist[i] < best:
                    best = dist[i]
                    v = i
            if v < 0:
                break
            done[v] = True
            order[count] = v
            count += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = targets[e]
                if done[w]:
                    continue
                alt = dist[v] + lengths[e]
                dw = dist[w]
                if dw == np.inf:
                    dist[w] = alt
                    sigma[w] = sigma[v]
                    for j in range(n):
                        pred[w, j] = False
                    pred[w, v] = True
                else:
                    mx = dw if dw > alt else alt
                    eps = EQUAL_LENGTH_RTOL * mx
                    if alt < dw - eps:
                        dist[w] = alt
                        sigma[w] = sigma[v]
                        for j in range(n):
                            pred[w, j] = False
                        pred[w, v] = True
                    elif abs(alt - dw) <= eps:
                        sigma[w] += sigma[v]
                        pred[w, v] = True
        for i in range(n):
            delta[i] = 0.0
        for k in range(count - 1, -1, -1):
            w = order[k]
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in range(n):
                if pred[w, v]:
                    delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_VARIANTS = {
    "numpy": {
        "pagerank": pagerank_numpy,
        "hits": hits_numpy,
        "betweenness": betweenness_numpy,
    },
    "numba": {
        "pagerank": pagerank_numba,
        "hits": hits_numba,
        "betweenness": betweenness_numba,
    },
}


def _select_backend() -> str:
    requested = os.environ.get("FLOWNET_BACKEND", "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"FLOWNET_BACKEND must be auto, numba or numpy, got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    if requested == "numba" and not HAS_NUMBA:
        warnings.warn("numba requested via FLOWNET_BACKEND but not installed; "
                      "using the numpy backend")
        return "numpy"
    return "numba" if HAS_NUMBA else "numpy"


BACKEND = _select_backend()

pagerank_kernel = _VARIANTS[BACKEND]["pagerank"]
hits_kernel = _VARIANTS[BACKEND]["hits"]
betweenness_kernel = _VARIANTS[BACKEND]["betweenness"]
