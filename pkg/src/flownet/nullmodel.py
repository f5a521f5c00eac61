"""Strength-preserving randomization of a slice and ensemble statistics.

Each realization matches every node's unit out-stubs to unit in-stubs with a
uniformly random permutation, then removes self-loop matches by random pair
swaps that keep all strengths intact.  Parallel stub matches merge into
integer edge weights.

Randomness is pinned to numpy's PCG64 generator.  Realization ``k`` of an
ensemble draws from ``PCG64(SeedSequence((base_seed, k)))``, so published
ensemble statistics reproduce bit-exactly from the base seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .network import CountryCode, TimeSlice

Seed = Union[int, Sequence[int]]

# retries per self-loop position before declaring the matching infeasible;
# valid self-loop-free slices always admit a matching, so this only guards
# against corrupted inputs
MAX_SWAP_ATTEMPTS = 10_000


class InfeasibleSliceError(RuntimeError):
    """Self-loop elimination could not finish within the attempt budget."""


@dataclass(frozen=True)
class NullEnsemble:
    """Independently seeded strength-preserving randomizations of one slice."""

    base_year: int
    size: int
    seeds: tuple[Seed, ...]
    realizations: tuple[TimeSlice, ...]


def configuration_model(s: TimeSlice, seed: Seed) -> TimeSlice:
    """One strength-preserving, self-loop-free randomization of ``s``."""
    if len(s.weights) == 0:
        raise ValueError("configuration model needs at least one edge")
    order = s.node_order
    out_stubs = np.repeat(
        np.arange(len(order)), [s.out_strength[n] for n in order]
    )
    in_stubs = np.repeat(np.arange(len(order)), [s.in_strength[n] for n in order])

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    matched = rng.permutation(in_stubs)

    m = len(out_stubs)
    for p in np.flatnonzero(out_stubs == matched):
        if out_stubs[p] != matched[p]:
            continue  # an earlier swap already fixed this position
        for _ in range(MAX_SWAP_ATTEMPTS):
            q = int(rng.integers(m))
            if q == p:
                continue
            if out_stubs[p] != matched[q] and out_stubs[q] != matched[p]:
                matched[p], matched[q] = matched[q], matched[p]
                break
        else:
            raise InfeasibleSliceError(
                f"could not remove self-loops of year {s.year} within "
                f"{MAX_SWAP_ATTEMPTS} swap attempts"
            )

    weights: dict[tuple[CountryCode, CountryCode], int] = {}
    for o_idx, d_idx in zip(out_stubs, matched):
        key = (order[o_idx], order[d_idx])
        weights[key] = weights.get(key, 0) + 1
    return TimeSlice.from_weights(s.year, s.nodes, weights)


def ensemble(s: TimeSlice, n: int = 10, base_seed: Seed = 0) -> NullEnsemble:
    """``n`` independent realizations, realization k seeded by (base_seed, k).

    ``base_seed`` may itself be a tuple (e.g. ``(run_seed, year)``), in which
    case k is appended to it.
    """
    if n < 1:
        raise ValueError(f"ensemble size must be >= 1, got {n}")
    if isinstance(base_seed, int):
        base = (int(base_seed),)
    else:
        base = tuple(int(x) for x in base_seed)
    seeds = tuple(base + (k,) for k in range(n))
    realizations = tuple(configuration_model(s, seed) for seed in seeds)
    return NullEnsemble(s.year, n, seeds, realizations)


def ensemble_statistic(
    e: NullEnsemble, f: Callable[[TimeSlice], Union[float, np.ndarray]]
) -> tuple[Union[float, np.ndarray], Optional[Union[float, np.ndarray]]]:
    """Mean and 95% CI half-width of a slice metric over the ensemble.

    The half-width is 1.96 * (sample standard deviation) / sqrt(size); with
    fewer than two realizations it is unavailable and reported as ``None``.
    """
    values = np.asarray([f(r) for r in e.realizations], dtype=float)
    mean = values.mean(axis=0)
    if e.size < 2:
        ci = None
    else:
        ci = 1.96 * values.std(axis=0, ddof=1) / np.sqrt(e.size)
    if values.ndim == 1:
        return float(mean), (None if ci is None else float(ci))
    return mean, ci
