"""Seeded Monte Carlo simulation of the physical on-off detector array.

The simulation is a per-photon physical model, not a draw from the exact
click law: each trial samples a photon number, loses each photon with
probability 1 - eta, throws the survivors into uniformly random detectors,
and adds independent dark clicks per detector. Agreement with the exact
kernel distribution is therefore a genuine cross-validation.

Trials are partitioned into fixed chunks of 4096; every chunk draws from its
own random stream derived from (seed, chunk index), so the output depends
only on (spec, config, trials, seed) and never on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .click_kernel import DetectorConfig
from .states import DEFAULT_TAIL_TOLERANCE, StateSpec, make_distribution

CHUNK_SIZE = 4096
MAX_TRIALS = 10**8

# Domain tag mixed into chunk seeds so simulation streams can never collide
# with bootstrap streams derived from the same user seed.
_STREAM_DOMAIN = 0x53494D


@dataclass(frozen=True)
class ClickSampleSet:
    """Per-trial click counts plus the provenance needed to reproduce them."""

    N: int
    clicks: np.ndarray
    seed: int
    trials: int
    config_echo: DetectorConfig | None = None
    state_echo: StateSpec | None = None

    def __post_init__(self):
        arr = np.asarray(self.clicks, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "clicks", arr)
        if arr.ndim != 1 or arr.size != self.trials:
            raise ValueError(
                f"click record length {arr.size} does not match trials={self.trials}"
            )
        if arr.size and (arr.min() < 0 or arr.max() > self.N):
            raise ValueError(f"click counts must lie in [0, {self.N}]")


@lru_cache(maxsize=128)
def _cumulative_table(spec: StateSpec, tail_tolerance: float) -> np.ndarray:
    """Shared read-only inverse-CDF table for photon-number sampling."""
    pnd = make_distribution(spec, tail_tolerance)
    cum = np.cumsum(pnd.probs)
    cum.setflags(write=False)
    return cum


def sample_photon_number(
    spec: StateSpec,
    random_draw: float,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> int:
    """Inverse-CDF photon-number sample from a uniform draw in [0, 1).

    Draws at or beyond the truncated cumulative total map to the cutoff
    photon number.
    """
    if not (0.0 <= random_draw < 1.0):
        raise ValueError(f"random draw must lie in [0, 1), got {random_draw!r}")
    cum = _cumulative_table(spec, tail_tolerance)
    idx = int(np.searchsorted(cum, random_draw, side="right"))
    return min(idx, cum.size - 1)


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([_STREAM_DOMAIN, seed, chunk_index])
    )


def _simulate_chunk(
    cum: np.ndarray,
    config: DetectorConfig,
    seed: int,
    chunk_index: int,
    size: int,
) -> np.ndarray:
    rng = _chunk_rng(seed, chunk_index)
    N, eta, nu = config.N, config.eta, config.nu
    n_max = cum.size - 1

    draws = rng.random(size)
    photons = np.minimum(np.searchsorted(cum, draws, side="right"), n_max)
    survivors = rng.binomial(photons, eta)

    trial_ids = np.repeat(np.arange(size), survivors)
    landed = rng.integers(0, N, size=int(survivors.sum()))
    hit = np.zeros((size, N), dtype=bool)
    hit[trial_ids, landed] = True

    if nu > 0.0:
        dark_p = -math.expm1(-nu)
        hit |= rng.random((size, N)) < dark_p
    return hit.sum(axis=1).astype(np.int64)


def simulate(
    spec: StateSpec,
    config: DetectorConfig,
    trials: int,
    seed: int,
    workers: int = 1,
) -> ClickSampleSet:
    """Simulate `trials` measurement windows of the detector array.

    Deterministic for fixed (spec, config, trials, seed); the worker count
    only parallelizes independent chunks and never changes the output.
    """
    if not (1 <= trials <= MAX_TRIALS):
        raise ValueError(f"trials must lie in [1, {MAX_TRIALS}], got {trials!r}")
    if not (0 <= seed < 2**64):
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers!r}")
    spec.validate()
    cum = _cumulative_table(spec, DEFAULT_TAIL_TOLERANCE)

    n_chunks = (trials + CHUNK_SIZE - 1) // CHUNK_SIZE
    sizes = [
        min(CHUNK_SIZE, trials - c * CHUNK_SIZE) for c in range(n_chunks)
    ]

    if workers == 1 or n_chunks == 1:
        parts = [
            _simulate_chunk(cum, config, seed, c, sizes[c]) for c in range(n_chunks)
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda c: _simulate_chunk(cum, config, seed, c, sizes[c]),
                    range(n_chunks),
                )
            )
    clicks = np.concatenate(parts)
    return ClickSampleSet(
        N=config.N,
        clicks=clicks,
        seed=seed,
        trials=trials,
        config_echo=config,
        state_echo=spec,
    )
