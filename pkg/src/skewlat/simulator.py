"""AWGN Monte Carlo for receiver error rate and eavesdropper coset decisions.

Random numbers come from Philox, a counter-based generator. Trials are cut
into fixed blocks of ``BLOCK`` trials; block ``b`` of stream ``s`` under
seed ``seed`` draws from ``Philox(key=seed + s * 2**64, counter=b * 2**64)``,
i.e. the stream index is the high key word and the block index is the
second counter word. Blocks never share counter values, and their results
are merged as integer counts, so the outcome depends only on
``(seed, stream, trials)`` and not on how blocks are spread over workers.
Single calls use stream 0; ``sweep`` gives the i-th sigma stream i.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .enumeration import closest_coordinates, coset_decode
from .lattice import Lattice
from .wiretap import CosetCode

BLOCK = 4096
DITHER_WINDOW = 5


@dataclass(frozen=True)
class ChannelConfig:
    sigma: float
    trials: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimResult:
    estimate: float
    stderr: float
    trials: int

    @classmethod
    def from_count(cls, hits: int, trials: int) -> "SimResult":
        p = hits / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed + (stream << 64), counter=block << 64))


def _run_blocks(count_block: Callable[[np.random.Generator, int], int], cfg: ChannelConfig,
                stream: int, workers: int) -> SimResult:
    sizes = [min(BLOCK, cfg.trials - start) for start in range(0, cfg.trials, BLOCK)]

    def job(b: int) -> int:
        return count_block(block_rng(cfg.seed, stream, b), sizes[b])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(job, range(len(sizes))))
    else:
        hits = sum(job(b) for b in range(len(sizes)))
    return SimResult.from_count(hits, cfg.trials)


def simulate_rep(lat: Lattice, cfg: ChannelConfig, workers: int = 1, stream: int = 0) -> SimResult:
    """Fraction of trials where the zero codeword is decoded to a nonzero point."""
    n = lat.dim

    def count(rng, m):
        noise = rng.standard_normal((m, n)) * cfg.sigma
        return sum(1 for y in noise if np.any(closest_coordinates(lat, y)))

    return _run_blocks(count, cfg, stream, workers)


def simulate_coset_rate(code: CosetCode, cfg: ChannelConfig, workers: int = 1, stream: int = 0) -> SimResult:
    """Fraction of trials where the eavesdropper's ML coset decision is right.

    Each trial sends a random coset representative plus a sparse-lattice
    point with coordinates uniform in ``[-2, 2]^n`` (a box of five
    fundamental domains per dimension). The decision is taken modulo the
    sparse lattice, so the window does not bias the coset error event.
    """
    pair = code.pair
    n, index = pair.dim, pair.index
    reps = np.array([pair.representative(k) for k in range(index)])
    sparse = pair.sparse.generator
    half = DITHER_WINDOW // 2

    def count(rng, m):
        labels = rng.integers(0, index, size=m)
        dither = rng.integers(-half, half + 1, size=(m, n))
        noise = rng.standard_normal((m, n)) * cfg.sigma
        sent = reps[labels] + dither @ sparse.T + noise
        return sum(1 for y, k in zip(sent, labels) if coset_decode(pair, y) == k)

    return _run_blocks(count, cfg, stream, workers)


def sweep(op: str, target, sigmas: Sequence[float], base: ChannelConfig, workers: int = 1) -> list[SimResult]:
    """One result per sigma; sigma i uses stream i of ``base.seed``.

    ``op`` is ``"rep"`` (``target`` a Lattice) or ``"coset"`` (a CosetCode).
    """
    if not sigmas:
        raise ValueError("sigma list must be non-empty")
    fn = {"rep": simulate_rep, "coset": simulate_coset_rate}.get(op)
    if fn is None:
        raise ValueError(f"unknown simulation {op!r}; expected 'rep' or 'coset'")
    return [
        fn(target, ChannelConfig(s, base.trials, base.seed), workers=workers, stream=i)
        for i, s in enumerate(sigmas)
    ]
