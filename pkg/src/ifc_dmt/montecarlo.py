"""Finite-SNR outage simulation and empirical diversity slopes.

Random streams.  Each ``(x_index, shard_index)`` pair owns an independent
PCG64 generator seeded with ``SeedSequence(seed, spawn_key=(x_index,
shard_index))``.  Shards have a fixed size, so the estimates do not depend
on how many worker threads process them.  Within a shard the four gains
are drawn as one ``standard_exponential((4, n))`` call, rows ordered
``11, 12, 21, 22``.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .core import ChannelGains, RatePair
from .regions import FiniteFadingSample, RegionFamily, RegionKind, in_finite_region

GENERATOR = "PCG64"
SHARD_SIZE = 1 << 17
THREADS_ENV = "IFC_DMT_THREADS"
CSV_COLUMNS = ("x", "p_out", "ci95", "n", "region")


class InsufficientOutageEvents(RuntimeError):
    """Too few x points carry enough outage events for a slope fit.

    Raise ``samples_per_x`` or move ``x_grid`` toward lower SNR.
    """


@dataclass(frozen=True)
class McConfig:
    x_grid: tuple[float, ...]
    samples_per_x: int
    seed: int
    region: RegionKind = field(default_factory=RegionKind.etw_finite)
    min_events: int = 100
    shard_size: int = SHARD_SIZE
    workers: int | None = None

    def __post_init__(self) -> None:
        grid = tuple(float(x) for x in self.x_grid)
        if not grid:
            raise ValueError("x_grid must not be empty")
        if any(not x > 1.0 for x in grid):
            raise ValueError("every x must exceed 1")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("x_grid must be strictly increasing")
        if int(self.samples_per_x) < 1:
            raise ValueError("samples_per_x must be at least 1")
        if not self.region.is_finite:
            raise ValueError("Monte Carlo runs need a finite-SNR region")
        if int(self.shard_size) < 1:
            raise ValueError("shard_size must be positive")
        object.__setattr__(self, "x_grid", grid)
        object.__setattr__(self, "samples_per_x", int(self.samples_per_x))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def region_name(self) -> str:
        return "etw" if self.region.family is RegionFamily.ETW_FINITE else "hk"

    def metadata(self) -> dict[str, str]:
        return {
            "generator": GENERATOR,
            "seed_derivation": "SeedSequence(seed, spawn_key=(x_index, shard_index))",
            "shard_size": str(self.shard_size),
            "seed": str(self.seed),
        }


@dataclass(frozen=True)
class OutageEstimate:
    x: float
    p_out: float
    ci95_half_width: float
    n: int
    failures: int = 0

    @classmethod
    def from_counts(cls, x: float, failures: int, n: int) -> OutageEstimate:
        p = failures / n
        return cls(x, p, 1.96 * math.sqrt(p * (1.0 - p) / n), n, failures)


@dataclass(frozen=True)
class SlopeFit:
    d_hat: float
    residual: float
    points: tuple[tuple[float, float], ...]
    intercept: float = 0.0


def rng_stream(seed: int, x_index: int, shard_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(x_index, shard_index))
    return np.random.Generator(np.random.PCG64(ss))


def sample_block(ch: ChannelGains, x: float, rng: np.random.Generator, n: int) -> np.ndarray:
    """Array ``(4, n)`` of received powers ``x**beta_cu * E_cu``."""
    if not x > 1.0:
        raise ValueError("x must exceed 1")
    scale = np.array([x ** b for b in ch.as_tuple()])[:, None]
    return scale * rng.standard_exponential((4, n))


def sample_fading(ch: ChannelGains, x: float, rng: np.random.Generator) -> FiniteFadingSample:
    return FiniteFadingSample(*sample_block(ch, x, rng, 1)[:, 0])


def _shards(n: int, size: int) -> list[int]:
    full, rest = divmod(n, size)
    return [size] * full + ([rest] if rest else [])


def _worker_count(requested: int | None) -> int:
    env = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(cap, requested or cap))


def _shard_outages(ch, rates, cfg: McConfig, x_index: int, shard: int, n: int, kinds) -> tuple[int, ...]:
    x = cfg.x_grid[x_index]
    s = sample_block(ch, x, rng_stream(cfg.seed, x_index, shard), n)
    outs = [~in_finite_region(k, *s, ch, rates, x) for k in kinds]
    counts = [int(np.count_nonzero(o)) for o in outs]
    if len(kinds) == 2:
        # Samples in outage for the outer bound but not for the inner bound.
        counts.append(int(np.count_nonzero(outs[0] & ~outs[1])))
    return tuple(counts)


def _run(ch: ChannelGains, rates: RatePair, cfg: McConfig, kinds) -> list[tuple[int, ...]]:
    jobs = []
    for xi in range(len(cfg.x_grid)):
        for si, n in enumerate(_shards(cfg.samples_per_x, cfg.shard_size)):
            jobs.append((xi, si, n))
    workers = _worker_count(cfg.workers)
    if workers == 1:
        results = [_shard_outages(ch, rates, cfg, xi, si, n, kinds) for xi, si, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: _shard_outages(ch, rates, cfg, j[0], j[1], j[2], kinds), jobs))
    totals = []
    for xi in range(len(cfg.x_grid)):
        acc = None
        for (jxi, _, _), res in zip(jobs, results):
            if jxi == xi:
                acc = res if acc is None else tuple(a + b for a, b in zip(acc, res))
        totals.append(acc)
    return totals


def outage_probability(ch: ChannelGains, rates: RatePair, cfg: McConfig) -> list[OutageEstimate]:
    totals = _run(ch, rates, cfg, (cfg.region,))
    return [OutageEstimate.from_counts(x, t[0], cfg.samples_per_x) for x, t in zip(cfg.x_grid, totals)]


@dataclass(frozen=True)
class PairedOutage:
    """Outer- and inner-bound outage on common random numbers."""

    etw: list[OutageEstimate]
    hk: list[OutageEstimate]
    inclusion_violations: list[int]


def paired_outage(ch: ChannelGains, rates: RatePair, cfg: McConfig) -> PairedOutage:
    kinds = (RegionKind.etw_finite(), RegionKind.hk_finite())
    totals = _run(ch, rates, cfg, kinds)
    n = cfg.samples_per_x
    return PairedOutage(
        [OutageEstimate.from_counts(x, t[0], n) for x, t in zip(cfg.x_grid, totals)],
        [OutageEstimate.from_counts(x, t[1], n) for x, t in zip(cfg.x_grid, totals)],
        [t[2] for t in totals],
    )


def fit_slope(estimates: Sequence[OutageEstimate], min_events: int = 100) -> SlopeFit:
    """Least-squares slope of ``-log10 p_out`` against ``log10 x``.

    Points with fewer than ``min_events`` outages are dropped; if every
    point sits at ``p_out = 1`` the slope is zero.
    """
    if estimates and all(e.p_out == 1.0 for e in estimates):
        pts = tuple((math.log10(e.x), 0.0) for e in estimates)
        return SlopeFit(0.0, 0.0, pts, 0.0)
    usable = [e for e in estimates if e.failures > 0 and e.failures >= min_events]
    if len(usable) < 2:
        raise InsufficientOutageEvents(
            f"only {len(usable)} x point(s) have at least {min_events} outage events; "
            "raise samples_per_x or lower x_grid"
        )
    lx = np.array([math.log10(e.x) for e in usable])
    ly = np.array([-math.log10(e.p_out) for e in usable])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    pts = tuple((float(a), float(b)) for a, b in zip(lx, ly))
    return SlopeFit(float(slope), float(np.sqrt(np.mean(resid ** 2))), pts, float(intercept))


def estimate_diversity(ch: ChannelGains, rates: RatePair, cfg: McConfig) -> SlopeFit:
    return fit_slope(outage_probability(ch, rates, cfg), cfg.min_events)


def write_csv(estimates: Sequence[OutageEstimate], region: str, out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for e in estimates:
        w.writerow([f"{e.x:.9g}", f"{e.p_out:.9g}", f"{e.ci95_half_width:.9g}", e.n, region])
