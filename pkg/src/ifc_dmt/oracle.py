"""Brute-force ground truth for the diversity exponents.

The exponent of a large-SNR region is the smallest ``g11+g12+g21+g22`` over
fading exponents that violate at least one constraint.  This module finds it
by exhaustive search on a lattice, one constraint at a time, touching only
the axes the constraint depends on.

Lattice resolution.  Every constraint is a max/min/clip composition of
affine maps, so each per-constraint problem splits into linear programs
whose vertices sit on multiples of half the input granularity: the
optimum can need a half step (for example ``2*X11 <= rf + ...``).  The
search therefore runs on a lattice of spacing ``step / 2``, which makes it
exact for inputs aligned to ``step``.

Search.  Along one designated axis every right-hand side is monotone, so
the outage set is upward closed there and the smallest violating index is
found by bisection.  The remaining axes are enumerated in order of
increasing partial sum and pruned against the incumbent, which starts from
a coarse pass.  Coordinates beyond ``beta`` never help: they raise the
objective while leaving every constraint unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import INF, LABELS, TOL, ChannelGains, FadingExponents, RatePair
from .piecewise import PiecewiseLinear, minimize_piecewise_linear
from .regions import Constraint, RegionFamily, RegionKind, constraints_for

REFINE = 2
_COARSEN = 4
_CHUNK = 1 << 16

__all__ = [
    "OracleResult",
    "PiecewiseLinear",
    "REFINE",
    "SplitSweep",
    "check_alignment",
    "min_exponent_sum",
    "minimize_piecewise_linear",
    "per_constraint_minima",
    "sweep_power_split",
]


@dataclass(frozen=True)
class OracleResult:
    """Minimum exponent sum, a lattice point attaining it, and the constraint it violates."""

    value: float
    witness: FadingExponents | None
    constraint: str | None
    grid_step: float
    lattice_unit: float = field(default=0.0)


def check_alignment(values: Iterable[float], step: float, what: str = "input") -> None:
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step!r}")
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{what} value {v!r} is not finite")
        if abs(v - round(v / step) * step) > TOL:
            raise ValueError(f"{what} value {v!r} is not a multiple of the grid step {step!r}")


def _region_inputs(kind: RegionKind, ch: ChannelGains, rates: RatePair) -> list[float]:
    vals = list(ch.as_tuple()) + [rates.r1, rates.r2]
    if kind.family is RegionFamily.HK_GENERAL_ASYMPTOTIC:
        vals += list(kind.split)  # type: ignore[arg-type]
    return vals


class _ConstraintSearch:
    """Exact lattice minimization of the exponent sum over one constraint's outage set."""

    def __init__(self, con: Constraint, ch: ChannelGains, rates: RatePair, unit: float):
        self.con = con
        self.rates = rates
        self.unit = unit
        self.lhs = con.lhs(rates)
        beta = ch.as_tuple()
        self.sizes = {a: int(round(beta[a] / unit)) for a in con.axes}
        self.mono = con.monotone_axis
        self.free = [a for a in con.axes if a != self.mono]

    def _violated(self, idx: dict[int, np.ndarray | int]) -> np.ndarray:
        g = [self.unit * idx[a] if a in idx else 0.0 for a in range(4)]
        return np.asarray(self.lhs >= self.con.rhs(*g) - TOL)

    def _rows(self, stride: int) -> tuple[np.ndarray, list[np.ndarray]]:
        ranges = [np.arange(0, self.sizes[a] + 1, stride) for a in self.free]
        if self.free and stride > 1:
            ranges = [np.unique(np.append(r, self.sizes[a])) for r, a in zip(ranges, self.free)]
        if not ranges:
            return np.zeros(1, dtype=np.int64), []
        grids = np.meshgrid(*ranges, indexing="ij")
        cols = [gr.ravel().astype(np.int64) for gr in grids]
        partial = np.sum(cols, axis=0)
        order = np.argsort(partial, kind="stable")
        return partial[order], [c[order] for c in cols]

    def run(self, best: int | None = None) -> tuple[int | None, tuple[int, ...] | None]:
        """Smallest index sum of a violating lattice point, and the point."""
        coarse_best, coarse_pt = self._search(_COARSEN, best)
        if coarse_best is not None:
            best = coarse_best if best is None else min(best, coarse_best)
        fine_best, fine_pt = self._search(1, best, inclusive=True)
        if fine_best is not None:
            return fine_best, fine_pt
        return coarse_best, coarse_pt

    def _search(self, stride: int, best: int | None, inclusive: bool = False):
        partial, cols = self._rows(stride)
        n_mono = self.sizes[self.mono]
        mono_points = np.arange(0, n_mono + 1, stride)
        if stride > 1:
            mono_points = np.unique(np.append(mono_points, n_mono))
        found_sum: int | None = None
        found_pt: tuple[int, ...] | None = None
        # Strict improvement is required, except that the fine pass may tie
        # the incumbent so that it can report a fine-lattice witness.
        limit = INF if best is None else best + (1 if inclusive else 0)
        for start in range(0, partial.size, _CHUNK):
            p = partial[start:start + _CHUNK]
            if p.size == 0 or p[0] >= limit:
                break
            keep = p < limit
            p = p[keep]
            c = [col[start:start + _CHUNK][keep] for col in cols]
            cap_val = np.minimum(n_mono, limit - 1 - p) if math.isfinite(limit) else np.full(p.shape, n_mono)
            # Position of the largest admissible mono point not above the cap.
            hi = np.searchsorted(mono_points, cap_val, side="right") - 1
            ok = hi >= 0
            p, hi, c = p[ok], hi[ok], [x[ok] for x in c]
            if p.size == 0:
                continue
            idx = {a: x for a, x in zip(self.free, c)}
            idx[self.mono] = mono_points[hi]
            ok = self._violated(idx)
            p, hi, c = p[ok], hi[ok], [x[ok] for x in c]
            if p.size == 0:
                continue
            lo = np.zeros_like(hi)
            while True:
                active = lo < hi
                if not np.any(active):
                    break
                mid = (lo + hi) // 2
                idx[self.mono] = mono_points[mid]
                idx.update({a: x for a, x in zip(self.free, c)})
                v = self._violated(idx)
                v = np.broadcast_to(v, mid.shape)
                hi = np.where(active & v, mid, hi)
                lo = np.where(active & ~v, mid + 1, lo)
            total = p + mono_points[hi]
            j = int(np.argmin(total))
            t = int(total[j])
            if t < limit:
                limit = t
                point = [0, 0, 0, 0]
                for a, x in zip(self.free, c):
                    point[a] = int(x[j])
                point[self.mono] = int(mono_points[hi[j]])
                found_sum, found_pt = t, tuple(point)
                if inclusive:
                    inclusive = False
        return found_sum, found_pt


def per_constraint_minima(kind: RegionKind, ch: ChannelGains, rates: RatePair, step: float,
                          labels: Sequence[str] | None = None) -> dict[str, OracleResult]:
    """Lattice minimum of the exponent sum for each constraint of a large-SNR region."""
    if kind.is_finite:
        raise ValueError("the lattice search applies to large-SNR regions only")
    check_alignment(_region_inputs(kind, ch, rates), step)
    unit = step / REFINE
    out: dict[str, OracleResult] = {}
    for con in constraints_for(kind, ch):
        if labels is not None and con.label not in labels:
            continue
        total, point = _ConstraintSearch(con, ch, rates, unit).run()
        if total is None or point is None:
            out[con.label] = OracleResult(INF, None, con.label, step, unit)
            continue
        coords = [unit * k for k in point]
        witness = FadingExponents(*coords)
        out[con.label] = OracleResult(witness.total, witness, con.label, step, unit)
    return out


def min_exponent_sum(kind: RegionKind, ch: ChannelGains, rates: RatePair, step: float,
                     labels: Sequence[str] | None = None) -> OracleResult:
    """Minimum over all constraints (or the listed ones) of the per-constraint lattice minima.

    Ties go to the earliest constraint in the region's own order.
    """
    found = per_constraint_minima(kind, ch, rates, step, labels)
    if not found:
        raise ValueError("no constraint selected")
    best = None
    for res in found.values():
        if best is None or res.value < best.value - TOL:
            best = res
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# power-split sweep


@dataclass(frozen=True)
class SplitSweep:
    grid: tuple[float, ...]
    surface: np.ndarray  # surface[i, j] is the exponent at (b1, b2) = (grid[i], grid[j])
    best_split: tuple[float, float]
    best_value: float
    fixed_split: tuple[float, float]
    fixed_value: float

    @property
    def fixed_gap(self) -> float:
        return self.best_value - self.fixed_value


def sweep_power_split(ch: ChannelGains, rates: RatePair, b_grid: Sequence[float],
                      step: float | None = None) -> SplitSweep:
    """Inner-bound exponent over the Cartesian grid of splits, by lattice search.

    The first maximizer in row-major order is reported as the best split.
    """
    grid = tuple(float(b) for b in b_grid)
    if not grid:
        raise ValueError("empty split grid")
    if any(not math.isfinite(b) for b in grid):
        raise ValueError("split grid values must be finite")
    fixed = (ch.beta21, ch.beta12)
    if step is None:
        from .closed_form import detect_grid_step

        step = detect_grid_step(list(ch.as_tuple()) + [rates.r1, rates.r2] + list(grid))
        if step is None:
            raise ValueError("inputs are not aligned to any supported lattice step")
    surface = np.empty((len(grid), len(grid)))
    for i, b1 in enumerate(grid):
        for j, b2 in enumerate(grid):
            surface[i, j] = min_exponent_sum(RegionKind.hk_general((b1, b2)), ch, rates, step).value
    flat = int(np.argmax(surface))
    i, j = divmod(flat, len(grid))
    fixed_value = min_exponent_sum(RegionKind.hk_general(fixed), ch, rates, step).value
    return SplitSweep(grid, surface, (grid[i], grid[j]), float(surface[i, j]), fixed, fixed_value)


def exponent_breakdown(kind: RegionKind, ch: ChannelGains, rates: RatePair, step: float) -> dict[str, float]:
    """Per-constraint lattice minima as plain numbers, in label order where applicable."""
    found = per_constraint_minima(kind, ch, rates, step)
    order = [k for k in LABELS if k in found] + [k for k in found if k not in LABELS]
    return {k: found[k].value for k in order}
