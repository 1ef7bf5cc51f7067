"""Exact continuous piecewise-linear functions of one variable on a closed interval.

Every operation keeps the representation exact: sums and scalings merge the
breakpoint sets, and ``min``/``max`` insert the crossing point wherever the
two operands swap order between consecutive breakpoints.  The minimum of the
result is therefore attained at one of the stored breakpoints.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

Number = Union[int, float]
_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class PiecewiseLinear:
    """Breakpoints ``xs`` (strictly increasing) and values ``ys``, linear in between.

    Stored as tuples of floats: the functions built here have a handful of
    breakpoints, where plain Python beats numpy's per-call overhead.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self) -> None:
        xs = tuple(float(v) for v in np.ravel(self.xs))
        ys = tuple(float(v) for v in np.ravel(self.ys))
        if len(xs) != len(ys) or not xs:
            raise ValueError("breakpoints and values must be equal-length 1-D sequences")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def _raw(cls, xs: list[float], ys: list[float]) -> PiecewiseLinear:
        out = object.__new__(cls)
        object.__setattr__(out, "xs", tuple(xs))
        object.__setattr__(out, "ys", tuple(ys))
        return out

    @classmethod
    def affine(cls, intercept: Number, slope: Number, lo: Number = 0.0, hi: Number = 1.0) -> PiecewiseLinear:
        """``intercept + slope * t`` on ``[lo, hi]``."""
        lo, hi, intercept, slope = float(lo), float(hi), float(intercept), float(slope)
        if hi < lo:
            raise ValueError("empty domain")
        if hi == lo:
            return cls._raw([lo], [intercept + slope * lo])
        return cls._raw([lo, hi], [intercept + slope * lo, intercept + slope * hi])

    @classmethod
    def constant(cls, value: Number, lo: Number = 0.0, hi: Number = 1.0) -> PiecewiseLinear:
        return cls.affine(value, 0.0, lo, hi)

    @property
    def lo(self) -> float:
        return self.xs[0]

    @property
    def hi(self) -> float:
        return self.xs[-1]

    def _at(self, t: float) -> float:
        xs, ys = self.xs, self.ys
        if t <= xs[0]:
            return ys[0]
        if t >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, t)
        x0, x1 = xs[i - 1], xs[i]
        return ys[i - 1] + (ys[i] - ys[i - 1]) * (t - x0) / (x1 - x0)

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self._at(float(t))
        return np.interp(t, self.xs, self.ys)

    def _lift(self, other: PiecewiseLinear | Number) -> PiecewiseLinear:
        if isinstance(other, PiecewiseLinear):
            if abs(other.lo - self.lo) > _MERGE_TOL or abs(other.hi - self.hi) > _MERGE_TOL:
                raise ValueError("operands live on different domains")
            return other
        return PiecewiseLinear.constant(float(other), self.lo, self.hi)

    def _merged(self, other: PiecewiseLinear) -> tuple[list[float], list[float], list[float]]:
        xs = _unique_sorted(self.xs + other.xs)
        return xs, [self._at(x) for x in xs], [other._at(x) for x in xs]

    def __add__(self, other: PiecewiseLinear | Number) -> PiecewiseLinear:
        if not isinstance(other, PiecewiseLinear):
            k = float(other)
            return PiecewiseLinear._raw(list(self.xs), [y + k for y in self.ys])
        other = self._lift(other)
        xs, a, b = self._merged(other)
        return PiecewiseLinear._raw(xs, [u + v for u, v in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> PiecewiseLinear:
        return PiecewiseLinear._raw(list(self.xs), [-y for y in self.ys])

    def __sub__(self, other: PiecewiseLinear | Number) -> PiecewiseLinear:
        return self + (-self._lift(other))

    def __rsub__(self, other: Number) -> PiecewiseLinear:
        return (-self) + other

    def __mul__(self, k: Number) -> PiecewiseLinear:
        k = float(k)
        return PiecewiseLinear._raw(list(self.xs), [y * k for y in self.ys])

    __rmul__ = __mul__

    def __truediv__(self, k: Number) -> PiecewiseLinear:
        k = float(k)
        return PiecewiseLinear._raw(list(self.xs), [y / k for y in self.ys])

    def _select(self, other: PiecewiseLinear | Number, pick: Callable[[float, float], float]) -> PiecewiseLinear:
        other = self._lift(other)
        xs, a, b = self._merged(other)
        out_x: list[float] = [xs[0]]
        out_y: list[float] = [pick(a[0], b[0])]
        for i in range(len(xs) - 1):
            d0, d1 = a[i] - b[i], a[i + 1] - b[i + 1]
            if d0 * d1 < 0:
                t = xs[i] + d0 / (d0 - d1) * (xs[i + 1] - xs[i])
                if t - out_x[-1] > _MERGE_TOL and xs[i + 1] - t > _MERGE_TOL:
                    out_x.append(t)
                    out_y.append(self._at(t))
            out_x.append(xs[i + 1])
            out_y.append(pick(a[i + 1], b[i + 1]))
        return PiecewiseLinear._raw(out_x, out_y)

    def minimum(self, other: PiecewiseLinear | Number) -> PiecewiseLinear:
        return self._select(other, min)

    def maximum(self, other: PiecewiseLinear | Number) -> PiecewiseLinear:
        return self._select(other, max)

    def pos(self) -> PiecewiseLinear:
        return self.maximum(0.0)

    def argmin(self) -> tuple[float, float]:
        """Leftmost minimizer and the minimum value."""
        i = min(range(len(self.ys)), key=self.ys.__getitem__)
        return self.xs[i], self.ys[i]

    def argmax(self) -> tuple[float, float]:
        i = max(range(len(self.ys)), key=self.ys.__getitem__)
        return self.xs[i], self.ys[i]


def _unique_sorted(xs) -> list[float]:
    out: list[float] = []
    for x in sorted(xs):
        if not out or x - out[-1] > _MERGE_TOL:
            out.append(x)
    return out


def variable(lo: Number = 0.0, hi: Number = 1.0) -> PiecewiseLinear:
    """The identity function ``t -> t`` on ``[lo, hi]``."""
    return PiecewiseLinear.affine(0.0, 1.0, lo, hi)


def pmin(*terms: PiecewiseLinear | Number) -> PiecewiseLinear:
    out = _first_function(terms)
    for t in terms:
        out = out.minimum(t)
    return out


def pmax(*terms: PiecewiseLinear | Number) -> PiecewiseLinear:
    out = _first_function(terms)
    for t in terms:
        out = out.maximum(t)
    return out


def _first_function(terms) -> PiecewiseLinear:
    for t in terms:
        if isinstance(t, PiecewiseLinear):
            return t
    raise TypeError("at least one operand must be a PiecewiseLinear")


def minimize_piecewise_linear(
    objective: PiecewiseLinear | Callable[[PiecewiseLinear], PiecewiseLinear],
    lo: Number = 0.0,
    hi: Number = 1.0,
) -> tuple[float, float]:
    """Exact minimum of a piecewise-linear function over ``[lo, hi]``.

    ``objective`` is either an already-built function or a builder that
    receives the identity variable and composes affine maps, ``pos``,
    ``minimum`` and ``maximum`` on it.  Returns ``(argmin, min)`` with the
    leftmost minimizer; a constant function yields ``(lo, value)``.
    """
    fn = objective if isinstance(objective, PiecewiseLinear) else objective(variable(lo, hi))
    if not isinstance(fn, PiecewiseLinear):
        fn = PiecewiseLinear.constant(float(fn), lo, hi)
    return fn.argmin()
