"""Membership predicates for the finite-SNR and large-SNR rate regions.

Every region is a list of constraints ``lhs(rates) <= rhs(fading)``.  The
large-SNR constraints are stored as :class:`Constraint` records so that the
brute-force search in :mod:`ifc_dmt.oracle` can evaluate them on whole
lattices at once; all right-hand sides accept numpy arrays and broadcast.

Two conventions coexist on purpose.  The outer bound clips each link
exponent, ``X = [beta - gamma]+``, before it enters the constraint.  The
rate-splitting inner bounds use the raw difference ``X = beta - gamma`` and
clip at the level of each term instead.  For ``gamma >= 0`` both are
equivalent to clipping, but the expressions are kept in their native form.

Membership is closed: a constraint holds when ``lhs <= rhs + TOL``.  The
outage side is closed as well, ``lhs >= rhs - TOL``, so boundary points
count on both sides; the boundary carries no probability.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import LABELS, TOL, ChannelGains, FadingExponents, PowerSplit, RatePair

# Axis order of a fading-exponent vector.
AXES = ("g11", "g12", "g21", "g22")
G11, G12, G21, G22 = range(4)
_AXIS_SWAP = (G22, G21, G12, G11)


class RegionFamily(enum.Enum):
    ETW_FINITE = "etw-finite"
    HK_FINITE = "hk-finite"
    ETW_ASYMPTOTIC = "etw"
    HK_FIXED_ASYMPTOTIC = "hk-fixed"
    HK_GENERAL_ASYMPTOTIC = "hk-general"
    TREAT_AS_NOISE = "treat-as-noise"
    MAC_AT = "mac"
    PRIOR_SYMMETRIC = "prior-symmetric"


@dataclass(frozen=True)
class RegionKind:
    """A region family plus the parameter it needs, if any.

    ``index`` is the user for treat-as-noise and the receiver for the MAC
    region.  ``split`` is the concrete ``(b1, b2)`` of the general split.
    ``as_printed`` selects the literal offset placement of the general-split
    expressions, kept only for comparison (see :func:`hk_general_rhs`).
    """

    family: RegionFamily
    index: int | None = None
    split: tuple[float, float] | None = None
    as_printed: bool = False

    def __post_init__(self) -> None:
        if self.family in (RegionFamily.TREAT_AS_NOISE, RegionFamily.MAC_AT) and self.index not in (1, 2):
            raise ValueError(f"{self.family.value} needs index 1 or 2")
        if self.family is RegionFamily.HK_GENERAL_ASYMPTOTIC:
            if self.split is None:
                raise ValueError("the general split region needs a concrete (b1, b2)")
            object.__setattr__(self, "split", (float(self.split[0]), float(self.split[1])))

    @classmethod
    def etw_finite(cls) -> RegionKind:
        return cls(RegionFamily.ETW_FINITE)

    @classmethod
    def hk_finite(cls) -> RegionKind:
        return cls(RegionFamily.HK_FINITE)

    @classmethod
    def etw(cls) -> RegionKind:
        return cls(RegionFamily.ETW_ASYMPTOTIC)

    @classmethod
    def hk_fixed(cls) -> RegionKind:
        return cls(RegionFamily.HK_FIXED_ASYMPTOTIC)

    @classmethod
    def hk_general(cls, split: PowerSplit | tuple[float, float], ch: ChannelGains | None = None,
                   as_printed: bool = False) -> RegionKind:
        if isinstance(split, PowerSplit):
            if ch is None:
                raise ValueError("resolving a PowerSplit needs the channel gains")
            split = split.resolve(ch)
        return cls(RegionFamily.HK_GENERAL_ASYMPTOTIC, split=tuple(split), as_printed=as_printed)

    @classmethod
    def treat_as_noise(cls, user: int) -> RegionKind:
        return cls(RegionFamily.TREAT_AS_NOISE, index=user)

    @classmethod
    def mac_at(cls, receiver: int) -> RegionKind:
        return cls(RegionFamily.MAC_AT, index=receiver)

    @classmethod
    def prior_symmetric(cls) -> RegionKind:
        return cls(RegionFamily.PRIOR_SYMMETRIC)

    @property
    def is_finite(self) -> bool:
        return self.family in (RegionFamily.ETW_FINITE, RegionFamily.HK_FINITE)


@dataclass(frozen=True)
class FiniteFadingSample:
    """Received powers ``S_cu = x**beta_cu * E_cu`` of one fading block (linear scale)."""

    s11: float
    s12: float
    s21: float
    s22: float

    def __post_init__(self) -> None:
        for name in ("s11", "s12", "s21", "s22"):
            v = float(getattr(self, name))
            if math.isnan(v) or v < 0.0:
                raise ValueError(f"{name} must be non-negative, got {v!r}")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.s11, self.s12, self.s21, self.s22)


# ---------------------------------------------------------------------------
# finite SNR


def _log_rates(rates: RatePair, x: float) -> tuple[float, float]:
    if not x > 1.0:
        raise ValueError(f"the SNR scale x must exceed 1, got {x!r}")
    return math.log1p(x ** rates.r1), math.log1p(x ** rates.r2)


def _finite_lhs(rates: RatePair, x: float) -> np.ndarray:
    r1, r2 = _log_rates(rates, x)
    return np.array([r1, r2, r1 + r2, r1 + r2, r1 + r2, 2 * r1 + r2, r1 + 2 * r2])


def etw_finite_rhs(s11, s12, s21, s22) -> np.ndarray:
    """Right-hand sides of the seven outer-bound inequalities, stacked on axis 0."""
    s11, s12, s21, s22 = (np.asarray(s, dtype=float) for s in (s11, s12, s21, s22))
    own1 = np.log1p(s11 / (1.0 + s21))
    own2 = np.log1p(s22 / (1.0 + s12))
    mac1 = np.log1p(s11 + s12)
    mac2 = np.log1p(s22 + s21)
    mix1 = np.log1p(s12 + s11 / (1.0 + s21))
    mix2 = np.log1p(s21 + s22 / (1.0 + s12))
    return np.stack([
        np.log1p(s11),
        np.log1p(s22),
        own1 + mac2,
        own2 + mac1,
        mix1 + mix2,
        own1 + mac1 + mix2,
        own2 + mac2 + mix1,
    ])


def hk_finite_rhs(s11, s12, s21, s22, ch: ChannelGains, x: float) -> np.ndarray:
    """Right-hand sides of the seven inner-bound inequalities with split ``b1=beta21, b2=beta12``."""
    s11, s12, s21, s22 = (np.asarray(s, dtype=float) for s in (s11, s12, s21, s22))
    priv1 = 1.0 + x ** ch.beta21   # 1 + x^{+b1}
    priv2 = 1.0 + x ** ch.beta12   # 1 + x^{+b2}
    comm1 = 1.0 + x ** -ch.beta21  # 1 + x^{-b1}
    comm2 = 1.0 + x ** -ch.beta12  # 1 + x^{-b2}
    noise1 = 1.0 + s12 / priv2
    noise2 = 1.0 + s21 / priv1
    single1 = np.log1p(s11 / noise1)
    single2 = np.log1p(s22 / noise2)
    joint1 = np.log1p((s11 + s12 / comm2) / noise1)
    joint2 = np.log1p((s22 + s21 / comm1) / noise2)
    private1 = np.log1p((s11 / priv1) / noise1)
    private2 = np.log1p((s22 / priv2) / noise2)
    cross1 = np.log1p((s11 / priv1 + s12 / comm2) / noise1)
    cross2 = np.log1p((s22 / priv2 + s21 / comm1) / noise2)
    return np.stack([
        single1,
        single2,
        joint2 + private1,
        joint1 + private2,
        cross1 + cross2,
        joint1 + private1 + cross2,
        joint2 + private2 + cross1,
    ])


def finite_violations(kind: RegionKind, s11, s12, s21, s22, ch: ChannelGains, rates: RatePair,
                      x: float) -> np.ndarray:
    """Boolean array ``(7, ...)``: constraint k fails (strictly, beyond TOL) for each sample."""
    lhs = _finite_lhs(rates, x)
    if kind.family is RegionFamily.ETW_FINITE:
        rhs = etw_finite_rhs(s11, s12, s21, s22)
    elif kind.family is RegionFamily.HK_FINITE:
        rhs = hk_finite_rhs(s11, s12, s21, s22, ch, x)
    else:
        raise ValueError(f"{kind.family.value} is not a finite-SNR region")
    lhs = lhs.reshape((7,) + (1,) * (rhs.ndim - 1))
    return lhs > rhs + TOL


def in_finite_region(kind: RegionKind, s11, s12, s21, s22, ch: ChannelGains, rates: RatePair,
                     x: float) -> np.ndarray:
    """Vectorized membership over arrays of received powers."""
    return ~np.any(finite_violations(kind, s11, s12, s21, s22, ch, rates, x), axis=0)


def in_etw_finite(sample: FiniteFadingSample, ch: ChannelGains, rates: RatePair, x: float) -> bool:
    return bool(in_finite_region(RegionKind.etw_finite(), *sample.as_tuple(), ch, rates, x))


def in_hk_finite(sample: FiniteFadingSample, ch: ChannelGains, rates: RatePair, x: float) -> bool:
    return bool(in_finite_region(RegionKind.hk_finite(), *sample.as_tuple(), ch, rates, x))


# ---------------------------------------------------------------------------
# large SNR

RhsFn = Callable[..., np.ndarray]


@dataclass(frozen=True)
class Constraint:
    """One asymptotic constraint ``c1*r1 + c2*r2 <= rhs(g11, g12, g21, g22)``.

    ``axes`` lists the fading exponents the right-hand side depends on.
    ``monotone_axis`` is an axis along which the right-hand side is
    non-increasing in gamma, so the outage set is upward closed along it.
    """

    label: str
    c1: int
    c2: int
    axes: tuple[int, ...]
    monotone_axis: int
    rhs: RhsFn

    def lhs(self, rates: RatePair) -> float:
        return self.c1 * rates.r1 + self.c2 * rates.r2

    def violated(self, g, rates: RatePair):
        """Outage test with the closed boundary convention."""
        return self.lhs(rates) >= self.rhs(*g) - TOL

    def satisfied(self, g, rates: RatePair):
        return self.lhs(rates) <= self.rhs(*g) + TOL


_P = lambda v: np.maximum(v, 0.0)  # noqa: E731
_MX = np.maximum

_RATE_COEFFS = {"A": (1, 0), "B": (0, 1), "C": (1, 1), "D": (1, 1), "E": (1, 1), "F": (2, 1), "G": (1, 2)}
_FULL_AXES = {
    "A": (G11,), "B": (G22,), "C": (G11, G21, G22), "D": (G11, G12, G22),
    "E": (G11, G12, G21, G22), "F": (G11, G12, G21, G22), "G": (G11, G12, G21, G22),
}


def _build(rhs_by_label: dict[str, RhsFn], axes_by_label: dict[str, tuple[int, ...]]) -> tuple[Constraint, ...]:
    out = []
    for label in LABELS:
        axes = axes_by_label[label]
        mono = G11 if G11 in axes else G22
        c1, c2 = _RATE_COEFFS[label]
        out.append(Constraint(label, c1, c2, axes, mono, rhs_by_label[label]))
    return tuple(out)


def etw_constraints(ch: ChannelGains) -> tuple[Constraint, ...]:
    b11, b12, b21, b22 = ch.as_tuple()

    def xs(g11, g12, g21, g22):
        return _P(b11 - g11), _P(b12 - g12), _P(b21 - g21), _P(b22 - g22)

    def a(*g):
        return xs(*g)[0]

    def b(*g):
        return xs(*g)[3]

    def c(*g):
        x11, _, x21, x22 = xs(*g)
        return _P(x11 - x21) + _MX(x21, x22)

    def d(*g):
        x11, x12, _, x22 = xs(*g)
        return _P(x22 - x12) + _MX(x12, x11)

    def e(*g):
        x11, x12, x21, x22 = xs(*g)
        return _MX(x12, x11 - x21) + _MX(x21, x22 - x12)

    def f(*g):
        x11, x12, x21, x22 = xs(*g)
        return _P(x11 - x21) + _MX(x11, x12) + _MX(x21, x22 - x12)

    def gg(*g):
        x11, x12, x21, x22 = xs(*g)
        return _P(x22 - x12) + _MX(x22, x21) + _MX(x12, x11 - x21)

    return _build(dict(A=a, B=b, C=c, D=d, E=e, F=f, G=gg), _FULL_AXES)


def hk_fixed_constraints(ch: ChannelGains) -> tuple[Constraint, ...]:
    b11, b12, b21, b22 = ch.as_tuple()

    def xs(g11, g12, g21, g22):
        return b11 - g11, b12 - g12, b21 - g21, b22 - g22

    def a(*g):
        return _P(xs(*g)[0])

    def b(*g):
        return _P(xs(*g)[3])

    def c(*g):
        x11, _, x21, x22 = xs(*g)
        return _P(_MX(x22, x21)) + _P(x11 - b21)

    def d(*g):
        x11, x12, _, x22 = xs(*g)
        return _P(_MX(x11, x12)) + _P(x22 - b12)

    def e(*g):
        x11, x12, x21, x22 = xs(*g)
        return _P(_MX(x11 - b21, x12)) + _P(_MX(x22 - b12, x21))

    def f(*g):
        x11, x12, x21, x22 = xs(*g)
        return _P(_MX(x11, x12)) + _P(x11 - b21) + _P(_MX(x22 - b12, x21))

    def gg(*g):
        x11, x12, x21, x22 = xs(*g)
        return _P(_MX(x22, x21)) + _P(x22 - b12) + _P(_MX(x11 - b21, x12))

    return _build(dict(A=a, B=b, C=c, D=d, E=e, F=f, G=gg), _FULL_AXES)


_GENERAL_AXES = {
    "A": (G11, G12), "B": (G21, G22), "C": (G11, G12, G21, G22), "D": (G11, G12, G21, G22),
    "E": (G11, G12, G21, G22), "F": (G11, G12, G21, G22), "G": (G11, G12, G21, G22),
}


def hk_general_constraints(ch: ChannelGains, split: tuple[float, float],
                           as_printed: bool = False) -> tuple[Constraint, ...]:
    """Constraints of the inner bound with an arbitrary power split ``(b1, b2)``.

    User u's private part arrives ``[b_u]+`` below its full power and its
    common part ``[-b_u]+`` below it.  Private interference is subtracted as
    noise, common interference is decoded.  With ``as_printed`` the two
    offsets are exchanged wherever the alternative typeset form places
    them, which does not reduce to the fixed split; it is kept only so the
    two readings can be compared.
    """
    b11, b12, b21, b22 = ch.as_tuple()
    b1, b2 = split
    p1, p2 = max(b1, 0.0), max(b2, 0.0)
    c1, c2 = max(-b1, 0.0), max(-b2, 0.0)

    def xs(g11, g12, g21, g22):
        return b11 - g11, b12 - g12, b21 - g21, b22 - g22

    if not as_printed:
        def a(*g):
            x11, x12, _, _ = xs(*g)
            return _P(_P(x11) - _P(x12 - p2))

        def b(*g):
            _, _, x21, x22 = xs(*g)
            return _P(_P(x22) - _P(x21 - p1))

        def c(*g):
            x11, x12, x21, x22 = xs(*g)
            return _P(_MX(_P(x22), _P(x21 - c1)) - _P(x21 - p1)) + _P(x11 - p1 - _P(x12 - p2))

        def d(*g):
            x11, x12, x21, x22 = xs(*g)
            return _P(_MX(_P(x11), _P(x12 - c2)) - _P(x12 - p2)) + _P(x22 - p2 - _P(x21 - p1))

        def e(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x11 - p1, x12 - c2) - _P(x12 - p2))
                    + _P(_MX(x22 - p2, x21 - c1) - _P(x21 - p1)))

        def f(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x11, x12 - c2) - _P(x12 - p2))
                    + _P(x11 - p1 - _P(x12 - p2))
                    + _P(_MX(x22 - p2, x21 - c1) - _P(x21 - p1)))

        def gg(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x22, x21 - c1) - _P(x21 - p1))
                    + _P(x22 - p2 - _P(x21 - p1))
                    + _P(_MX(x11 - p1, x12 - c2) - _P(x12 - p2)))
    else:
        def a(*g):
            x11, x12, _, _ = xs(*g)
            return _P(_P(x11) - _P(x12 - c2))

        def b(*g):
            _, _, x21, x22 = xs(*g)
            return _P(_P(x22) - _P(x21 - c1))

        def c(*g):
            x11, x12, x21, x22 = xs(*g)
            return _P(_MX(_P(x22), _P(x21 - p1)) - _P(x21 - c1)) + _P(x11 - p1 - _P(x12 - p2))

        def d(*g):
            x11, x12, x21, x22 = xs(*g)
            return _P(_MX(_P(x11), _P(x12 - p2)) - _P(x12 - c2)) + _P(x22 - p2 - _P(x21 - p1))

        def e(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x11 - c1, x12 - p2) - _P(x12 - c2))
                    + _P(_MX(x22 - c2, x21 - p1) - _P(x21 - c1)))

        def f(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x11, x12 - p2) - _P(x12 - c2))
                    + _P(x11 - c1 - _P(x12 - c2))
                    + _P(_MX(x22 - c2, x21 - p1) - _P(x21 - c1)))

        def gg(*g):
            x11, x12, x21, x22 = xs(*g)
            return (_P(_MX(x22, x21 - p1) - _P(x21 - c1))
                    + _P(x22 - c2 - _P(x21 - c1))
                    + _P(_MX(x11 - c1, x12 - p2) - _P(x12 - c2)))

    return _build(dict(A=a, B=b, C=c, D=d, E=e, F=f, G=gg), _GENERAL_AXES)


def treat_as_noise_constraints(ch: ChannelGains, user: int) -> tuple[Constraint, ...]:
    b11, b12, b21, b22 = ch.as_tuple()
    if user == 1:
        def rhs(g11, g12, g21, g22):
            return _P(_P(b11 - g11) - _P(b12 - g12))
        return (Constraint("NI1", 1, 0, (G11, G12), G11, rhs),)

    def rhs2(g11, g12, g21, g22):
        return _P(_P(b22 - g22) - _P(b21 - g21))
    return (Constraint("NI2", 0, 1, (G21, G22), G22, rhs2),)


def mac_constraints(ch: ChannelGains, receiver: int) -> tuple[Constraint, ...]:
    b11, b12, b21, b22 = ch.as_tuple()
    if receiver == 1:
        def own(g11, g12, g21, g22):
            return _P(b11 - g11)

        def other(g11, g12, g21, g22):
            return _P(b12 - g12)

        def both(g11, g12, g21, g22):
            return _MX(_P(b11 - g11), _P(b12 - g12))
        return (
            Constraint("MAC1-r1", 1, 0, (G11,), G11, own),
            Constraint("MAC1-r2", 0, 1, (G12,), G12, other),
            Constraint("MAC1-rs", 1, 1, (G11, G12), G11, both),
        )

    def other2(g11, g12, g21, g22):
        return _P(b21 - g21)

    def own2(g11, g12, g21, g22):
        return _P(b22 - g22)

    def both2(g11, g12, g21, g22):
        return _MX(_P(b21 - g21), _P(b22 - g22))
    return (
        Constraint("MAC2-r1", 1, 0, (G21,), G21, other2),
        Constraint("MAC2-r2", 0, 1, (G22,), G22, own2),
        Constraint("MAC2-rs", 1, 1, (G21, G22), G22, both2),
    )


def prior_symmetric_constraints(ch: ChannelGains) -> tuple[Constraint, ...]:
    """The single ``2*r1 + r2`` constraint of the earlier published exponent.

    Only defined for unit direct gains and equal cross gains ``alpha``.
    """
    if abs(ch.beta11 - 1.0) > TOL or abs(ch.beta22 - 1.0) > TOL or abs(ch.beta12 - ch.beta21) > TOL:
        raise ValueError("this constraint is defined for beta = (1, alpha, alpha, 1) only")
    alpha = ch.beta12

    def rhs(g11, g12, g21, g22):
        own1 = _P(1.0 - g11)
        own2 = _P(1.0 - g22)
        int12 = _P(alpha - g12)
        int21 = _P(alpha - g21)
        return _P(own1 - int12) + _MX(own1, int21) + _MX(int12, own2 - int21)

    return (Constraint("F", 2, 1, (G11, G12, G21, G22), G11, rhs),)


def constraints_for(kind: RegionKind, ch: ChannelGains) -> tuple[Constraint, ...]:
    fam = kind.family
    if fam is RegionFamily.ETW_ASYMPTOTIC:
        return etw_constraints(ch)
    if fam is RegionFamily.HK_FIXED_ASYMPTOTIC:
        return hk_fixed_constraints(ch)
    if fam is RegionFamily.HK_GENERAL_ASYMPTOTIC:
        return hk_general_constraints(ch, kind.split, kind.as_printed)  # type: ignore[arg-type]
    if fam is RegionFamily.TREAT_AS_NOISE:
        return treat_as_noise_constraints(ch, kind.index)  # type: ignore[arg-type]
    if fam is RegionFamily.MAC_AT:
        return mac_constraints(ch, kind.index)  # type: ignore[arg-type]
    if fam is RegionFamily.PRIOR_SYMMETRIC:
        return prior_symmetric_constraints(ch)
    raise ValueError(f"{fam.value} has no large-SNR constraint set")


def _g(g: FadingExponents | Sequence[float]) -> tuple[float, ...]:
    return g.as_tuple() if isinstance(g, FadingExponents) else tuple(float(v) for v in g)


def in_asymptotic_region(kind: RegionKind, g: FadingExponents | Sequence[float], ch: ChannelGains,
                         rates: RatePair) -> bool:
    gv = _g(g)
    return all(bool(c.satisfied(gv, rates)) for c in constraints_for(kind, ch))


def violated_constraints(kind: RegionKind, g: FadingExponents | Sequence[float], ch: ChannelGains,
                         rates: RatePair) -> list[str]:
    """Labels of the constraints whose outage test fires at ``g`` (closed convention)."""
    gv = _g(g)
    return [c.label for c in constraints_for(kind, ch) if bool(c.violated(gv, rates))]


def in_etw_asymptotic(g: FadingExponents, ch: ChannelGains, rates: RatePair) -> bool:
    return in_asymptotic_region(RegionKind.etw(), g, ch, rates)


def in_hk_fixed_asymptotic(g: FadingExponents, ch: ChannelGains, rates: RatePair) -> bool:
    return in_asymptotic_region(RegionKind.hk_fixed(), g, ch, rates)


def in_hk_general_asymptotic(g: FadingExponents, ch: ChannelGains, rates: RatePair,
                             split: tuple[float, float] | PowerSplit) -> bool:
    return in_asymptotic_region(RegionKind.hk_general(split, ch), g, ch, rates)


def in_simple_region(g: FadingExponents, ch: ChannelGains, rates: RatePair, kind: RegionKind) -> bool:
    if kind.family not in (RegionFamily.TREAT_AS_NOISE, RegionFamily.MAC_AT, RegionFamily.PRIOR_SYMMETRIC):
        raise ValueError(f"{kind.family.value} is not one of the simple regions")
    return in_asymptotic_region(kind, g, ch, rates)


def swap_fading(g: Sequence[float]) -> tuple[float, ...]:
    """Exchange the user roles in a fading vector."""
    return tuple(g[i] for i in _AXIS_SWAP)
