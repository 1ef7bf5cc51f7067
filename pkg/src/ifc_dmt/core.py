"""Domain types and small helpers shared by every other module.

All exponents live on the base-``x`` logarithmic scale: an average received
SNR of ``x**beta`` is stored as ``beta``, a rate ``log(1 + x**r)`` as ``r``.
Diversity values are extended non-negative reals; ``math.inf`` marks a
constraint whose outage event is empty.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

TOL = 1e-9
INF = math.inf

LABELS = ("A", "B", "C", "D", "E", "F", "G")
# Label permutation induced by exchanging the roles of the two users.
SWAP_LABEL = {"A": "B", "B": "A", "C": "D", "D": "C", "E": "E", "F": "G", "G": "F"}


def pos_part(v: float) -> float:
    """Return ``max(0, v)``."""
    return v if v > 0.0 else 0.0


def neg_part(v: float) -> float:
    """Return ``-min(0, v)`` so that ``v == pos_part(v) - neg_part(v)``."""
    return -v if v < 0.0 else 0.0


def _check_nonneg(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < 0.0:
        raise ValueError(f"{name} must be a non-negative real, got {value!r}")
    return value


@dataclass(frozen=True)
class ChannelGains:
    """Average SNR/INR exponents; ``beta_cu`` is the gain from user u to receiver c."""

    beta11: float
    beta12: float
    beta21: float
    beta22: float

    def __post_init__(self) -> None:
        for name in ("beta11", "beta12", "beta21", "beta22"):
            object.__setattr__(self, name, _check_nonneg(name, getattr(self, name)))

    @classmethod
    def symmetric(cls, cross: float, direct: float = 1.0) -> ChannelGains:
        return cls(direct, cross, cross, direct)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.beta11, self.beta12, self.beta21, self.beta22)

    def swapped(self) -> ChannelGains:
        return ChannelGains(self.beta22, self.beta21, self.beta12, self.beta11)

    @property
    def total(self) -> float:
        return self.beta11 + self.beta12 + self.beta21 + self.beta22

    @property
    def is_symmetric(self) -> bool:
        return abs(self.beta11 - self.beta22) <= TOL and abs(self.beta12 - self.beta21) <= TOL


@dataclass(frozen=True)
class RatePair:
    """Multiplexing gains of the two users."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "r1", _check_nonneg("r1", self.r1))
        object.__setattr__(self, "r2", _check_nonneg("r2", self.r2))

    @property
    def rs(self) -> float:
        return self.r1 + self.r2

    @property
    def rf(self) -> float:
        return 2.0 * self.r1 + self.r2

    @property
    def rg(self) -> float:
        return self.r1 + 2.0 * self.r2

    def swapped(self) -> RatePair:
        return RatePair(self.r2, self.r1)

    def as_tuple(self) -> tuple[float, float]:
        return (self.r1, self.r2)

    def lhs(self, label: str) -> float:
        """Rate combination bounded by the constraint with this label."""
        return {
            "A": self.r1,
            "B": self.r2,
            "C": self.rs,
            "D": self.rs,
            "E": self.rs,
            "F": self.rf,
            "G": self.rg,
        }[label]


class SplitMode(enum.Enum):
    FIXED = "fixed"
    ALL_PRIVATE = "private"
    ALL_COMMON = "common"
    GENERAL = "general"


@dataclass(frozen=True)
class PowerSplit:
    """Private/common power split.

    The private fraction of user u is ``1 / (1 + x**b_u)``, so the private
    part is received ``[b_u]+`` below the full power and the common part
    ``[-b_u]+`` below it.
    """

    mode: SplitMode = SplitMode.FIXED
    b1: float | None = None
    b2: float | None = None

    def __post_init__(self) -> None:
        if self.mode is SplitMode.GENERAL:
            if self.b1 is None or self.b2 is None:
                raise ValueError("a general power split needs both b1 and b2")
            for name in ("b1", "b2"):
                v = float(getattr(self, name))
                if not math.isfinite(v):
                    raise ValueError(f"{name} must be finite, got {v!r}")
                object.__setattr__(self, name, v)

    @classmethod
    def general(cls, b1: float, b2: float) -> PowerSplit:
        return cls(SplitMode.GENERAL, b1, b2)

    @classmethod
    def fixed(cls) -> PowerSplit:
        return cls(SplitMode.FIXED)

    def resolve(self, ch: ChannelGains) -> tuple[float, float]:
        """Concrete ``(b1, b2)``; no-split modes map to +-inf."""
        if self.mode is SplitMode.FIXED:
            return (ch.beta21, ch.beta12)
        if self.mode is SplitMode.ALL_PRIVATE:
            return (-INF, -INF)
        if self.mode is SplitMode.ALL_COMMON:
            return (INF, INF)
        return (self.b1, self.b2)  # type: ignore[return-value]


@dataclass(frozen=True)
class FadingExponents:
    """Per-realization fading exponents; ``|H_ij|^2 = E|H_ij|^2 * x**(-g_ij)``."""

    g11: float
    g12: float
    g21: float
    g22: float

    def __post_init__(self) -> None:
        for name in ("g11", "g12", "g21", "g22"):
            object.__setattr__(self, name, _check_nonneg(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g11, self.g12, self.g21, self.g22)

    @property
    def total(self) -> float:
        return self.g11 + self.g12 + self.g21 + self.g22

    def swapped(self) -> FadingExponents:
        return FadingExponents(self.g22, self.g21, self.g12, self.g11)


@dataclass(frozen=True)
class DiversityBreakdown:
    """Per-constraint exponents of one bound family and their minimum."""

    per_constraint: Mapping[str, float]
    overall: float = field(init=False)
    binding: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        values = dict(self.per_constraint)
        for label, v in values.items():
            if not v >= -TOL:
                raise ValueError(f"negative exponent {v!r} for constraint {label}")
        object.__setattr__(self, "per_constraint", values)
        overall = min(values.values()) if values else INF
        object.__setattr__(self, "overall", overall)
        binding = frozenset(k for k, v in values.items() if v - overall <= TOL) if math.isfinite(overall) else frozenset(
            k for k, v in values.items() if v == overall
        )
        object.__setattr__(self, "binding", binding)

    def __getitem__(self, label: str) -> float:
        return self.per_constraint[label]

    def swapped(self) -> DiversityBreakdown:
        return DiversityBreakdown({SWAP_LABEL[k]: v for k, v in self.per_constraint.items()})


class Regime(enum.Enum):
    WEAK = "weak"
    MIXED = "mixed"
    STRONG = "strong"
    VERY_STRONG = "very-strong"


def classify_regime(ch: ChannelGains) -> Regime:
    if min(ch.beta12, ch.beta21) >= ch.beta11 + ch.beta22:
        return Regime.VERY_STRONG
    if ch.beta12 >= ch.beta22 and ch.beta21 >= ch.beta11:
        return Regime.STRONG
    if ch.beta12 < ch.beta22 and ch.beta21 < ch.beta11:
        return Regime.WEAK
    return Regime.MIXED


def close(a: float, b: float, tol: float = TOL) -> bool:
    """Equality of extended reals up to the absolute tolerance."""
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol
