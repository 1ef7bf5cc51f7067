"""Closed-form diversity exponents of the outer bound and the inner bounds.

Every per-constraint exponent is the minimum of ``g11+g12+g21+g22`` over
the fading exponents that violate that constraint.  The formulas here are
independent of the lattice search in :mod:`ifc_dmt.oracle`; the test-suite
checks one against the other.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .core import (
    INF,
    LABELS,
    SWAP_LABEL,
    TOL,
    ChannelGains,
    DiversityBreakdown,
    PowerSplit,
    RatePair,
    SplitMode,
    pos_part,
)
from .piecewise import PiecewiseLinear, minimize_piecewise_linear, pmin, variable

log = logging.getLogger(__name__)

P = pos_part


def _per_label_swap(values: Mapping[str, float]) -> dict[str, float]:
    return {SWAP_LABEL[k]: v for k, v in values.items()}


# ---------------------------------------------------------------------------
# outer bound


def _sum_rate_exponent(b11: float, b22: float, cross: float, rs: float) -> float:
    first = P(b11 - rs) + P(b22 - rs) + P(cross - rs)
    second = b11 + b22 - 2.0 * rs + abs(cross - rs)
    return max(first, second, 0.0)


def etw_weighted_exponent(ch: ChannelGains, rf: float) -> float:
    """Exponent of the outer-bound constraint on ``2*r1 + r2`` with budget ``rf``.

    With ``X, W, Y, Z`` the clipped exponents of links 11, 12, 21, 22, the
    constraint is equivalent to the linear system
    ``X+Z-Y, X+Z-W, 2X+Z, X+Y, X+W, Z, Y+W`` all ``<= rf`` together with
    ``2X <= rf + Y + W - Z``.  Fixing ``M = max(Y, W)`` and
    ``m = min(Y, W)`` the best completion is explicit, leaving a concave
    piecewise-linear function of ``M`` that is maximized exactly.
    """
    b11, b12, b21, b22 = ch.as_tuple()
    if rf < 0.0:
        raise ValueError("rate budget must be non-negative")
    lo_cross, hi_cross = min(b21, b12), max(b21, b12)
    z_cap = min(b22, rf)
    big = variable(0.0, min(hi_cross, rf))
    small = pmin(big, lo_cross, rf - big)
    x_cap = pmin(rf - big, min(b11, rf / 2.0))
    best = small + big + pmin(rf + small, x_cap + z_cap, (small + big + (rf + z_cap)) / 2.0)
    _, top = best.argmax()
    return max(ch.total - top, 0.0)


def etw_weighted_exponent_printed(ch: ChannelGains, rf: float) -> float:
    """Alternative published expression for the same exponent.

    It drops four of the linear inequalities above and therefore can
    under-estimate the exponent; kept for comparison only.
    """
    b11, b12, b21, b22 = ch.as_tuple()
    a = P(b21 + b12 - rf)
    b = P(b22 - rf)
    return P(b11 - (rf - P(b22 - (b21 + b12) + a - b)) / 2.0) + a + b


def d_etw(ch: ChannelGains, rates: RatePair) -> DiversityBreakdown:
    b11, b12, b21, b22 = ch.as_tuple()
    rs = rates.rs
    values = {
        "A": P(b11 - rates.r1),
        "B": P(b22 - rates.r2),
        "C": _sum_rate_exponent(b11, b22, b21, rs),
        "D": _sum_rate_exponent(b11, b22, b12, rs),
        "E": _sum_rate_exponent(b11, b22, b21 + b12, rs),
        "F": etw_weighted_exponent(ch, rates.rf),
        "G": etw_weighted_exponent(ch.swapped(), rates.rg),
    }
    return DiversityBreakdown(values)


def etw_symmetric_sum_rate(alpha: float, r: float) -> float:
    """Sum-rate exponent of the outer bound for ``beta = (1, alpha, alpha, 1)``, ``r1 = r2 = r``.

    Written as ``2([A]+ + [B]+ + [[B]- - [A]-]+)`` with ``A = 1-2r``,
    ``B = alpha/2 - r`` and ``[v]- = -min(0, v)``.
    """
    a = 1.0 - 2.0 * r
    b = alpha / 2.0 - r
    neg = lambda v: -min(0.0, v)  # noqa: E731
    return 2.0 * (P(a) + P(b) + P(neg(b) - neg(a)))


# ---------------------------------------------------------------------------
# inner bound without rate splitting


@dataclass(frozen=True)
class WorsBreakdown:
    """Exponents of the four no-split strategies and their best combination.

    ``d10`` is user 1 private-only with user 2 common-only.
    """

    ni1: float
    ni2: float
    mac1: float
    mac2: float
    d00: float
    d01: float
    d10: float
    d11: float
    overall: float

    def swapped(self) -> WorsBreakdown:
        return WorsBreakdown(self.ni2, self.ni1, self.mac2, self.mac1, self.d00, self.d10, self.d01,
                             self.d11, self.overall)


def d_ni(ch: ChannelGains, rates: RatePair, user: int) -> float:
    if user == 1:
        return P(ch.beta11 - rates.r1 - ch.beta12)
    if user == 2:
        return P(ch.beta22 - rates.r2 - ch.beta21)
    raise ValueError("user must be 1 or 2")


def d_mac(ch: ChannelGains, rates: RatePair, receiver: int) -> float:
    rs = rates.rs
    if receiver == 1:
        return min(P(ch.beta11 - rates.r1), P(ch.beta12 - rates.r2), P(ch.beta12 - rs) + P(ch.beta11 - rs))
    if receiver == 2:
        return min(P(ch.beta21 - rates.r1), P(ch.beta22 - rates.r2), P(ch.beta22 - rs) + P(ch.beta21 - rs))
    raise ValueError("receiver must be 1 or 2")


def d_hk_wors(ch: ChannelGains, rates: RatePair) -> WorsBreakdown:
    ni1, ni2 = d_ni(ch, rates, 1), d_ni(ch, rates, 2)
    mac1, mac2 = d_mac(ch, rates, 1), d_mac(ch, rates, 2)
    d11 = min(ni1, ni2)
    d10 = min(ni1, mac2)
    d01 = min(mac1, ni2)
    d00 = min(mac1, mac2)
    best_of_four = max(d00, d01, d10, d11)
    worst_user = min(max(ni1, mac1), max(ni2, mac2))
    if best_of_four != worst_user:
        raise AssertionError(f"max-min and min-max forms disagree: {best_of_four} vs {worst_user}")
    return WorsBreakdown(ni1, ni2, mac1, mac2, d00, d01, d10, d11, best_of_four)


# ---------------------------------------------------------------------------
# inner bound with the fixed split b1 = beta21, b2 = beta12


def hk_fixed_sum_rate_objective(ch: ChannelGains, rs: float) -> PiecewiseLinear:
    """Constraint C objective as a function of the budget share ``alpha`` in [0, 1]."""
    b11, _, b21, b22 = ch.as_tuple()
    a = variable()
    return (b22 - a * rs).pos() + (b21 - a * rs).pos() + (b11 - b21 - (1 - a) * rs).pos()


def hk_fixed_cross_objective(ch: ChannelGains, rs: float) -> PiecewiseLinear:
    """Constraint E objective as a function of ``alpha``."""
    b11, b12, b21, b22 = ch.as_tuple()
    a = variable()
    return ((b22 - b12 - a * rs).pos() + (b21 - a * rs).pos()
            + (b11 - b21 - (1 - a) * rs).pos() + (b12 - (1 - a) * rs).pos())


def hk_fixed_weighted_objective(ch: ChannelGains, rf: float) -> PiecewiseLinear:
    """Constraint F objective as a function of ``alpha``."""
    b11, b12, b21, b22 = ch.as_tuple()
    a = variable()
    rest = (1 - a) * rf
    own = pmin(rest, (rest + b21) / 2.0, b11)
    inner = pmin(rest + b21, own + pmin(rest, b12))
    kept = pmin(a * rf + b12, b22) + pmin(a * rf, b21) + inner
    return ch.total - kept


def hk_fixed_alpha_c(ch: ChannelGains, rates: RatePair) -> float:
    """Closed-form minimizer of the constraint C objective."""
    rs = rates.rs
    if rs == 0.0:
        return 1.0
    return min(1.0, max(ch.beta22, ch.beta21) / rs)


def hk_fixed_alpha_e_printed(ch: ChannelGains, rates: RatePair) -> float:
    """Published candidate minimizer for constraint E; not always optimal."""
    rs = rates.rs
    if rs == 0.0:
        return 1.0
    return min(1.0, max(ch.beta22 - ch.beta21, ch.beta21) / rs)


def hk_fixed_alpha_e(ch: ChannelGains, rates: RatePair) -> float:
    """A minimizer of the constraint E objective.

    The objective is ``rs/2 * sum_k |alpha - t_k| + const`` over four
    thresholds, so any median of the thresholds clipped to [0, 1] works.
    """
    b11, b12, b21, b22 = ch.as_tuple()
    rs = rates.rs
    if rs == 0.0:
        return 1.0
    t = sorted([(b22 - b12) / rs, b21 / rs, 1.0 - (b11 - b21) / rs, 1.0 - b12 / rs])
    return min(1.0, max(0.0, t[2]))


@dataclass(frozen=True)
class AlphaReport:
    """Closed-form minimizers next to the exact breakpoint minimum."""

    alpha_c: float
    value_c_at_alpha: float
    value_c_exact: float
    alpha_e: float
    alpha_e_printed: float
    value_e_at_alpha: float
    value_e_at_printed: float
    value_e_exact: float

    @property
    def c_consistent(self) -> bool:
        return abs(self.value_c_at_alpha - self.value_c_exact) <= TOL

    @property
    def e_consistent(self) -> bool:
        return abs(self.value_e_at_alpha - self.value_e_exact) <= TOL

    @property
    def e_printed_consistent(self) -> bool:
        return abs(self.value_e_at_printed - self.value_e_exact) <= TOL


def hk_fixed_alpha_report(ch: ChannelGains, rates: RatePair) -> AlphaReport:
    fc = hk_fixed_sum_rate_objective(ch, rates.rs)
    fe = hk_fixed_cross_objective(ch, rates.rs)
    ac, ae, ap = hk_fixed_alpha_c(ch, rates), hk_fixed_alpha_e(ch, rates), hk_fixed_alpha_e_printed(ch, rates)
    return AlphaReport(
        alpha_c=ac,
        value_c_at_alpha=float(fc(ac)),
        value_c_exact=minimize_piecewise_linear(fc)[1],
        alpha_e=ae,
        alpha_e_printed=ap,
        value_e_at_alpha=float(fe(ae)),
        value_e_at_printed=float(fe(min(1.0, max(0.0, ap)))),
        value_e_exact=minimize_piecewise_linear(fe)[1],
    )


def _hk_fixed_one_side(ch: ChannelGains, rates: RatePair) -> dict[str, float]:
    return {
        "A": P(ch.beta11 - rates.r1),
        "C": max(minimize_piecewise_linear(hk_fixed_sum_rate_objective(ch, rates.rs))[1], 0.0),
        "E": max(minimize_piecewise_linear(hk_fixed_cross_objective(ch, rates.rs))[1], 0.0),
        "F": max(minimize_piecewise_linear(hk_fixed_weighted_objective(ch, rates.rf))[1], 0.0),
    }


def d_hk_fixed(ch: ChannelGains, rates: RatePair, g_mirrors_e: bool = False) -> DiversityBreakdown:
    """Inner-bound exponents for the split that puts private interference at the noise floor.

    Constraint G is the user swap of constraint F.  ``g_mirrors_e`` instead
    uses the user swap of constraint E, an alternative reading kept only for
    comparison.
    """
    one = _hk_fixed_one_side(ch, rates)
    other = _per_label_swap(_hk_fixed_one_side(ch.swapped(), rates.swapped()))
    values = {
        "A": one["A"],
        "B": other["B"],
        "C": one["C"],
        "D": other["D"],
        "E": one["E"],
        "F": one["F"],
        "G": other["E"] if g_mirrors_e else other["G"],
    }
    return DiversityBreakdown(values)


# ---------------------------------------------------------------------------
# inner bound with an arbitrary split


@dataclass(frozen=True)
class SplitDiscrepancy:
    label: str
    fast_path: float
    oracle: float


def _split_letters(ch: ChannelGains, split: tuple[float, float]) -> dict[str, float]:
    b11, b12, b21, b22 = ch.as_tuple()
    b1, b2 = split
    return dict(
        A=P(b11), B=P(b11 - P(b1)), C=P(b22), D=P(b22 - P(b2)),
        E=P(b12 - P(-b2)), F=P(b12 - P(b2)), G=P(b21 - P(-b1)), H=P(b21 - P(b1)),
    )


def _fast_c(L: dict[str, float], rs: float) -> float:
    A, B, C, D, E, F, G, H = (L[k] for k in "ABCDEFGH")
    if G >= H:
        if rs > G - P(H):
            t1 = P(min(C, G, G - P(H), rs))
            c1 = P(C + G - 2 * t1 + P(B - F) - (rs - t1))
            c2 = P(P(C - H) + P(B - F) - rs)
            return min(c1, c2)
        t1 = P(min(C, G, G - H, rs))
        return P(C + G - 2 * t1 + P(B - F) - (rs - t1))
    return P(P(C - H) + P(B - F) - rs)


def _fast_e(L: dict[str, float], rs: float) -> float:
    A, B, C, D, E, F, G, H = (L[k] for k in "ABCDEFGH")
    plain = P(P(D - H) + P(B - F) - rs)
    if G >= H and E >= F:
        cands = []
        if rs >= P(G - H) + P(E - F):
            cands.append(plain)
        if rs >= P(G - H):
            t1 = min(B, E, E - F, rs)
            cands.append(P(B + E - 2 * t1 + P(D - H) - (rs - t1)))
        if rs >= P(E - F):
            t1 = min(D, G, P(G - H), rs)
            cands.append(P(D + G - 2 * t1 + P(B - F) - (rs - t1)))
        if rs < P(G - H) + P(E - F):
            t1 = min(D, G, rs, G - H)
            t2 = min(B, E, rs - t1, E - F)
            cands.append(P(D + G - 2 * t1 + B + E - 2 * t2 - (rs - t1 - t2)))
        return min(cands)
    if G >= H:
        t1 = min(D, G, G - H, rs)
        second = P(D + G - 2 * t1 + P(B - F) - (rs - t1))
        return max(plain, second) if rs >= G - H else second
    if E >= F:
        t1 = min(B, E, E - F, rs)
        second = P(B + E - 2 * t1 + P(D - H) - (rs - t1))
        return max(plain, second) if rs >= E - F else second
    return plain


def _fast_f(L: dict[str, float], rf: float) -> float:
    A, B, C, D, E, F, G, H = (L[k] for k in "ABCDEFGH")
    bf, dh = P(B - F), P(D - H)
    plain = P(P(A - F) + bf + dh - rf)
    if E >= F and G >= H:
        a1 = P(A - F - P(E - F))
        b1 = bf
        hi, lo = max(a1, b1), min(a1, b1)
        cands = []
        if rf >= P(E - F) + P(G - H):
            rf2 = P(D - H - rf)
            rf1p = P(rf - rf2 - bf)
            if rf1p <= hi - lo:
                cands.append(P(hi + dh - rf))
            else:
                cands.append(P(a1 + b1 - rf1p) / 2.0 + P(D - H - rf2))
        if rf >= E - F:
            rf2 = P(min(max(D, G), rf))
            rf1p = P(rf - rf2 - bf)
            if rf1p <= hi - lo:
                t1 = min(D, G, G - H, rf)
                cands.append(P(hi + D + G - 2 * t1 - (rf - t1)))
            else:
                cands.append(P(a1 + b1 - rf1p) / 2.0 + P(D - H - rf2))
        t1 = min(E, A, E - F, P(rf - bf))
        if rf >= G - H:
            cands.append(P(E + A - 2 * t1 + dh - (rf - bf - t1) + bf))
        if rf < P(E - F) + P(G - H):
            t2 = min(D, G, G - H, P(rf - t1 - bf))
            t3 = P(rf - t1 - t2)
            cands.append(P(E + A - 2 * t1 + D + G - 2 * t2 + bf - t3))
        return min(cands) if cands else plain
    if E >= F:
        t1 = min(E, A, E - F, P(rf - bf))
        second = P(P(E + A - 2 * t1 + dh) - (rf - bf - t1) + bf)
        return max(plain, second) if rf >= E - F else second
    if G >= H:
        t1 = min(D, G, G - H, rf)
        second = P(D + G - 2 * t1 + P(A - F) + bf - (rf - t1))
        return max(plain, second) if rf >= G - H else second
    return plain


def hk_general_fast_path(ch: ChannelGains, rates: RatePair, split: tuple[float, float]) -> dict[str, float]:
    """Case-analysis formulas for an arbitrary split, transcribed with bracket repairs.

    Not authoritative: unbalanced brackets were closed with ``[.]+`` and the
    residual budget of each sub-case was taken as the constraint's own rate
    combination.  :func:`d_hk_general` compares every entry with the
    lattice search and keeps the latter.
    """
    b1, b2 = split
    swapped_split = (b2, b1)
    L = _split_letters(ch, split)
    Ls = _split_letters(ch.swapped(), swapped_split)
    return {
        "A": P(ch.beta11 - P(ch.beta12 - P(b2)) - rates.r1),
        "B": P(ch.beta22 - P(ch.beta21 - P(b1)) - rates.r2),
        "C": _fast_c(L, rates.rs),
        "D": _fast_c(Ls, rates.rs),
        "E": _fast_e(L, rates.rs),
        "F": _fast_f(L, rates.rf),
        "G": _fast_f(Ls, rates.rg),
    }


GRID_CANDIDATES = (0.1, 0.05, 0.025, 0.02, 0.01, 0.005)


def detect_grid_step(values, candidates=GRID_CANDIDATES) -> float | None:
    """Coarsest candidate step of which every value is an integer multiple."""
    for step in candidates:
        if all(abs(v / step - round(v / step)) * step <= TOL for v in values):
            return step
    return None


def d_hk_general(
    ch: ChannelGains,
    rates: RatePair,
    split: PowerSplit | tuple[float, float],
    step: float | None = None,
    discrepancies: list[SplitDiscrepancy] | None = None,
) -> DiversityBreakdown:
    """Inner-bound exponents for the split ``(b1, b2)``, from the lattice search.

    The case-analysis fast path is evaluated alongside; entries where it
    differs from the search by more than the lattice slack are appended to
    ``discrepancies`` and logged.  Inputs must be aligned to ``step``
    (detected automatically when omitted).
    """
    from .oracle import per_constraint_minima  # local import: oracle is the heavier module

    if isinstance(split, PowerSplit):
        if split.mode in (SplitMode.ALL_PRIVATE, SplitMode.ALL_COMMON):
            raise ValueError("no-split modes are covered by d_hk_wors")
        split = split.resolve(ch)
    b1, b2 = float(split[0]), float(split[1])
    if step is None:
        step = detect_grid_step(list(ch.as_tuple()) + [rates.r1, rates.r2, b1, b2])
        if step is None:
            raise ValueError("inputs are not aligned to any supported lattice step; pass step explicitly")
    from .regions import RegionKind

    found = per_constraint_minima(RegionKind.hk_general((b1, b2)), ch, rates, step)
    values = {label: found[label].value for label in LABELS}
    fast = hk_general_fast_path(ch, rates, (b1, b2))
    for label in LABELS:
        if abs(fast[label] - values[label]) > 4 * step + TOL:
            rec = SplitDiscrepancy(label, fast[label], values[label])
            log.info("split fast path differs for %s: %.6g vs %.6g", label, rec.fast_path, rec.oracle)
            if discrepancies is not None:
                discrepancies.append(rec)
    return DiversityBreakdown(values)


# ---------------------------------------------------------------------------
# earlier published symmetric exponent


def prior_symmetric_exponent(alpha: float, r: float) -> float:
    """Earlier published exponent for ``beta = (1, alpha, alpha, 1)``, ``r1 = r2 = r``.

    Evaluated verbatim for the counterexample; it is not a correct exponent.
    """
    if alpha < 0 or r < 0:
        raise ValueError("alpha and r must be non-negative")
    m = min(3 * r, 2 * alpha)
    first = P(1 - 1.5 * r) + P(1 - 3 * r) + P(2 * alpha - 3 * r)
    second = min(P(3 - 3 * r - m), max(1.0, 2 - 3 * r - m))
    return max(first, second)


# ---------------------------------------------------------------------------
# aggregate


@dataclass(frozen=True)
class BoundsSummary:
    d_etw: DiversityBreakdown
    d_hk_wors: WorsBreakdown
    d_hk_fixed: DiversityBreakdown
    d_hk_general: DiversityBreakdown | None = None
    d_lower_best: float = field(init=False)

    def __post_init__(self) -> None:
        best = max(self.d_hk_wors.overall, self.d_hk_fixed.overall)
        if self.d_hk_general is not None:
            best = max(best, self.d_hk_general.overall)
        object.__setattr__(self, "d_lower_best", best)


class SandwichViolation(RuntimeError):
    """A lower bound exceeded the upper bound: an internal inconsistency."""


def summarize(ch: ChannelGains, rates: RatePair, split: PowerSplit | None = None,
              step: float | None = None) -> BoundsSummary:
    split = split or PowerSplit.fixed()
    general = None
    if split.mode is SplitMode.GENERAL:
        general = d_hk_general(ch, rates, split, step=step)
    out = BoundsSummary(d_etw(ch, rates), d_hk_wors(ch, rates), d_hk_fixed(ch, rates), general)
    if out.d_lower_best > out.d_etw.overall + TOL:
        raise SandwichViolation(
            f"lower bound {out.d_lower_best} exceeds upper bound {out.d_etw.overall} at {ch}, {rates}"
        )
    return out


__all__ = [
    "AlphaReport",
    "BoundsSummary",
    "INF",
    "SandwichViolation",
    "SplitDiscrepancy",
    "WorsBreakdown",
    "d_etw",
    "d_hk_fixed",
    "d_hk_general",
    "d_hk_wors",
    "d_mac",
    "d_ni",
    "detect_grid_step",
    "etw_symmetric_sum_rate",
    "etw_weighted_exponent",
    "etw_weighted_exponent_printed",
    "hk_fixed_alpha_report",
    "hk_general_fast_path",
    "prior_symmetric_exponent",
    "summarize",
]
