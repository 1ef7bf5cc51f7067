from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifc_dmt.core import (
    INF,
    SWAP_LABEL,
    ChannelGains,
    DiversityBreakdown,
    FadingExponents,
    PowerSplit,
    RatePair,
    Regime,
    SplitMode,
    classify_regime,
    close,
    neg_part,
    pos_part,
)

reals = st.floats(-10, 10, allow_nan=False)


@pytest.mark.parametrize("v, expected", [(0.3, 0.3), (-0.3, 0.0), (0.0, 0.0)])
def test_pos_part_examples(v, expected):
    assert pos_part(v) == expected


@given(reals, reals)
def test_pos_part_idempotent_and_monotone(u, v):
    assert pos_part(pos_part(v)) == pos_part(v)
    lo, hi = sorted((u, v))
    assert pos_part(lo) <= pos_part(hi)


@given(reals)
def test_pos_neg_decomposition(v):
    assert pos_part(v) - neg_part(v) == v


@pytest.mark.parametrize("field", range(4))
def test_negative_gain_rejected(field):
    vals = [1.0, 0.5, 0.5, 1.0]
    vals[field] = -0.1
    with pytest.raises(ValueError):
        ChannelGains(*vals)


def test_nan_rejected():
    with pytest.raises(ValueError):
        RatePair(float("nan"), 0.1)
    with pytest.raises(ValueError):
        FadingExponents(0, 0, -1, 0)


@given(st.floats(0, 5), st.floats(0, 5))
def test_rate_composites(r1, r2):
    r = RatePair(r1, r2)
    assert r.rs == r1 + r2
    assert r.rf == 2 * r1 + r2
    assert r.rg == r1 + 2 * r2
    assert math.isclose(r.rf + r.rg, 3 * r.rs, abs_tol=1e-12)
    assert r.lhs("F") == r.rf and r.lhs("G") == r.rg and r.lhs("E") == r.rs


def test_swaps():
    ch = ChannelGains(1, 2, 3, 4)
    assert ch.swapped() == ChannelGains(4, 3, 2, 1)
    assert ch.swapped().swapped() == ch
    assert RatePair(0.1, 0.2).swapped() == RatePair(0.2, 0.1)
    assert FadingExponents(1, 2, 3, 4).swapped().as_tuple() == (4, 3, 2, 1)
    assert all(SWAP_LABEL[SWAP_LABEL[k]] == k for k in SWAP_LABEL)


def test_power_split_resolution():
    ch = ChannelGains(1, 0.3, 0.7, 1)
    assert PowerSplit.fixed().resolve(ch) == (0.7, 0.3)
    assert PowerSplit.general(0.1, -0.2).resolve(ch) == (0.1, -0.2)
    assert PowerSplit(SplitMode.ALL_PRIVATE).resolve(ch) == (-INF, -INF)
    assert PowerSplit(SplitMode.ALL_COMMON).resolve(ch) == (INF, INF)
    with pytest.raises(ValueError):
        PowerSplit(SplitMode.GENERAL, 0.1, None)
    with pytest.raises(ValueError):
        PowerSplit.general(float("inf"), 0.0)


def test_breakdown_overall_and_binding():
    b = DiversityBreakdown({"A": 0.6, "B": 0.6, "C": 0.7, "F": 0.4, "G": 0.4})
    assert b.overall == 0.4
    assert b.binding == {"F", "G"}
    assert b.swapped()["F"] == 0.4 and b.swapped()["A"] == 0.6


def test_breakdown_with_infinity():
    b = DiversityBreakdown({"A": INF, "C": INF})
    assert b.overall == INF and b.binding == {"A", "C"}
    assert DiversityBreakdown({"A": INF, "B": 0.2}).overall == 0.2


def test_breakdown_rejects_negative():
    with pytest.raises(ValueError):
        DiversityBreakdown({"A": -0.1})


@pytest.mark.parametrize(
    "beta, regime",
    [
        ((1, 3, 5, 1), Regime.VERY_STRONG),
        ((1, 0.2, 0.2, 1), Regime.WEAK),
        ((1, 1.2, 0.5, 1), Regime.MIXED),
        ((1, 1.5, 1.5, 1), Regime.STRONG),
    ],
)
def test_classify_regime(beta, regime):
    assert classify_regime(ChannelGains(*beta)) is regime


@given(st.tuples(*[st.floats(0, 4)] * 4))
def test_regime_swap_invariant(beta):
    ch = ChannelGains(*beta)
    assert classify_regime(ch) is classify_regime(ch.swapped())


def test_close_extended_reals():
    assert close(INF, INF)
    assert not close(INF, 1e300)
    assert close(0.1 + 0.2, 0.3)
