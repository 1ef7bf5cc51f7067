from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifc_dmt.core import ChannelGains, FadingExponents, RatePair
from ifc_dmt.montecarlo import rng_stream, sample_block
from ifc_dmt.regions import (
    FiniteFadingSample,
    RegionKind,
    constraints_for,
    finite_violations,
    hk_finite_rhs,
    in_asymptotic_region,
    in_etw_asymptotic,
    in_etw_finite,
    in_finite_region,
    in_hk_finite,
    in_hk_fixed_asymptotic,
    in_hk_general_asymptotic,
    in_simple_region,
    swap_fading,
    violated_constraints,
)

from helpers import gains, rates

R4 = RatePair(0.4, 0.4)
fading = st.tuples(*[st.integers(0, 70).map(lambda k: k * 0.05)] * 4)


# ---------------------------------------------------------------------------
# finite SNR


def test_etw_finite_examples():
    assert in_etw_finite(FiniteFadingSample(1e9, 0, 0, 1e9), ChannelGains(1, 0, 0, 1), R4, 10)
    assert not in_etw_finite(FiniteFadingSample(0, 0, 0, 0), ChannelGains(1, 0, 0, 1), R4, 100)
    # A-constraint met with equality counts as inside.
    s = FiniteFadingSample(100 ** 0.6, 0, 0, 1e9)
    assert in_etw_finite(s, ChannelGains(1, 0, 0, 1), RatePair(0.6, 0.0), 100)


def test_hk_finite_example():
    assert in_hk_finite(FiniteFadingSample(1e9, 0, 0, 1e9), ChannelGains(1, 0, 0, 1), R4, 10)


def test_finite_rejects_bad_scale():
    with pytest.raises(ValueError):
        in_etw_finite(FiniteFadingSample(1, 1, 1, 1), ChannelGains(1, 0, 0, 1), R4, 1.0)
    with pytest.raises(ValueError):
        FiniteFadingSample(-1, 0, 0, 0)


def test_finite_needs_finite_kind():
    with pytest.raises(ValueError):
        finite_violations(RegionKind.etw(), 1, 1, 1, 1, ChannelGains(1, 0, 0, 1), R4, 10)


@pytest.mark.parametrize("beta", [(1, 0.5, 0.5, 1), (1, 1.5, 1.5, 1), (1, 0.9, 0.2, 1), (1, 3, 5, 1), (2, 0.3, 1.7, 0.5)])
def test_finite_inner_inside_outer(beta):
    """Per-sample inclusion over 1.2e5 draws in total per channel."""
    ch = ChannelGains(*beta)
    for x_index, x in enumerate((10.0, 100.0, 1000.0)):
        for r in (R4, RatePair(0.2, 0.7)):
            s = sample_block(ch, x, rng_stream(11, x_index, 0), 20_000)
            inner = in_finite_region(RegionKind.hk_finite(), *s, ch, r, x)
            outer = in_finite_region(RegionKind.etw_finite(), *s, ch, r, x)
            assert not np.any(inner & ~outer)


def _hk_rhs_scalar(s11, s12, s21, s22, b12, b21, x):
    """The seven inner-bound right-hand sides, written term by term in scalar math."""
    log = math.log
    d1 = 1 + s12 / (1 + x ** b12)
    d2 = 1 + s21 / (1 + x ** b21)
    a = log(1 + s11 / d1)
    b = log(1 + s22 / d2)
    c = log(1 + (s22 + s21 / (1 + x ** -b21)) / d2) + log(1 + (s11 / (1 + x ** b21)) / d1)
    d = log(1 + (s11 + s12 / (1 + x ** -b12)) / d1) + log(1 + (s22 / (1 + x ** b12)) / d2)
    e = (log(1 + (s11 / (1 + x ** b21) + s12 / (1 + x ** -b12)) / d1)
         + log(1 + (s22 / (1 + x ** b12) + s21 / (1 + x ** -b21)) / d2))
    f = (log(1 + (s11 + s12 / (1 + x ** -b12)) / d1)
         + log(1 + (s11 / (1 + x ** b21)) / d1)
         + log(1 + (s22 / (1 + x ** b12) + s21 / (1 + x ** -b21)) / d2))
    g = (log(1 + (s22 + s21 / (1 + x ** -b21)) / d2)
         + log(1 + (s22 / (1 + x ** b12)) / d2)
         + log(1 + (s11 / (1 + x ** b21) + s12 / (1 + x ** -b12)) / d1))
    return [a, b, c, d, e, f, g]


def test_hk_finite_matches_scalar_reevaluation():
    ch, x = ChannelGains(1, 0.5, 0.5, 1), 100.0
    s = sample_block(ch, x, rng_stream(1, 0, 0), 3000)
    vec = hk_finite_rhs(*s, ch, x)
    lr = math.log(1 + x ** 0.4)
    lhs = [lr, lr, 2 * lr, 2 * lr, 2 * lr, 3 * lr, 3 * lr]
    member = in_finite_region(RegionKind.hk_finite(), *s, ch, R4, x)
    for j in range(s.shape[1]):
        ref = _hk_rhs_scalar(*s[:, j], ch.beta12, ch.beta21, x)
        assert np.allclose(vec[:, j], ref, rtol=1e-12, atol=1e-12)
        assert bool(member[j]) == all(l <= v + 1e-9 for l, v in zip(lhs, ref))
    assert 0 < member.mean() < 1


# ---------------------------------------------------------------------------
# large SNR, single points


def test_etw_asymptotic_examples():
    assert in_etw_asymptotic(FadingExponents(0, 0, 0, 0), ChannelGains(1, 0.2, 0.2, 1), R4)
    assert not in_etw_asymptotic(FadingExponents(0.7, 0, 0, 0), ChannelGains(1, 0.2, 0.2, 1), R4)
    deep = FadingExponents(2, 2, 2, 2)
    assert in_etw_asymptotic(deep, ChannelGains(1, 0.2, 0.2, 1), RatePair(0, 0))


def test_hk_fixed_examples():
    ch = ChannelGains(1, 0.5, 0.5, 1)
    assert in_hk_fixed_asymptotic(FadingExponents(0, 0, 0, 0), ch, R4)
    assert not in_hk_fixed_asymptotic(FadingExponents(0.7, 0, 0, 0), ch, R4)
    c = next(k for k in constraints_for(RegionKind.hk_fixed(), ch) if k.label == "C")
    assert float(c.rhs(0, 0, 0, 0)) == pytest.approx(1.5)


def test_hk_general_examples():
    ch = ChannelGains(1, 0.5, 0.5, 1)
    a = next(k for k in constraints_for(RegionKind.hk_general((0.0, 0.0)), ch) if k.label == "A")
    assert float(a.rhs(0, 0, 0, 0)) == pytest.approx(0.5)
    assert in_hk_general_asymptotic(FadingExponents(0, 0, 0, 0), ch, RatePair(0.2, 0.2), (0.0, 0.0))
    assert not in_hk_general_asymptotic(FadingExponents(9, 9, 9, 9), ch, R4, (0.0, 0.0))
    # Private interference below the noise floor: A = [1 - [0.5 - 0.5]+ - 0.4]+ = 0.6 of slack.
    a = next(k for k in constraints_for(RegionKind.hk_general((0.5, 0.5)), ch) if k.label == "A")
    assert float(a.rhs(0, 0, 0, 0)) - 0.4 == pytest.approx(0.6)


def test_simple_region_examples():
    g0 = FadingExponents(0, 0, 0, 0)
    assert in_simple_region(g0, ChannelGains(1, 0.2, 0.2, 1), R4, RegionKind.treat_as_noise(1))
    assert not in_simple_region(g0, ChannelGains(1, 0.2, 0.2, 1), R4, RegionKind.mac_at(2))
    ch = ChannelGains(1, 0.5, 0.5, 1)
    assert in_simple_region(FadingExponents(0.4, 0, 0, 0), ch, R4, RegionKind.prior_symmetric())
    with pytest.raises(ValueError):
        in_simple_region(g0, ch, R4, RegionKind.etw())
    with pytest.raises(ValueError):
        constraints_for(RegionKind.prior_symmetric(), ChannelGains(1, 0.5, 0.2, 1))


def test_region_kind_validation():
    with pytest.raises(ValueError):
        RegionKind.treat_as_noise(3)
    with pytest.raises(ValueError):
        constraints_for(RegionKind.etw_finite(), ChannelGains(1, 0, 0, 1))


def test_decreasing_cross_fade_can_leave_outer_region():
    # Decreasing a cross-link exponent can shrink the C right-hand side
    # [X11 - X21]+ + max(X21, X22), so membership is not monotone along that axis.
    ch, r = ChannelGains(1, 0, 1, 1), RatePair(0.9, 0.25)
    assert in_etw_asymptotic(FadingExponents(0, 0, 1.0, 0.7), ch, r)
    assert not in_etw_asymptotic(FadingExponents(0, 0, 0.7, 0.7), ch, r)
    assert "C" in violated_constraints(RegionKind.etw(), (0, 0, 0.7, 0.7), ch, r)


# ---------------------------------------------------------------------------
# large SNR, properties


def _random_batch(rng, n):
    return rng.integers(0, 71, (4, n)) * 0.05


def _members(kind, ch, r, g):
    ok = np.ones(g.shape[1], dtype=bool)
    for con in constraints_for(kind, ch):
        ok &= np.asarray(con.satisfied(tuple(g), r), dtype=bool)
    return ok


def test_asymptotic_inner_inside_outer(rng):
    """1e5 fading tuples over 100 channels."""
    total = 0
    for _ in range(100):
        ch = ChannelGains(*(rng.integers(0, 61, 4) * 0.05))
        r = RatePair(*(rng.integers(0, 31, 2) * 0.05))
        g = _random_batch(rng, 1000)
        inner = _members(RegionKind.hk_fixed(), ch, r, g)
        outer = _members(RegionKind.etw(), ch, r, g)
        assert not np.any(inner & ~outer)
        total += g.shape[1]
    assert total >= 100_000


def test_direct_link_improvement_keeps_outer_membership(rng):
    for _ in range(200):
        ch = ChannelGains(*(rng.integers(0, 61, 4) * 0.05))
        r = RatePair(*(rng.integers(0, 31, 2) * 0.05))
        g = _random_batch(rng, 500)
        base = _members(RegionKind.etw(), ch, r, g)
        for axis in (0, 3):
            better = g.copy()
            better[axis] = np.maximum(better[axis] - rng.integers(1, 20, g.shape[1]) * 0.05, 0)
            assert not np.any(base & ~_members(RegionKind.etw(), ch, r, better))


def test_inner_bound_rhs_nondecreasing_in_every_link(rng):
    for _ in range(200):
        ch = ChannelGains(*(rng.integers(0, 61, 4) * 0.05))
        g = _random_batch(rng, 500)
        for axis in range(4):
            better = g.copy()
            better[axis] = np.maximum(better[axis] - 0.05, 0)
            for con in constraints_for(RegionKind.hk_fixed(), ch):
                assert np.all(con.rhs(*better) >= con.rhs(*g) - 1e-12)


@given(gains, rates, fading)
def test_fades_beyond_gain_are_lossless(ch, r, g):
    clipped = tuple(min(a, b) for a, b in zip(g, ch.as_tuple()))
    kinds = [RegionKind.etw(), RegionKind.hk_fixed(), RegionKind.hk_general((0.25, -0.5)),
             RegionKind.treat_as_noise(1), RegionKind.mac_at(2)]
    for kind in kinds:
        assert in_asymptotic_region(kind, g, ch, r) == in_asymptotic_region(kind, clipped, ch, r)


@given(gains, rates, fading, st.tuples(st.integers(-20, 20), st.integers(-20, 20)))
def test_user_swap_preserves_membership(ch, r, g, split):
    b = (split[0] * 0.05, split[1] * 0.05)
    pairs = [
        (RegionKind.etw(), RegionKind.etw()),
        (RegionKind.hk_fixed(), RegionKind.hk_fixed()),
        (RegionKind.hk_general(b), RegionKind.hk_general((b[1], b[0]))),
        (RegionKind.treat_as_noise(1), RegionKind.treat_as_noise(2)),
        (RegionKind.mac_at(1), RegionKind.mac_at(2)),
    ]
    for kind, mirror in pairs:
        assert in_asymptotic_region(kind, g, ch, r) == in_asymptotic_region(
            mirror, swap_fading(g), ch.swapped(), r.swapped())


def test_general_split_reduces_to_fixed(rng):
    for _ in range(1000):
        ch = ChannelGains(*(rng.integers(0, 61, 4) * 0.05))
        r = RatePair(*(rng.integers(0, 31, 2) * 0.05))
        g = FadingExponents(*(rng.integers(0, 71, 4) * 0.05))
        assert in_hk_fixed_asymptotic(g, ch, r) == in_hk_general_asymptotic(g, ch, r, (ch.beta21, ch.beta12))
