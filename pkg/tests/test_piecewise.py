from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifc_dmt.closed_form import hk_fixed_sum_rate_objective
from ifc_dmt.core import ChannelGains
from ifc_dmt.piecewise import PiecewiseLinear, minimize_piecewise_linear, pmax, pmin, variable

coef = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 3))


def test_constant_minimum_at_left_end():
    assert minimize_piecewise_linear(PiecewiseLinear.constant(2.5)) == (0.0, 2.5)
    assert minimize_piecewise_linear(lambda a: 2.5) == (0.0, 2.5)


@given(st.floats(0, 2), st.floats(0, 2), st.floats(-1, 2))
def test_hinge_sum_minimized_at_upper_threshold(m, big, m2):
    m, big = sorted((m, big))
    f = lambda a: (m - a).pos() + (big - a).pos() + (a - m2).pos()  # noqa: E731
    fn = f(variable())
    _, best = minimize_piecewise_linear(fn)
    assert fn(min(1.0, big)) == pytest.approx(best, abs=1e-12)


def test_sum_rate_objective_example():
    fn = hk_fixed_sum_rate_objective(ChannelGains(1, 0.5, 0.5, 1), 0.8)
    arg, value = minimize_piecewise_linear(fn)
    # Flat on [0.625, 1]; the enumerator reports the left end.
    assert value == pytest.approx(0.7) and arg == pytest.approx(0.625)
    assert fn(1.0) == pytest.approx(0.7)
    assert 0.625 in [round(x, 12) for x in fn.xs]


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 1.0], [1.0])


def test_domain_mismatch():
    with pytest.raises(ValueError):
        variable(0, 1) + variable(0, 2)


def test_arithmetic():
    a = variable()
    f = 3 - 2 * a + a / 2
    assert f(0.0) == 3.0 and f(1.0) == pytest.approx(1.5)
    assert (-f)(1.0) == pytest.approx(-1.5)
    assert np.allclose(f(np.array([0.0, 0.5])), [3.0, 2.25])


@given(st.lists(st.tuples(coef, coef, st.sampled_from(["pos", "min", "max", "plain"])), min_size=1, max_size=6))
def test_composition_matches_pointwise(pieces):
    """Exact composition agrees with scalar evaluation, and its minimum is a true lower envelope."""
    a = variable()
    fn = PiecewiseLinear.constant(0.0)
    scalar_terms = []
    for k, (c0, c1, op) in enumerate(pieces):
        t = c0 + c1 * a
        alt = (c1 - c0) * a - c1 / 2
        if op == "pos":
            fn = fn + t.pos()
            scalar_terms.append(lambda s, c0=c0, c1=c1: max(c0 + c1 * s, 0.0))
        elif op == "min":
            fn = fn + pmin(t, alt)
            scalar_terms.append(lambda s, c0=c0, c1=c1: min(c0 + c1 * s, (c1 - c0) * s - c1 / 2))
        elif op == "max":
            fn = fn + pmax(t, alt)
            scalar_terms.append(lambda s, c0=c0, c1=c1: max(c0 + c1 * s, (c1 - c0) * s - c1 / 2))
        else:
            fn = fn + t
            scalar_terms.append(lambda s, c0=c0, c1=c1: c0 + c1 * s)
    grid = np.linspace(0, 1, 401)
    direct = np.array([sum(t(s) for t in scalar_terms) for s in grid])
    assert np.allclose(fn(grid), direct, atol=1e-9)
    _, best = fn.argmin()
    assert best <= direct.min() + 1e-9
    assert any(abs(sum(t(x) for t in scalar_terms) - best) <= 1e-9 for x in fn.xs)


def test_argmin_is_leftmost():
    a = variable()
    fn = pmax(0.5 - a, 0.0, a - 0.8)
    assert fn.argmin() == (0.5, 0.0)
    assert fn.argmax()[1] == pytest.approx(0.5)
