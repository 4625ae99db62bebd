"""Monotone power-log control functions: values, inverses, tail integrals."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from sdwavelab.powerlog import PowerLog


def test_value_matches_formula():
    f = PowerLog(2.0, s=1.5, w=2.0)
    t = np.array([0.0, 1.0, 10.0, 1e4])
    expected = 2.0 * (1 + t) ** 1.5 * np.log(math.e + t) ** 2.0
    np.testing.assert_allclose(f(t), expected, rtol=1e-14)
    assert f(3.0) == pytest.approx(2.0 * 4.0**1.5 * math.log(math.e + 3.0) ** 2)


def test_constructor_validation():
    with pytest.raises(ValueError):
        PowerLog(0.0)
    with pytest.raises(ValueError):
        PowerLog(-1.0)
    with pytest.raises(ValueError):
        PowerLog(1.0, s=-0.5)
    # negative log weight with no power to compensate is decreasing
    with pytest.raises(ValueError):
        PowerLog(1.0, s=0.0, w=-1.0)
    # strong negative log weight makes the function dip before growing
    with pytest.raises(ValueError):
        PowerLog(1.0, s=0.1, w=-5.0)


def test_mild_negative_log_weight_is_accepted():
    f = PowerLog(1.0, s=1.0, w=-0.5)
    t = np.linspace(0.0, 50.0, 400)
    assert np.all(np.diff(f(t)) > 0)


def test_predicates_and_sup():
    const = PowerLog(3.0)
    assert const.is_constant
    assert not const.is_increasing
    assert const.sup() == 3.0
    grow = PowerLog(1.0, s=0.5)
    assert not grow.is_constant
    assert grow.is_increasing
    assert grow.sup() == math.inf


def test_inverse_closed_form_pure_power():
    f = PowerLog(1.0, s=2.0)
    assert f.inverse(9.0) == pytest.approx(2.0, rel=1e-13)
    g = PowerLog(2.0, s=0.5)
    # 2 sqrt(1+t) = 6 at t = 8
    assert g.inverse(6.0) == pytest.approx(8.0, rel=1e-13)


@given(
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=0.3, max_value=2.0),
    st.floats(min_value=0.0, max_value=1.5),
    st.floats(min_value=0.0, max_value=25.0),
)
def test_inverse_roundtrip(coef, s, w, t):
    f = PowerLog(coef, s=s, w=w)
    np.testing.assert_allclose(f.inverse(f(t)), t, rtol=1e-9, atol=1e-9)


def test_inverse_u_matches_inverse():
    f = PowerLog(1.5, s=1.0, w=1.0)
    y = f(123.0)
    u = f.inverse_u(math.log(y))
    np.testing.assert_allclose(math.expm1(u), 123.0, rtol=1e-9)


def test_inverse_domain_errors():
    f = PowerLog(2.0, s=1.0)
    with pytest.raises(ValueError):
        f.inverse(0.0)
    with pytest.raises(ValueError):
        f.inverse(1.0)  # below f(0) = 2
    with pytest.raises(ValueError):
        PowerLog(1.0).inverse_u(0.5)  # constants have no inverse


def test_tail_integral_pure_power_exact():
    # integral of (1+s)^(-2) ds from t0 = (1+t0)^(-1)
    f = PowerLog(1.0, s=0.5)
    for t0 in (0.0, 3.0, 100.0):
        assert f.tail_integral_inverse_power(t0, 4) == pytest.approx(
            1.0 / (1 + t0), rel=1e-13
        )
    # coefficient scaling: (c (1+s)^s)^(-m)
    g = PowerLog(2.0, s=1.0)
    assert g.tail_integral_inverse_power(1.0, 3) == pytest.approx(
        2.0**-3 / (2 * 2.0**2), rel=1e-13
    )


def test_tail_integral_divergent_is_inf():
    assert PowerLog(1.0, s=1.0).tail_integral_inverse_power(0.0, 1) == math.inf
    assert PowerLog(1.0, s=0.25).tail_integral_inverse_power(5.0, 4) == math.inf
    assert PowerLog(5.0).tail_integral_inverse_power(0.0, 2) == math.inf


def test_tail_integral_with_log_weight_upper_bounds_quadrature():
    f = PowerLog(1.0, s=1.0, w=-1.0)
    m = 2
    est = f.tail_integral_inverse_power(1.0, m)
    ref, err = quad(lambda s: f(s) ** -m, 1.0, 1e8, limit=400)
    assert est >= ref - 1e-12
    # the far tail beyond the quadrature window is small here
    assert est == pytest.approx(ref, rel=1e-2)


def test_tail_integral_validates_m():
    with pytest.raises(ValueError):
        PowerLog(1.0, s=1.0).tail_integral_inverse_power(0.0, 0)


def test_l1_norm_of_inverse_frozen_value():
    # (1+t)^(5/4): integral of (1+t)^(-5/4) over [0, inf) = 4
    f = PowerLog(1.0, s=1.25)
    assert f.l1_norm_of_inverse() == pytest.approx(4.0, rel=1e-13)
    assert PowerLog(1.0, s=0.5).l1_norm_of_inverse() == math.inf
