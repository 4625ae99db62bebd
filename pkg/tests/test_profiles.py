"""Speed profiles: factories, jets, hypothesis fits, and regime classification."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from sdwavelab.errors import NumericalError
from sdwavelab.powerlog import PowerLog
from sdwavelab.profiles import (
    build_example1,
    build_example2,
    constant_profile,
    default_time_grid,
    gec_case,
    lambda_applicable,
    lambda_inverse,
    sup_fit,
    verify_hypotheses,
)


def central_fd(fn, t, k, h):
    if k == 1:
        return (fn(t + h) - fn(t - h)) / (2 * h)
    if k == 2:
        return (fn(t + h) - 2 * fn(t) + fn(t - h)) / h**2
    raise ValueError(k)


# -- constant profile ---------------------------------------------------------


def test_constant_profile_basics():
    prof = constant_profile(2.0)
    assert prof.value(13.7) == 2.0
    assert prof.a0 == prof.a1 == prof.a_inf == 2.0
    assert prof.deviation_integral(50.0) == 0.0
    assert prof.theta.is_constant
    jet = prof.jet(1.0, 3)
    assert jet.derivative(0) == 2.0
    assert jet.derivative(1) == 0.0
    assert gec_case(prof) == "i"


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        constant_profile().value(-0.5)
    with pytest.raises(ValueError):
        build_example1(0.5, 0.5, 0.0).jet(-1.0, 2)


def test_constant_profile_hypotheses_all_hold():
    report = verify_hypotheses(constant_profile())
    for name in ("H1*", "H2*", "H3*", "H4*"):
        assert report.holds(name)


# -- oscillating family -------------------------------------------------------


def test_example1_parameter_validation():
    with pytest.raises(ValueError):
        build_example1(-0.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        build_example1(0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        build_example1(0.0, 0.0, -0.2)
    with pytest.raises(ValueError):
        build_example1(0.5, 0.5, 0.0, m=0)
    with pytest.raises(ValueError):
        build_example1(0.5, 1.5, 0.0, lam="auto")  # needs q < 1
    with pytest.raises(ValueError):
        build_example1(0.5, 0.5, 0.0, lam="automatic")
    with pytest.raises(ValueError):
        build_example1(0.5, 0.5, 0.0, chi="sawtooth")


def test_example1_value_and_bounds():
    prof = build_example1(0.5, 0.5, 0.0)
    ts = np.linspace(0.0, 300.0, 700)
    vals = np.array([prof.value(t) for t in ts])
    assert np.all(vals >= prof.a0 - 1e-12)
    assert np.all(vals <= prof.a1 + 1e-12)
    # a(t) = 1 + (1+t)^{-p} chi((1+t)^q) with chi = cos + 2
    t = 7.3
    expected = 1.0 + (1 + t) ** -0.5 * (math.cos((1 + t) ** 0.5) + 2.0)
    assert prof.value(t) == pytest.approx(expected, rel=1e-14)
    assert prof.a1 == pytest.approx(4.0)


def test_example1_jet_matches_value_fn():
    prof = build_example1(0.75, 0.25, 1.0, m=3)
    for t in (0.0, 0.4, 11.0, 900.0):
        assert prof.jet(t, 0).value.real == pytest.approx(prof.value(t), rel=1e-13)


def test_example1_jet_matches_finite_differences():
    prof = build_example1(0.5, 0.5, 0.0, m=2)
    t, h = 3.0, 0.02
    for k in (1, 2):
        exact = prof.deriv(t, k)
        err_h = abs(central_fd(prof.value, t, k, h) - exact)
        err_h2 = abs(central_fd(prof.value, t, k, h / 2) - exact)
        assert err_h < 1e-4
        # central differences converge at second order
        assert err_h2 < err_h / 3.0


def test_example1_deviation_integral_matches_quadrature():
    prof = build_example1(2.0, 1.0, 0.0)
    ref, _ = quad(lambda s: abs(prof.value(s) - 1.0), 0.0, 40.0, limit=200)
    assert prof.deviation_integral(40.0) == pytest.approx(ref, rel=1e-9)


def test_example1_auto_lambda():
    prof = build_example1(0.0, 0.5, 0.0, m=3, lam="auto")
    assert prof.lam is not None
    assert prof.lam(3.0) == pytest.approx(2.0)
    explicit = build_example1(0.5, 0.5, 0.0).with_lambda(PowerLog(1.0, s=0.5))
    assert explicit.lam(8.0) == pytest.approx(3.0)


# -- bump family --------------------------------------------------------------


def test_example2_parameter_validation():
    with pytest.raises(ValueError):
        build_example2(eta=2.5)
    with pytest.raises(ValueError):
        build_example2(alpha=0.0)
    with pytest.raises(ValueError):
        build_example2(alpha=0.8, kappa=0.5)
    with pytest.raises(ValueError):
        build_example2(alpha=0.5, beta=0.2, kappa=0.5)  # below the feasible box
    with pytest.raises(ValueError):
        build_example2(m=0)


def test_example2_bumps_disjoint_and_off_bump_flat():
    prof = build_example2(eta=3.0, alpha=1.0, beta=1.0, kappa=1.0, m=2, horizon=500.0)
    edges = prof.breakpoints
    assert len(edges) >= 4
    assert all(edges[i] < edges[i + 1] for i in range(len(edges) - 1))
    lefts, rights = edges[0::2], edges[1::2]
    assert all(r > l for l, r in zip(lefts, rights))
    assert all(l2 > r1 for r1, l2 in zip(rights, lefts[1:]))
    # between bumps the speed is exactly 1 with vanishing derivatives
    mid = 0.5 * (rights[0] + lefts[1])
    assert prof.value(mid) == 1.0
    jet = prof.jet(mid, 2 * prof.m + 1)
    np.testing.assert_array_equal(jet.c[1:], 0.0)
    assert prof.value(0.0) == 1.0


def test_example2_bump_shape_and_fd():
    prof = build_example2(eta=3.0, alpha=1.0, beta=1.0, kappa=1.0, m=2, horizon=500.0)
    left, right = prof.breakpoints[0], prof.breakpoints[1]
    ts = np.linspace(left, right, 400)
    vals = np.array([prof.value(t) for t in ts])
    assert vals.max() > 1.0
    assert prof.a1 >= vals.max() - 1e-12
    # pick a sample with visible slope for the derivative cross-check
    h = 1e-5
    slopes = [abs(central_fd(prof.value, t, 1, h)) for t in ts[1:-1]]
    t = ts[1 + int(np.argmax(slopes))]
    for k in (1, 2):
        exact = prof.deriv(t, k)
        assert central_fd(prof.value, t, k, h) == pytest.approx(exact, rel=1e-4, abs=1e-6)


def test_example2_coverage_horizon():
    prof = build_example2(horizon=100.0)
    assert prof.t_covered >= 400.0
    with pytest.raises(NumericalError):
        prof.value(prof.t_covered * 1.5)


# -- hypothesis fits ----------------------------------------------------------


def test_sup_fit_stability_flag():
    ts = np.geomspace(1.0, 1e4, 200)
    c, t_worst, stable = sup_fit(ts, 3.0 - 1.0 / ts)
    assert c == pytest.approx(3.0, rel=1e-3)
    assert stable
    c2, t2, stable2 = sup_fit(ts, np.log(ts))
    assert not stable2
    assert t2 == pytest.approx(1e4)


def test_default_time_grid_shape():
    grid = default_time_grid(1e3)
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(1e3)
    assert np.all(np.diff(grid) > 0)


def test_hypotheses_example1_slow_oscillation():
    report = verify_hypotheses(build_example1(0.5, 0.5, 0.0, m=2))
    for name in ("H1*", "H2*", "H3*", "H4*"):
        assert report.holds(name), name
    assert report.c1 > 0.0


def test_hypotheses_h4_depends_on_log_weight():
    # p = q = 0 with xi_control (1+t) log(e+t)^{1-r}: the H4* tail integral
    # is bounded at r = 1 and grows like log^{m(r-1)} beyond
    holds = verify_hypotheses(build_example1(0.0, 0.0, 1.0, m=2))
    assert holds.holds("H4*")
    fails = verify_hypotheses(build_example1(0.0, 0.0, 1.5, m=2))
    assert not fails.holds("H4*")


def test_hypotheses_h4_fails_for_p_equal_q_one():
    report = verify_hypotheses(build_example1(1.0, 1.0, 0.0, m=2))
    assert report.holds("H1*")
    assert report.holds("H2*")
    assert not report.holds("H4*")


def test_hypotheses_explicit_selection_validation():
    prof = build_example1(0.5, 0.5, 0.0, m=1)
    with pytest.raises(ValueError):
        verify_hypotheses(prof, which=("H4*",))  # needs m >= 2
    with pytest.raises(ValueError):
        verify_hypotheses(prof, which=("H5*",))  # needs lam
    with pytest.raises(ValueError):
        verify_hypotheses(prof, which=("H9*",))


def test_lambda_branch_applicability():
    prof = build_example1(0.0, 0.5, 0.0, m=3, lam="auto")
    report = verify_hypotheses(prof)
    assert report.holds("H5*")
    assert report.holds("H6*")
    assert report.holds("La-infty")
    assert lambda_applicable(report)
    # a constant majorant cannot outgrow lambda
    flat = build_example1(2.0, 1.0, 0.0).with_lambda(PowerLog(1.0, s=0.5))
    assert not lambda_applicable(verify_hypotheses(flat))


def test_lambda_inverse_closed_forms():
    linear = constant_profile().with_lambda(PowerLog(1.0, s=1.0))
    assert lambda_inverse(linear, 5.0) == pytest.approx(4.0, rel=1e-12)
    root = constant_profile().with_lambda(PowerLog(1.0, s=0.5))
    assert lambda_inverse(root, 3.0) == pytest.approx(8.0, rel=1e-12)
    with pytest.raises(ValueError):
        lambda_inverse(root, 0.5)
    with pytest.raises(ValueError):
        lambda_inverse(constant_profile(), 1.0)


# -- regime classification ----------------------------------------------------


def test_gec_case_assignments():
    assert gec_case(build_example1(2.0, 1.0, 0.0)) == "i"
    assert gec_case(build_example1(0.5, 0.25, 0.0, m=1)) == "ii"
    assert gec_case(build_example1(0.5, 0.5, 0.0, m=2)) == "iii"
    assert gec_case(build_example1(1.0, 1.0, 0.0, m=2)) is None
    # m = 1 with a divergent inverse-control integral has no certificate
    assert gec_case(build_example1(0.25, 0.5, 0.0, m=1)) is None


def test_frozen_inverse_control_l1_norm():
    prof = build_example1(0.5, 0.25, 0.0, m=1)
    assert prof.xi_control.l1_norm_of_inverse() == pytest.approx(4.0, rel=1e-12)
