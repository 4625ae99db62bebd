"""Weight sequences, associated functions, data checks, and the boundedness gate."""

import math

import numpy as np
import pytest

from sdwavelab.gevrey import (
    LogConvexSequence,
    associated_function,
    boundedness_gate,
    build_gevrey_data,
    decay_check,
    domination_constant,
    growth_ratio,
    log_associated_function,
    moment_check,
    weighted_initial_energy,
)
from sdwavelab.lattice import LatticeField, ThetaGrid, delta, dtft, dtft_on_grid
from sdwavelab.powerlog import PowerLog
from sdwavelab.profiles import build_example1


def gevrey_profile():
    # power-law deviation with square-root lambda control
    return build_example1(0.0, 0.5, 0.0, m=3, lam="auto")


# -- sequences ---------------------------------------------------------------


def test_sequence_constructors_validate():
    with pytest.raises(ValueError):
        LogConvexSequence.factorial_power(0.5)
    with pytest.raises(ValueError):
        LogConvexSequence.exponential(0.0, 2.0)
    with pytest.raises(ValueError):
        LogConvexSequence.exponential(1.0, 1.0)
    with pytest.raises(ValueError):
        LogConvexSequence.constant(0.0)
    with pytest.raises(ValueError):
        LogConvexSequence.from_table([])
    with pytest.raises(ValueError):
        LogConvexSequence.from_table([1.0, -2.0])
    with pytest.raises(ValueError, match="j = 1"):
        LogConvexSequence.from_table([1.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        LogConvexSequence.factorial_power(2.0).log_m(-1)


def test_from_table_minimal_extension():
    seq = LogConvexSequence.from_table([1.0, 1.0, 2.0])
    assert seq.log_m(2) == pytest.approx(math.log(2.0))
    # beyond the table the last ratio (2) repeats
    assert seq.log_m(3) == pytest.approx(math.log(4.0))
    assert seq.log_m(5) == pytest.approx(math.log(16.0))


def test_factorial_power_values():
    seq = LogConvexSequence.factorial_power(2.0)
    assert seq.log_m(3) == pytest.approx(2 * math.log(6.0), rel=1e-14)


# -- associated function ------------------------------------------------------


def test_associated_function_exact_factorial_value():
    seq = LogConvexSequence.factorial_power(1.0)
    # sup_j 4^j/j! is attained at j = 3 and j = 4, both give 32/3
    assert associated_function(seq, 4.0) == 32.0 / 3.0


def test_associated_function_brute_force():
    seq = LogConvexSequence.factorial_power(2.0)
    for tau in (0.5, 10.0, 250.0):
        brute = max(tau**j / math.factorial(j) ** 2 for j in range(80))
        assert associated_function(seq, tau) == pytest.approx(brute, rel=1e-12)
        assert log_associated_function(seq, tau) == pytest.approx(math.log(brute), rel=1e-12)


def test_associated_function_divided_mode():
    # {M_j/j!} with M_j = j!^2 is j!, so T_div(4) = 32/3 again
    seq = LogConvexSequence.factorial_power(2.0)
    assert associated_function(seq, 4.0, mode="factorial-divided") == 32.0 / 3.0


def test_associated_function_edges():
    seq = LogConvexSequence.factorial_power(1.5)
    assert log_associated_function(seq, 0.0) == pytest.approx(0.0)  # -log M_0
    with pytest.raises(ValueError):
        log_associated_function(seq, -1.0)
    with pytest.raises(ValueError):
        log_associated_function(seq, 1.0, mode="divided")
    # constant sequences have unbounded raw suprema for tau > 1
    const = LogConvexSequence.constant(1.0)
    assert log_associated_function(const, 2.0) == math.inf
    assert associated_function(const, 2.0) == math.inf
    # dividing a constant by j! breaks log-convexity; the scan detects it
    with pytest.raises(ValueError, match="log-convex"):
        log_associated_function(const, 2.0, mode="factorial-divided")


def test_associated_function_lower_bound_shape():
    # for M_j = j!^nu: T[{M_j/j!}](tau) >= c tau^{-1/2} exp((nu-1) tau^{1/(nu-1)})
    for nu in (2.0, 3.0):
        seq = LogConvexSequence.factorial_power(nu)
        taus = np.geomspace(1.0, 1e4, 400)
        logs = np.array([log_associated_function(seq, float(t), mode="factorial-divided") for t in taus])
        shape = (nu - 1.0) * taus ** (1.0 / (nu - 1.0)) - 0.5 * np.log(taus)
        gap = logs - shape
        assert np.all(np.isfinite(gap))
        # the fitted constant is positive and not attained in the far tail
        assert int(np.argmin(gap)) < len(taus) - 1


# -- data families ------------------------------------------------------------


def test_sine_power_small_case_coefficients():
    g = build_gevrey_data("sine-power", M0=2.0, truncation=32)
    assert g.field.get((0,)) == pytest.approx(0.5, abs=1e-12)
    assert g.field.get((1,)) == pytest.approx(-0.25, abs=1e-12)
    assert g.field.get((-1,)) == pytest.approx(-0.25, abs=1e-12)
    assert g.field.support_size == 3


def test_sine_power_support_and_moments():
    g = build_gevrey_data("sine-power", M0=8.0, truncation=64)
    radii = [abs(k[0]) for k, _ in g.field.items()]
    assert max(radii) == 4
    assert moment_check(g.field, 6).passed
    assert moment_check(g.field, 7).passed
    res = moment_check(g.field, 8)
    assert not res.passed
    assert res.failing == (8,)


def test_sine_power_spectrum_matches_dtft():
    g = build_gevrey_data("sine-power", M0=8.0, truncation=64)
    grid = ThetaGrid.build(1, 64)
    amp = np.abs(dtft_on_grid(g.field, grid))
    np.testing.assert_allclose(amp**2, g.spectrum(grid.axis), atol=1e-10)
    assert g.spectrum(np.array([math.pi]))[0] == pytest.approx(1.0)


def test_exp_flat_spectrum_values():
    g = build_gevrey_data("exp-flat", rho=1.0, kappa=2.0, truncation=128)
    # at theta = pi: |xi| = 2 and log E(0) = -2^(kappa+1) rho 2^(-kappa) = -2 rho
    assert g.log_spectrum(np.array([math.pi]))[0] == pytest.approx(-2.0, rel=1e-12)
    assert g.spectrum(np.array([math.pi]))[0] == pytest.approx(math.exp(-2.0), rel=1e-12)
    vals = [v for _, v in g.field.items()]
    assert max(abs(v.imag) for v in vals) == 0.0
    theta = np.linspace(0.7, math.pi, 40)
    amp = np.array([abs(dtft(g.field, (float(t),))) for t in theta])
    np.testing.assert_allclose(amp**2, g.spectrum(theta), atol=1e-12, rtol=1e-6)


def test_build_gevrey_data_validation():
    with pytest.raises(ValueError):
        build_gevrey_data("sine-power", M0=8.0, truncation=8)
    with pytest.raises(ValueError):
        build_gevrey_data("sine-power")
    with pytest.raises(ValueError):
        build_gevrey_data("exp-flat", rho=1.0)
    with pytest.raises(ValueError):
        build_gevrey_data("white-noise", M0=1.0)


# -- moment and decay checks --------------------------------------------------


def test_moment_check_failures_and_edges():
    res = moment_check(delta(1), 0)
    assert not res.passed
    assert res.failing == (0,)
    assert moment_check(LatticeField.from_dict(1, {}), 4).passed
    with pytest.raises(ValueError):
        moment_check(delta(1), -1)


def test_decay_check_finite_support_passes():
    g = build_gevrey_data("sine-power", M0=8.0, truncation=64)
    res = decay_check(g.field, LogConvexSequence.factorial_power(1.5), 1.0)
    assert res.passed
    assert math.isfinite(res.log_constant)
    assert res.constant > 0.0


def test_decay_check_growing_tail_fails():
    flat = LatticeField.from_dict(1, {(k,): 1.0 for k in range(1, 31)})
    res = decay_check(flat, LogConvexSequence.factorial_power(2.0), 1.0)
    assert not res.passed
    assert res.worst_key == (30,)


def test_decay_check_edges():
    assert decay_check(LatticeField.from_dict(1, {}), LogConvexSequence.factorial_power(2.0), 1.0).passed
    with pytest.raises(ValueError):
        decay_check(delta(1), LogConvexSequence.factorial_power(2.0), 0.0)


# -- domination constant and growth ratio -------------------------------------


def test_growth_ratio_frozen_values():
    prof = gevrey_profile()
    # Theta(Lam^{-1}(N tau))/(N Theta(Lam^{-1}(tau))) = N tau^2 clamped: inf = N/4
    for n, expected in ((1, 1.0), (2, 0.5), (4, 1.0), (8, 2.0), (16, 4.0), (64, 16.0)):
        assert growth_ratio(prof, float(n)) == pytest.approx(expected, rel=1e-9)
    with pytest.raises(ValueError):
        growth_ratio(prof, 0.0)


def test_domination_constant_brute_force():
    prof = gevrey_profile()
    seq = LogConvexSequence.factorial_power(1.5)
    n = 2.0
    got = domination_constant(n, seq, prof, return_log=True)
    taus = np.geomspace(1.0, 1e6, 30000)
    brute = min(
        log_associated_function(seq, float(t), mode="factorial-divided")
        - math.exp(min(math.log(3.0) + 2.0 * math.log1p((n * t) ** 2 - 1.0) / 2.0, 700.0)) / t
        for t in taus
    )
    # same objective on a much denser grid
    assert got <= brute + 1e-9
    assert got == pytest.approx(brute, abs=5e-3)


def test_domination_constant_validation_and_scaling():
    prof = gevrey_profile()
    seq = LogConvexSequence.factorial_power(1.5)
    with pytest.raises(ValueError):
        domination_constant(0.0, seq, prof)
    log_d = domination_constant(4.0, seq, prof, return_log=True)
    lin = domination_constant(4.0, seq, prof)
    assert lin == pytest.approx(math.exp(log_d)) if log_d > -700 else lin == 0.0


def test_domination_boundary_small_n_survives():
    # at nu = 2 the domination constant is positive only for small N
    prof = gevrey_profile()
    seq = LogConvexSequence.factorial_power(2.0)
    assert math.isfinite(domination_constant(0.5, seq, prof, return_log=True))
    assert domination_constant(1.0, seq, prof, return_log=True) == -math.inf
    assert domination_constant(8.0, seq, prof, return_log=True) == -math.inf


# -- weighted initial energy ---------------------------------------------------


def test_weighted_energy_exp_flat_finite():
    prof = gevrey_profile()
    g = build_gevrey_data("exp-flat", rho=1.0, kappa=2.0, truncation=128)
    zero = LatticeField.from_dict(1, {})
    log_u = weighted_initial_energy(1.0, zero, g.field, prof, log_spectrum=g.log_spectrum, return_log=True)
    assert math.isfinite(log_u)
    lin = weighted_initial_energy(1.0, zero, g.field, prof, log_spectrum=g.log_spectrum)
    assert lin == pytest.approx(math.exp(log_u), rel=1e-12)


def test_weighted_energy_polynomial_flatness_diverges():
    prof = gevrey_profile()
    g = build_gevrey_data("sine-power", M0=8.0, truncation=64)
    zero = LatticeField.from_dict(1, {})
    assert weighted_initial_energy(1.0, zero, g.field, prof) == math.inf


def test_weighted_energy_flat_spectrum_diverges():
    # u1 = delta has no decay at theta = 0 and theta/lam grows without bound
    prof = gevrey_profile()
    zero = LatticeField.from_dict(1, {})
    assert weighted_initial_energy(1.0, zero, delta(1), prof) == math.inf


def test_weighted_energy_validation():
    prof = gevrey_profile()
    zero = LatticeField.from_dict(1, {})
    with pytest.raises(ValueError):
        weighted_initial_energy(0.0, zero, delta(1), prof)
    with pytest.raises(ValueError):
        weighted_initial_energy(1.0, delta(2), delta(1), prof)
    with pytest.raises(ValueError):
        weighted_initial_energy(1.0, zero, delta(1), build_example1(0.5, 0.5, 0.0))


# -- the gate ------------------------------------------------------------------


def test_gate_case_i_slow_weight():
    result = boundedness_gate((1.0, 2.0, 4.0, 8.0), LogConvexSequence.factorial_power(1.5), gevrey_profile())
    assert result.case == "i"
    assert result.N0 is None
    assert np.all(result.log_domination > -math.inf)


def test_gate_case_ii_via_growth():
    result = boundedness_gate(
        (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0),
        LogConvexSequence.factorial_power(2.0),
        gevrey_profile(),
        threshold=10.0,
    )
    assert result.case == "ii"
    assert result.N0 == 64.0
    assert not np.all(result.log_domination > -math.inf)
    np.testing.assert_allclose(result.growth[-1], 16.0, rtol=1e-9)


def test_gate_neither_when_growth_flat_and_domination_lost():
    result = boundedness_gate((1.0, 2.0), LogConvexSequence.factorial_power(2.0), gevrey_profile())
    assert result.case == "neither"
    assert result.N0 is None


def test_gate_validation():
    with pytest.raises(ValueError):
        boundedness_gate((), LogConvexSequence.factorial_power(1.5), gevrey_profile())
    with pytest.raises(ValueError):
        boundedness_gate((0.0, 1.0), LogConvexSequence.factorial_power(1.5), gevrey_profile())


def test_gate_exponential_sequence_flat_growth():
    # linear-in-t control with matching lambda: weight exp(Theta/tau) is
    # constant in tau, so every N keeps a positive domination constant
    # while the growth ratio never climbs
    prof = build_example1(0.0, 0.0, 1.0, m=2, lam="auto")
    seq = LogConvexSequence.exponential(1.0, 2.0)
    result = boundedness_gate((1.0, 2.0, 4.0, 8.0, 16.0), seq, prof)
    assert result.case == "i"
    assert np.all(result.growth <= 1.0 + 1e-9)


def test_gate_exponential_sequence_log_weight_interplay():
    # with (1+t)/log^2(e+t) lambda control the weight grows like
    # exp(3N log^2(N tau)); sup_j (tau^j e^{-b j^sigma}) has log order
    # (log tau)^{sigma/(sigma-1)}, so only sigma < 2 can outrun it.  The
    # small b keeps the crossover inside the finite search range.
    prof = build_example1(0.0, 0.0, 3.0, m=2, lam=PowerLog(1.0, s=1.0, w=-2.0))
    slow = boundedness_gate((1.0, 2.0, 4.0), LogConvexSequence.exponential(0.1, 1.5), prof)
    assert slow.case == "i"
    fast = boundedness_gate((1.0, 2.0, 4.0), LogConvexSequence.exponential(1.0, 3.0), prof)
    assert fast.case == "neither"
