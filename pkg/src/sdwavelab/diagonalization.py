"""Zone decomposition, iterative diagonalization, and energy-bound certificates.

The reduced oscillator for one frequency is rewritten as a first-order
2x2 system whose matrix has the conjugate-pair form [[phi, conj r], [r,
conj phi]].  Away from low frequencies (the "hyperbolic" region, past
the zone boundary where control(t)*|xi| reaches the zone constant N) the
off-diagonal entry is iteratively removed: each step diagonalizes by the
eigenvector matrix M_k = [[1, conj delta_k], [delta_k, 1]] and produces a
remainder one derivative-order smaller.  Before the boundary (the
"slow" region) a direct Gronwall bound on the stabilized energy applies.

Both mechanisms are assembled into two-sided envelopes for the energy
ratio of each mode, so a direct numerical integration can be checked
against the theory:

* slow region:  exp(+-(2 a1/a0) |xi| int_0^t |a - a_inf|), converted
  between the actual and stabilized densities by speed-ratio factors;
* hyperbolic region: the exactly telescoped amplitude
  (a(t)/a(t_xi)) * prod (1-|delta_k|^2)-ratios, times exp(+-2 int |r_m|),
  times the norm-equivalence constants ((3+-2 sqrt 2)/2)^(m-1) of the
  diagonalizer chain.

The zone constant N is escalated (doubled) until every smallness
condition the chain needs holds at every point it is evaluated at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EscalationFailed, ZoneConstantTooSmall
from .jets import Jet
from .lattice import FrequencyPoint
from .powerlog import PowerLog
from .profiles import (
    HypothesisReport,
    SpeedProfile,
    gec_case,
    lambda_applicable,
    sup_fit,
    verify_hypotheses,
)
from .solver import ModeState

N_START = 16.0
N_CAP = 2.0**16

#: norm-equivalence base per diagonalization level: (1 +- 1/sqrt 2)^2
_EQ_LO = (3.0 - 2.0 * math.sqrt(2.0)) / 2.0
_EQ_HI = (3.0 + 2.0 * math.sqrt(2.0)) / 2.0


# -- zone partition ----------------------------------------------------------


@dataclass(frozen=True)
class ZonePartition:
    """Split of the (t, |xi|) half-strip by control(t)*|xi| = N."""

    N: float
    dim: int
    flavor: str  # "theta" | "lambda"
    control: PowerLog = field(repr=False)
    T0: float

    def boundary(self, xi_norm: float) -> float:
        """Boundary time for one frequency: +inf when the product stays below N."""
        top = 2.0 * math.sqrt(self.dim)
        if not 0.0 <= xi_norm <= top * (1.0 + 1e-12):
            raise ValueError(f"|xi| = {xi_norm:g} outside [0, 2 sqrt(d)]")
        if xi_norm == 0.0:
            return math.inf
        if self.control(self.T0) * xi_norm >= self.N:
            return self.T0
        target = self.N / xi_norm
        if self.control.is_constant and self.control.coef < target:
            return math.inf
        return self.control.inverse(target)


def make_partition(profile: SpeedProfile, N: float, dim: int, flavor: str = "theta") -> ZonePartition:
    if flavor == "theta":
        control = profile.theta
    elif flavor == "lambda":
        if profile.lam is None:
            raise ValueError("lambda-flavored zones need an attached lam control function")
        control = profile.lam
    else:
        raise ValueError("flavor must be 'theta' or 'lambda'")
    if N <= 0:
        raise ValueError("zone constant N must be positive")
    target = N / (2.0 * math.sqrt(dim))
    if control(0.0) > target:
        t0 = 0.0  # boundary level lies below the control at t = 0: empty set convention
    elif control.is_constant and control.coef < target:
        t0 = 0.0  # never attained
    else:
        t0 = control.inverse(target)
        if math.isinf(t0):
            t0 = 0.0
    return ZonePartition(N=float(N), dim=dim, flavor=flavor, control=control, T0=t0)


def zone_boundary(partition: ZonePartition, xi_norm: float) -> float:
    return partition.boundary(xi_norm)


# -- conjugate-pair systems and the chain ------------------------------------


@dataclass(frozen=True)
class ConjugateSystem:
    """Matrix [[phi, conj r], [r, conj phi]] at one (t, xi), with entry jets."""

    phi: complex
    r: complex
    level: int
    deriv_budget: int
    phi_jet: Jet = field(repr=False)
    r_jet: Jet = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.phi, np.conj(self.r)], [self.r, np.conj(self.phi)]])

    @property
    def phi_im(self) -> float:
        return float(self.phi.imag)


def level1_system(profile: SpeedProfile, t: float, xi_norm: float, order: int | None = None) -> ConjugateSystem:
    """Entries phi_1 = a'/(2a) + i a |xi| and r_1 = -a'/(2a) as jets."""
    if xi_norm <= 0:
        raise ValueError("the first-order system needs |xi| > 0")
    n = profile.m - 1 if order is None else int(order)
    if n < 0:
        raise ValueError("entry jets need order >= 0")
    a = profile.jet(t, n + 1)
    g = a.deriv() / (a.truncate(n) * 2.0)  # a'/(2a)
    phi = g + a.truncate(n) * (1j * xi_norm)
    r = g * (-1.0)
    return ConjugateSystem(
        phi=complex(phi.value),
        r=complex(r.value),
        level=1,
        deriv_budget=n,
        phi_jet=phi,
        r_jet=r.astype(complex),
    )


def first_order_system(profile: SpeedProfile, xi: FrequencyPoint, state: ModeState):
    """(V1, A1) for one mode state: V1 = (v' + i a|xi| v, v' - i a|xi| v)."""
    if xi.xi_norm <= 0:
        raise ValueError("the first-order system needs |xi| > 0")
    a = profile.value(state.t)
    ia = 1j * a * xi.xi_norm
    v1 = np.array([state.vt + ia * state.v, state.vt - ia * state.v])
    return v1, level1_system(profile, state.t, xi.xi_norm)


@dataclass(frozen=True)
class DiagStep:
    """One diagonalization step: eigenvalue, diagonalizer entry, next system."""

    lam: complex
    delta: complex
    M: np.ndarray = field(repr=False)
    next_system: ConjugateSystem
    delta_jet: Jet = field(repr=False)
    root: float  # sqrt(1 - (|r|/phi_im)^2) at the evaluation point


def diag_step(system: ConjugateSystem, strict: bool = True) -> DiagStep:
    """Diagonalize [[phi, conj r], [r, conj phi]] by M = [[1, conj d], [d, 1]].

    The produced entries follow the exact recursion
        r_next   = -delta' / (1 - |delta|^2),
        phi_next = lambda - conj(delta) * r_next,
    equal to the conjugation M^{-1}(A M - M') whenever lambda, delta are
    the eigen-quantities; delta uses the cancellation-free form
    -i (r/phi_im) / (1 + root).

    With ``strict`` the smallness regime of the hyperbolic region is
    enforced: (|r|/phi_im)^2 <= 1/4, |delta|^2 <= 1/2, and an imaginary
    correction at most phi_im*root/4; violations raise
    ZoneConstantTooSmall so callers can enlarge the zone constant.
    """
    if system.deriv_budget < 1:
        raise ValueError(f"level-{system.level} system has no derivative budget left")
    phi, r = system.phi_jet, system.r_jet
    n = min(phi.order, r.order)
    phi_im = phi.imag()
    if phi_im.value <= 0:
        raise ZoneConstantTooSmall(f"nonpositive imaginary part {phi_im.value:g} at level {system.level}")
    ratio2 = r.abs2() / (phi_im * phi_im)
    if ratio2.value >= 1.0:
        raise ZoneConstantTooSmall(
            f"(|r|/phi_im)^2 = {ratio2.value:g} >= 1 at level {system.level}"
        )
    if strict and ratio2.value > 0.25:
        raise ZoneConstantTooSmall(
            f"(|r|/phi_im)^2 = {ratio2.value:g} > 1/4 at level {system.level}"
        )
    root = (ratio2 * (-1.0) + 1.0).sqrt()
    lam = phi.real() + phi_im * root * 1j
    delta = (r / phi_im) * (-1j) / (root + 1.0)
    abs_d2 = delta.abs2()
    if strict and abs_d2.value > 0.5:
        raise ZoneConstantTooSmall(f"|delta|^2 = {abs_d2.value:g} > 1/2 at level {system.level}")
    one_minus = (abs_d2 * (-1.0) + 1.0).truncate(n - 1)
    r_next = delta.deriv() / one_minus * (-1.0)
    phi_next = lam.truncate(n - 1) - delta.conj().truncate(n - 1) * r_next
    im_corr = float((delta.conj() * r_next).value.imag)
    if strict and abs(im_corr) > 0.25 * phi_im.value * root.value:
        raise ZoneConstantTooSmall(
            f"imaginary correction {im_corr:g} exceeds phi_im*root/4 at level {system.level}"
        )
    d = complex(delta.value)
    nxt = ConjugateSystem(
        phi=complex(phi_next.value),
        r=complex(r_next.value),
        level=system.level + 1,
        deriv_budget=system.deriv_budget - 1,
        phi_jet=phi_next,
        r_jet=r_next,
    )
    return DiagStep(
        lam=complex(lam.value),
        delta=d,
        M=np.array([[1.0 + 0j, np.conj(d)], [d, 1.0 + 0j]]),
        next_system=nxt,
        delta_jet=delta,
        root=float(root.value.real),
    )


@dataclass(frozen=True)
class DiagChain:
    """Levels 1..m-1 with their diagonalizers, plus the final level-m system."""

    t: float
    xi_norm: float
    steps: tuple
    final: ConjugateSystem

    @property
    def deltas(self) -> tuple:
        return tuple(s.delta for s in self.steps)

    def one_minus_delta_sq(self) -> float:
        """prod_k (1 - |delta_k|^2) across the chain."""
        out = 1.0
        for s in self.steps:
            out *= 1.0 - abs(s.delta) ** 2
        return out

    def push_through(self, v1) -> np.ndarray:
        """Transport a level-1 vector to the final level: V_{k+1} = M_k^{-1} V_k."""
        v = np.asarray(v1, dtype=complex)
        for s in self.steps:
            d = s.delta
            det = 1.0 - abs(d) ** 2
            v = np.array([v[0] - np.conj(d) * v[1], v[1] - d * v[0]]) / det
        return v


def eigen_residual(system: ConjugateSystem, step: DiagStep) -> float:
    """max-norm of A w - lambda w for the eigenpair (lambda, (1, delta))."""
    w = np.array([1.0 + 0j, step.delta])
    return float(np.max(np.abs(system.matrix @ w - step.lam * w)))


def build_chain(profile: SpeedProfile, t: float, xi_norm: float, strict: bool = True) -> DiagChain:
    """Run the full diagonalization at one (t, |xi|), m-1 steps."""
    system = level1_system(profile, t, xi_norm)
    steps = []
    for _ in range(profile.m - 1):
        step = diag_step(system, strict=strict)
        steps.append(step)
        system = step.next_system
    return DiagChain(t=t, xi_norm=xi_norm, steps=tuple(steps), final=system)


def norm_equivalence_bounds(m: int) -> tuple:
    """Two-sided constants for ||V_1||^2 / ||V_m||^2 through the chain."""
    return _EQ_LO ** (m - 1), _EQ_HI ** (m - 1)


# -- symbol-class fitting -----------------------------------------------------


@dataclass(frozen=True)
class SymbolClassFit:
    constant: float
    worst: tuple
    stable: bool


def verify_symbol_class(f, order_p: int, xi_power_q: float, decay_r: float, profile: SpeedProfile, region) -> SymbolClassFit:
    """Fit sup |d_t^k f| * |xi|^{-q} * xi_control(t)^{r+k} over a region.

    ``f(t, xi_norm)`` must return a jet of order >= order_p; ``region``
    is a sequence of (t, xi_norm) pairs.  The fit is marked unstable when
    the supremum still grows over the tail of the region's time range.
    """
    region = sorted(region)
    ts = np.array([t for t, _ in region])
    vals = np.empty(len(region))
    worst = (math.nan, math.nan, -1)
    best = -math.inf
    for i, (t, xi_norm) in enumerate(region):
        jet = f(t, xi_norm)
        if jet.order < order_p:
            raise ValueError(f"symbol jet of order {jet.order} cannot verify order {order_p}")
        xs = profile.xi_control(t)
        v = 0.0
        for k in range(order_p + 1):
            term = abs(complex(jet.derivative(k))) * xi_norm ** (-xi_power_q) * xs ** (decay_r + k)
            v = max(v, term)
        vals[i] = v
        if v > best:
            best, worst = v, (t, xi_norm, i)
    constant, _, stable = sup_fit(ts, vals)
    return SymbolClassFit(constant=constant, worst=worst[:2], stable=stable)


# -- weighted-zone helpers ----------------------------------------------------


def weight_modulus(profile: SpeedProfile, r: float) -> float:
    """r * theta(lam^{-1}(1/r)); decreasing in r when theta/lam grows."""
    if profile.lam is None:
        raise ValueError("the weight modulus needs an attached lam control function")
    if r <= 0:
        raise ValueError("the weight modulus needs r > 0")
    lam0 = float(profile.lam(0.0))
    if 1.0 / r < lam0:
        raise ValueError(f"mu needs 1/r >= lam(0) = {lam0:g}")
    t = profile.lam.inverse(1.0 / r)
    if math.isinf(t):
        return math.inf
    return r * float(profile.theta(t))


def growth_weight_log(profile: SpeedProfile, N: float, xi_norm: float, coefficient: float = 2.0) -> float:
    """log of the weighted-energy factor exp(c*|xi|*theta(lam^{-1}(N/|xi|))).

    Computed in log coordinates so tiny |xi| (huge inverse arguments)
    cannot overflow; returns +inf in the genuinely divergent limit.
    """
    if profile.lam is None:
        raise ValueError("the weight needs an attached lam control function")
    if xi_norm < 0:
        raise ValueError("|xi| must be nonnegative")
    if xi_norm == 0.0:
        return math.inf if not profile.theta.is_constant else 0.0
    y = N / xi_norm
    lam0 = float(profile.lam(0.0))
    if y <= lam0:
        u = 0.0
    else:
        u = profile.lam.inverse_u(math.log(y))
    log_theta = profile.theta.log_value_u(u)
    return coefficient * xi_norm * math.exp(min(log_theta, 709.0)) if log_theta <= 709.0 else math.inf


# -- certificates -------------------------------------------------------------


def _exp_cap(x: float) -> float:
    """exp with graceful saturation; huge certificate exponents are legitimate."""
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


@dataclass(frozen=True)
class ModeCertificate:
    """Two-sided envelopes for one mode's energy ratio E(t)/E(0).

    The t-uniform constants are kept in log scale as well: weighted-zone
    certificates legitimately carry exponents in the thousands, far past
    float range in linear scale.
    """

    xi_norm: float
    t_xi: float
    N_used: float
    times: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    lower_const: float
    upper_const: float
    log_lower_const: float
    log_upper_const: float
    c_rm: float

    def contains(self, ratios: np.ndarray, slack: float = 0.0) -> bool:
        r = np.asarray(ratios)
        return bool(np.all(r >= self.lower * (1 - slack)) and np.all(r <= self.upper * (1 + slack)))


@dataclass(frozen=True)
class CertificateSet:
    case: str
    partition: ZonePartition | None
    report: HypothesisReport
    certificates: tuple


def _conv_factors(profile: SpeedProfile, t: float) -> tuple:
    """Pointwise conversion between actual and stabilized densities at t and 0."""
    rt = (profile.value(t) / profile.a_inf) ** 2
    r0 = (profile.a_inf / profile.value(0.0)) ** 2
    return min(1.0, rt) * min(1.0, r0), max(1.0, rt) * max(1.0, r0)


def _conv_const(profile: SpeedProfile) -> tuple:
    r1 = (profile.a1 / profile.a_inf) ** 2
    r0 = (profile.a_inf / profile.value(0.0)) ** 2
    lo = min(1.0, (profile.a0 / profile.a_inf) ** 2) * min(1.0, r0)
    return lo, max(1.0, r1) * max(1.0, r0)


def _gronwall_mode(profile: SpeedProfile, xi_norm: float, times: np.ndarray, cap: float) -> tuple:
    """Slow-region envelopes from the stabilized-energy Gronwall bound.

    Returns per-time arrays plus log-scale t-uniform constants, with the
    exponent capped by ``cap`` (a bound on |xi| * deviation integral).
    """
    c = 2.0 * profile.a1 / profile.a0
    lower = np.empty_like(times)
    upper = np.empty_like(times)
    for i, t in enumerate(times):
        lo_c, up_c = _conv_factors(profile, float(t))
        e = c * xi_norm * profile.deviation_integral(float(t))
        lower[i] = _exp_cap(math.log(lo_c) - e)
        upper[i] = _exp_cap(math.log(up_c) + e)
    lo_c, up_c = _conv_const(profile)
    return lower, upper, math.log(lo_c) - c * cap, math.log(up_c) + c * cap


_GL6 = np.polynomial.legendre.leggauss(6)
_GL12 = np.polynomial.legendre.leggauss(12)


def _abs_rm_increment(abs_rm, a: float, b: float, breakpoints: tuple) -> float:
    """int_a^b |r_m| by Gauss-Legendre, split at profile breakpoints.

    Returns the fine-rule value plus the node-doubling error estimate;
    overestimating the remainder integral only loosens the e^{+-2 int}
    envelopes, it never invalidates them.
    """
    edges = [a] + [p for p in breakpoints if a < p < b] + [b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals6 = [abs_rm(mid + half * x) for x in _GL6[0]]
        vals12 = [abs_rm(mid + half * x) for x in _GL12[0]]
        coarse = half * float(np.dot(_GL6[1], vals6))
        fine = half * float(np.dot(_GL12[1], vals12))
        total += fine + abs(fine - coarse)
    return total


def _certify_mode_zoned(
    profile: SpeedProfile,
    partition: ZonePartition,
    xi_norm: float,
    times: np.ndarray,
    c_h1: float,
) -> ModeCertificate:
    m = profile.m
    t_xi = partition.boundary(xi_norm)
    horizon = float(times[-1]) if len(times) else 0.0
    c = 2.0 * profile.a1 / profile.a0
    if xi_norm == 0.0:
        cap = 0.0
    else:
        cap = c_h1 * partition.N
        if math.isfinite(t_xi):
            cap = min(cap, xi_norm * profile.deviation_integral(min(t_xi, profile.t_covered)))

    psi_mask = times <= t_xi
    lower = np.empty_like(times)
    upper = np.empty_like(times)
    lower[psi_mask], upper[psi_mask], log_lo, log_up = _gronwall_mode(
        profile, xi_norm, times[psi_mask], cap
    )

    c_rm = 0.0
    if not bool(np.all(psi_mask)):
        # hyperbolic continuation from the boundary
        lo_cb, up_cb = _conv_factors(profile, t_xi)
        e_b = c * xi_norm * profile.deviation_integral(t_xi)
        log_base_lo = math.log(lo_cb) - e_b
        log_base_up = math.log(up_cb) + e_b
        eq_lo, eq_hi = norm_equivalence_bounds(m)
        log_kappa = math.log(eq_hi) - math.log(eq_lo)
        chain_b = build_chain(profile, t_xi, xi_norm)
        prod_b = chain_b.one_minus_delta_sq()
        a_b = profile.value(t_xi)

        def abs_rm(s: float) -> float:
            return abs(build_chain(profile, s, xi_norm).final.r)

        h_times = times[~psi_mask]
        r_cum = 0.0
        t_prev = t_xi
        fits = []
        lo_h = np.empty(len(h_times))
        up_h = np.empty(len(h_times))
        for i, t in enumerate(h_times):
            r_cum += _abs_rm_increment(abs_rm, t_prev, float(t), profile.breakpoints)
            t_prev = float(t)
            chain_t = build_chain(profile, float(t), xi_norm)
            log_amp = math.log((profile.value(float(t)) / a_b) * (prod_b / chain_t.one_minus_delta_sq()))
            lo_h[i] = _exp_cap(log_base_lo - log_kappa + log_amp - 2.0 * r_cum)
            up_h[i] = _exp_cap(log_base_up + log_kappa + log_amp + 2.0 * r_cum)
            fits.append(abs(chain_t.final.r) * xi_norm ** (m - 1) * profile.xi_control(float(t)) ** m)
        lower[~psi_mask] = lo_h
        upper[~psi_mask] = up_h

        c_rm = max(fits) if fits else 0.0
        tail = c_rm * xi_norm ** (1 - m) * profile.xi_control.tail_integral_inverse_power(max(horizon, t_xi), m)
        r_inf = r_cum + tail
        log_lo = min(log_lo, log_base_lo - log_kappa + math.log((profile.a0 / a_b) * prod_b) - 2.0 * r_inf)
        log_up = max(log_up, log_base_up + log_kappa + math.log((profile.a1 / a_b) * prod_b * 2.0 ** (m - 1)) + 2.0 * r_inf)

    return ModeCertificate(
        xi_norm=xi_norm,
        t_xi=t_xi,
        N_used=partition.N,
        times=times,
        lower=lower,
        upper=upper,
        lower_const=_exp_cap(log_lo),
        upper_const=_exp_cap(log_up),
        log_lower_const=log_lo,
        log_upper_const=log_up,
        c_rm=c_rm,
    )


def _certify_mode_l1(profile: SpeedProfile, report: HypothesisReport, xi_norm: float, times: np.ndarray) -> ModeCertificate:
    """Zone-free envelope exp(+-(2 C1/a0) int_0^t xi_control^{-1})."""
    c = 2.0 * report.c1 / profile.a0
    l1 = profile.xi_control.l1_norm_of_inverse()
    lower = np.empty_like(times)
    upper = np.empty_like(times)
    for i, t in enumerate(times):
        e = c * (l1 - profile.xi_control.tail_integral_inverse_power(float(t), 1))
        lower[i] = _exp_cap(-e)
        upper[i] = _exp_cap(e)
    return ModeCertificate(
        xi_norm=xi_norm,
        t_xi=math.inf,
        N_used=0.0,
        times=times,
        lower=lower,
        upper=upper,
        lower_const=_exp_cap(-c * l1),
        upper_const=_exp_cap(c * l1),
        log_lower_const=-c * l1,
        log_upper_const=c * l1,
        c_rm=0.0,
    )


def certify_modes(
    profile: SpeedProfile,
    xi_norms,
    times,
    dim: int,
    flavor: str = "theta",
    report: HypothesisReport | None = None,
    n_start: float = N_START,
    n_cap: float = N_CAP,
) -> CertificateSet:
    """Two-sided energy-ratio envelopes for a family of modes.

    Dispatches on the applicable regime: bounded deviation (pure
    Gronwall), m = 1 with integrable inverse control (zone-free), or the
    full two-zone construction with N-escalation.  The lambda flavor
    always uses the two-zone construction on the lam control function.
    """
    times = np.asarray(sorted(times), dtype=float)
    xi_norms = [float(x) for x in xi_norms]
    if report is None:
        report = verify_hypotheses(profile)

    if flavor == "lambda":
        if not lambda_applicable(report):
            raise ZoneConstantTooSmall(
                "weighted-zone certificate needs H1*, H2*, H5*, H6* and the monotone-ratio condition"
            )
        case = "lambda"
    else:
        case = gec_case(profile, report)
        if case is None:
            raise ZoneConstantTooSmall("no two-sided energy-bound regime applies to this profile")

    if case == "i":
        total = profile.deviation_total
        if total is None:
            total = profile.theta.sup()
        certs = []
        for x in xi_norms:
            lo, up, log_lo, log_up = _gronwall_mode(profile, x, times, x * total)
            certs.append(ModeCertificate(
                xi_norm=x, t_xi=math.inf, N_used=0.0, times=times,
                lower=lo, upper=up,
                lower_const=_exp_cap(log_lo), upper_const=_exp_cap(log_up),
                log_lower_const=log_lo, log_upper_const=log_up, c_rm=0.0,
            ))
        return CertificateSet(case="i", partition=None, report=report, certificates=tuple(certs))

    if case == "ii":
        certs = tuple(_certify_mode_l1(profile, report, x, times) for x in xi_norms)
        return CertificateSet(case="ii", partition=None, report=report, certificates=tuple(certs))

    c_h1 = report.record("H1*").fitted_constant
    n = n_start
    last_failure = None
    while n <= n_cap:
        partition = make_partition(profile, n, dim, flavor=flavor)
        try:
            certs = tuple(
                _certify_mode_zoned(profile, partition, x, times, c_h1) for x in xi_norms
            )
            return CertificateSet(case=case, partition=partition, report=report, certificates=certs)
        except ZoneConstantTooSmall as exc:
            last_failure = exc
            n *= 2.0
    raise EscalationFailed(
        f"zone constant escalation exceeded {n_cap:g}; last failure: {last_failure}"
    )
