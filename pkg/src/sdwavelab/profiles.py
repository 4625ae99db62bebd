"""Time-dependent propagation speeds and their control functions.

Two built-in families are provided:

* an oscillating perturbation of a constant speed,
      a(t) = 1 + (1+t)^{-p} * chi((1+t)^q * log(e+t)^r),
  with chi a smooth positive periodic shape, and
* a sparse train of compactly supported oscillating bumps on geometric
  centers t_j = eta^j,
      a(t) = sqrt(1 + chi_eps(phase))  on [t_j - rho_j, t_j + rho_j],
  equal to 1 elsewhere.

Every profile carries exact derivative jets (no numerical
differentiation on the production path), two-sided bounds
a0 <= a(t) <= a1, the stabilization limit a_inf, and power-log control
functions: theta bounds the accumulated deviation
int_0^t |a - a_inf| <= theta(t), xi_control bounds derivatives via
|a^(k)| <= C_k * xi_control(t)^{-k}, and an optional lam used by the
weighted-energy estimates.

Hypothesis verification fits the smallest constants for those bounds
over a time grid and declares a bound to hold when its running supremum
has stabilized (creep below 10% over the last decade of the grid).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError
from .jets import Jet
from .powerlog import PowerLog

TWO_PI = 2.0 * math.pi

#: scipy.integrate.quad settings for deviation integrals
_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-11, limit=400)

#: chunk length for long quadrature ranges (keeps subdivision counts low)
_QUAD_CHUNK = 64.0

#: far horizon used when fitting integrals over the whole half-line
FIT_HORIZON = 1.0e4

#: relative creep allowed in the last grid decade before a fit counts as divergent
_STABILIZE_SLACK = 0.10


def _quad_chunked(f: Callable[[float], float], lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    edges = np.arange(lo, hi, _QUAD_CHUNK)
    edges = np.append(edges, hi)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(f, a, b, **_QUAD_OPTS)[0]
    return total


class _CumulativeIntegral:
    """Cached cumulative integral of a nonnegative integrand from 0."""

    def __init__(self, integrand: Callable[[float], float]) -> None:
        self._f = integrand
        self._ts = [0.0]
        self._vals = [0.0]

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        i = bisect.bisect_right(self._ts, t) - 1
        t0, v0 = self._ts[i], self._vals[i]
        if t0 == t:
            return v0
        v = v0 + _quad_chunked(self._f, t0, t)
        if t > self._ts[-1]:
            self._ts.append(t)
            self._vals.append(v)
        return v


# -- oscillation shapes ----------------------------------------------------


@dataclass(frozen=True)
class ChiSpec:
    """Smooth 2*pi-periodic oscillation shape with known range [lo, hi]."""

    name: str
    fn: Callable[[Jet], Jet] = field(repr=False)
    lo: float
    hi: float
    max_order: int | None = None
    value: Callable[[float], float] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.lo <= 0:
            raise ValueError("chi must be strictly positive")


def _cos_offset(phase: Jet) -> Jet:
    return phase.cos() + 2.0


CHI_FUNCTIONS = {
    "cos_offset": ChiSpec(
        name="cos_offset",
        fn=_cos_offset,
        lo=1.0,
        hi=3.0,
        value=lambda s: math.cos(s) + 2.0,
    ),
}


def _resolve_chi(chi) -> ChiSpec:
    if isinstance(chi, ChiSpec):
        return chi
    try:
        return CHI_FUNCTIONS[chi]
    except KeyError:
        raise ValueError(f"unknown chi shape {chi!r}; known: {sorted(CHI_FUNCTIONS)}")


# -- profile object --------------------------------------------------------


@dataclass(eq=False)
class SpeedProfile:
    """Immutable propagation speed with jets, bounds and control functions."""

    family: str
    params: dict
    m: int
    a_inf: float
    a0: float
    a1: float
    theta: PowerLog
    xi_control: PowerLog
    lam: PowerLog | None
    jet_fn: Callable[[float, int], Jet] = field(repr=False)
    deviation_fn: Callable[[float], float] = field(repr=False)
    breakpoints: tuple = ()
    deviation_total: float | None = None
    max_jet_order: int | None = None
    bumps: tuple = ()
    t_covered: float = math.inf
    value_fn: Callable[[float], float] | None = field(default=None, repr=False)

    def _check_t(self, t: float) -> float:
        t = float(t)
        if t < 0:
            raise ValueError("profiles are defined on t >= 0")
        if t > self.t_covered:
            raise NumericalError(
                f"profile sampled at t={t:g} beyond its constructed horizon {self.t_covered:g}"
            )
        return t

    def jet(self, t: float, order: int) -> Jet:
        """Taylor jet of a(.) at t carrying derivatives up to ``order``."""
        t = self._check_t(t)
        if self.max_jet_order is not None and order > self.max_jet_order:
            raise ValueError(
                f"derivative order {order} beyond the profile smoothness {self.max_jet_order}"
            )
        return self.jet_fn(t, int(order))

    def value(self, t: float) -> float:
        if self.value_fn is None:
            return float(self.jet(t, 0).value.real)
        return self.value_fn(self._check_t(t))

    def deriv(self, t: float, k: int) -> float:
        """k-th derivative a^(k)(t), exact through the jet chain."""
        return float(self.jet(t, k).derivative(k).real)

    def deviation_integral(self, t: float) -> float:
        """int_0^t |a(s) - a_inf| ds (cached adaptive quadrature)."""
        if t > self.t_covered:
            raise NumericalError(
                f"deviation integral at t={t:g} beyond constructed horizon {self.t_covered:g}"
            )
        return self.deviation_fn(float(t))

    def with_lambda(self, lam: PowerLog) -> "SpeedProfile":
        """Copy of the profile with ``lam`` attached."""
        return replace(self, lam=lam)

    def breakpoints_in(self, lo: float, hi: float) -> list:
        return [b for b in self.breakpoints if lo < b < hi]


# -- constant speed --------------------------------------------------------


def constant_profile(value: float = 1.0, m: int = 2) -> SpeedProfile:
    """a(t) = value; every control bound is trivial."""
    if value <= 0:
        raise ValueError("speed must be positive")

    def jet_fn(t: float, order: int) -> Jet:
        return Jet.constant(value, order)

    return SpeedProfile(
        family="constant",
        params={"value": value},
        m=m,
        a_inf=value,
        a0=value,
        a1=value,
        theta=PowerLog(coef=1.0),
        xi_control=PowerLog(coef=1.0, s=1.0),
        lam=None,
        jet_fn=jet_fn,
        deviation_fn=lambda t: 0.0,
        deviation_total=0.0,
        value_fn=lambda t: value,
    )


# -- oscillating perturbation family ---------------------------------------


def build_example1(
    p: float,
    q: float,
    r: float,
    chi="cos_offset",
    m: int = 2,
    lam: PowerLog | str | None = None,
) -> SpeedProfile:
    """Speed 1 + (1+t)^{-p} chi((1+t)^q log(e+t)^r) with control functions.

    theta is an analytic majorant of the deviation integral: constant for
    p > 1 (fitted numerically), chi_max*log(e+t) for p = 1, and
    (chi_max/(1-p))*(1+t)^{1-p} for p < 1.  xi_control follows the
    derivative cascade of the composition: (1+t)^{p/m-q+1}*log(e+t)^{-r}
    for q > 0 and (1+t)^{p/m+1}*log(e+t)^{1-r} for q = 0.

    ``lam="auto"`` attaches (1+t)^{1-q} (requires q < 1).
    """
    if p < 0 or q < 0 or r < 0:
        raise ValueError("p, q, r must be nonnegative")
    if m < 1:
        raise ValueError("smoothness order m must be >= 1")
    chi = _resolve_chi(chi)

    def jet_fn(t: float, order: int) -> Jet:
        tj = Jet.variable(t, order)
        base = tj + 1.0
        if q == 0 and r == 0:
            phase = Jet.constant(1.0, order)
        else:
            phase = base.power(q) if q else Jet.constant(1.0, order)
            if r:
                phase = phase * (tj + math.e).log().power(r)
        osc = chi.fn(phase)
        amp = base.power(-p) if p else Jet.constant(1.0, order)
        return amp * osc + 1.0

    if chi.value is None:
        value_fn = None
    else:
        chi_value = chi.value

        def value_fn(t: float) -> float:
            phase = 1.0
            if q:
                phase = (1.0 + t) ** q
            if r:
                phase *= math.log(math.e + t) ** r
            osc = chi_value(phase)
            return (1.0 + t) ** (-p) * osc + 1.0 if p else osc + 1.0

    dev_value = value_fn or (lambda s: float(jet_fn(s, 0).value.real))
    deviation = _CumulativeIntegral(lambda s: dev_value(s) - 1.0)

    if p > 1:
        # sound constant majorant: quadrature to the fit horizon plus power tail
        total = deviation(FIT_HORIZON) + chi.hi * (1.0 + FIT_HORIZON) ** (1.0 - p) / (p - 1.0)
        theta = PowerLog(coef=total)
        deviation_total = total
    elif p == 1:
        theta = PowerLog(coef=chi.hi, w=1.0)
        deviation_total = None
    else:
        theta = PowerLog(coef=chi.hi / (1.0 - p), s=1.0 - p)
        deviation_total = None

    if q > 0:
        xi_control = PowerLog(coef=1.0, s=p / m - q + 1.0, w=-r)
    else:
        xi_control = PowerLog(coef=1.0, s=p / m + 1.0, w=1.0 - r)

    if isinstance(lam, str):
        if lam != "auto":
            raise ValueError("lam must be a PowerLog, None, or 'auto'")
        if q >= 1:
            raise ValueError("auto lambda (1+t)^{1-q} needs q < 1")
        lam = PowerLog(coef=1.0, s=1.0 - q)

    return SpeedProfile(
        family="example1",
        params={"p": p, "q": q, "r": r, "chi": chi.name, "m": m},
        m=m,
        a_inf=1.0,
        a0=1.0,
        a1=1.0 + chi.hi,
        theta=theta,
        xi_control=xi_control,
        lam=lam,
        jet_fn=jet_fn,
        deviation_fn=deviation,
        deviation_total=deviation_total,
        max_jet_order=chi.max_order,
        value_fn=value_fn,
    )


# -- sparse bump family -----------------------------------------------------


@dataclass(frozen=True)
class Bump:
    """One oscillating bump: support [center-rho, center+rho], nu full humps."""

    center: float
    rho: float
    eps: float
    nu: int

    @property
    def left(self) -> float:
        return self.center - self.rho

    @property
    def right(self) -> float:
        return self.center + self.rho


def build_example2(
    eta: float = 3.0,
    alpha: float = 1.0,
    beta: float = 1.0,
    kappa: float = 1.0,
    m: int = 2,
    horizon: float = 2.0e3,
) -> SpeedProfile:
    """Bump-train speed on centers eta^j with power-law control functions.

    Bump j has support radius rho_j = eta^{-1} t_j^kappa, amplitude
    parameter eps_j = t_j^{alpha-kappa} and nu_j whole oscillation
    periods; the shape is eps * cos(tau)^{2(m+1)} on the middle half of
    each period and 0 on the rest, so the profile is C^{2m+1} and equals
    1 off the bumps exactly.  The admissible parameter box is
    alpha <= kappa <= 1 and alpha + (1-alpha)/m <= beta <= kappa + (kappa-alpha)/m.

    Bumps are constructed out to 4*horizon; sampling beyond that raises.
    """
    if eta < 3:
        raise ValueError("eta must be >= 3 (bump supports must stay disjoint)")
    if not 0 < alpha <= kappa <= 1:
        raise ValueError("need 0 < alpha <= kappa <= 1")
    if m < 1:
        raise ValueError("smoothness order m must be >= 1")
    lo = alpha + (1.0 - alpha) / m
    hi = kappa + (kappa - alpha) / m
    if not lo <= beta <= hi:
        raise ValueError(f"need alpha+(1-alpha)/m <= beta <= kappa+(kappa-alpha)/m, i.e. {lo:g} <= beta <= {hi:g}")

    chi_power = 2 * (m + 1)
    cover = 4.0 * max(horizon, 1.0)
    bumps: list[Bump] = []
    j = 1
    while True:
        t_j = eta**j
        rho_j = eta ** (-1.0) * t_j**kappa
        if t_j - rho_j > cover:
            t_covered = t_j - rho_j
            break
        eps_j = t_j ** (alpha - kappa)
        nu_j = int(math.floor(t_j ** (-beta + kappa + (kappa - alpha) / m) + 1.0))
        bumps.append(Bump(center=t_j, rho=rho_j, eps=eps_j, nu=nu_j))
        j += 1
    for b, b_next in zip(bumps, bumps[1:]):
        if b.right > b_next.left:
            raise ValueError(f"bump supports overlap near t={b.center:g}")

    lefts = [b.left for b in bumps]

    def jet_fn(t: float, order: int) -> Jet:
        i = bisect.bisect_right(lefts, t) - 1
        if i < 0 or t > bumps[i].right:
            return Jet.constant(1.0, order)
        b = bumps[i]
        scale = TWO_PI * b.nu / b.rho
        tau = (Jet.variable(t, order) - b.center) * scale
        tau_mod = tau.value % TWO_PI
        if not 0.5 * math.pi <= tau_mod <= 1.5 * math.pi:
            return Jet.constant(1.0, order)
        tau = tau + (tau_mod - tau.value)
        return (tau.cos().ipow(chi_power) * b.eps + 1.0).sqrt()

    def value_fn(t: float) -> float:
        i = bisect.bisect_right(lefts, t) - 1
        if i < 0 or t > bumps[i].right:
            return 1.0
        b = bumps[i]
        tau_mod = (t - b.center) * (TWO_PI * b.nu / b.rho) % TWO_PI
        if not 0.5 * math.pi <= tau_mod <= 1.5 * math.pi:
            return 1.0
        return math.sqrt(1.0 + b.eps * math.cos(tau_mod) ** chi_power)

    def pointwise_dev(s: float) -> float:
        return abs(value_fn(s) - 1.0)

    bump_ints = [_quad_chunked(pointwise_dev, b.left, b.right) for b in bumps]
    cumulative = np.concatenate([[0.0], np.cumsum(bump_ints)])

    def deviation(t: float) -> float:
        i = bisect.bisect_right(lefts, t) - 1
        if i < 0:
            return 0.0
        full = float(cumulative[i])
        b = bumps[i]
        if t >= b.right:
            return float(cumulative[i + 1])
        return full + _quad_chunked(pointwise_dev, b.left, t)

    # sound theta coefficient: within bump j the deviation is at most the
    # cumulative total through bump j while (1+t)^alpha >= (1+left_j)^alpha
    c_theta = max(
        float(cumulative[i + 1]) / (1.0 + b.left) ** alpha for i, b in enumerate(bumps)
    )
    theta = PowerLog(coef=c_theta, s=alpha)
    eps_max = max(b.eps for b in bumps)
    edges = [e for b in bumps for e in (b.left, b.right)]

    return SpeedProfile(
        family="example2",
        params={"eta": eta, "alpha": alpha, "beta": beta, "kappa": kappa, "m": m, "horizon": horizon},
        m=m,
        a_inf=1.0,
        a0=1.0,
        a1=math.sqrt(1.0 + eps_max),
        theta=theta,
        xi_control=PowerLog(coef=1.0, s=beta),
        lam=None,
        jet_fn=jet_fn,
        deviation_fn=deviation,
        breakpoints=tuple(edges),
        bumps=tuple(bumps),
        t_covered=t_covered,
        value_fn=value_fn,
    )


# -- hypothesis verification ------------------------------------------------


@dataclass(frozen=True)
class HypothesisRecord:
    name: str
    holds: bool
    fitted_constant: float
    worst_t: float


@dataclass(frozen=True)
class HypothesisReport:
    family: str
    records: tuple
    derivative_constants: tuple

    def record(self, name: str) -> HypothesisRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(f"hypothesis {name!r} was not evaluated")

    def holds(self, name: str) -> bool:
        return self.record(name).holds

    @property
    def c1(self) -> float:
        """Fitted first-derivative constant: |a'(t)| <= c1 * xi_control(t)^{-1}."""
        return self.derivative_constants[0]


def default_time_grid(horizon: float = FIT_HORIZON) -> np.ndarray:
    """128 linear points on [0,1) plus 512 geometric points on [1, horizon]."""
    return np.concatenate([
        np.linspace(0.0, 1.0, 128, endpoint=False),
        np.geomspace(1.0, horizon, 512),
    ])


def sup_fit(ts: np.ndarray, vals: np.ndarray) -> tuple:
    """Fitted sup, its location, and whether it stabilized before the last decade."""
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.isfinite(vals)))
        return math.inf, float(ts[bad]), False
    i = int(np.argmax(vals))
    fitted = float(vals[i])
    early = vals[ts <= ts[-1] / 10.0]
    cap = (float(np.max(early)) if early.size else 0.0) * (1.0 + _STABILIZE_SLACK) + 1e-300
    return fitted, float(ts[i]), fitted <= cap


_ALL_HYPOTHESES = ("H1*", "H2*", "H3*", "H4*", "H5*", "H6*", "La-infty")


def verify_hypotheses(
    profile: SpeedProfile,
    grid: np.ndarray | None = None,
    which: tuple | None = None,
) -> HypothesisReport:
    """Fit the defining constant of each hypothesis over a time grid.

    With ``which=None`` the applicable set is chosen automatically: the
    deviation and derivative bounds always, the tail conditions only for
    m >= 2, and the lam-based conditions only when lam is attached.
    Explicitly requesting an inapplicable hypothesis raises ValueError.
    """
    if grid is None:
        grid = default_time_grid(min(FIT_HORIZON, profile.t_covered / 2.0))
    ts = np.asarray(grid, dtype=float)
    m = profile.m

    if which is None:
        names = ["H1*", "H2*", "H3*"]
        if m >= 2:
            names.append("H4*")
        if profile.lam is not None:
            names.extend(["H5*", "H6*"] if m >= 2 else ["H5*"])
            names.append("La-infty")
    else:
        names = list(which)
        for name in names:
            if name not in _ALL_HYPOTHESES:
                raise ValueError(f"unknown hypothesis {name!r}")
            if name in ("H4*", "H6*") and m < 2:
                raise ValueError(f"{name} needs smoothness order m >= 2")
            if name in ("H5*", "H6*", "La-infty") and profile.lam is None:
                raise ValueError(f"{name} needs an attached lam control function")

    theta_vals = profile.theta(ts)
    xi_vals = profile.xi_control(ts)
    lam_vals = profile.lam(ts) if profile.lam is not None else None

    # derivative constants are fitted once and reused for H2*
    jets = [profile.jet(t, m) for t in ts]
    c_k = []
    c_k_stable = []
    c_k_worst = []
    for k in range(1, m + 1):
        dvals = np.array([abs(j.derivative(k).real) for j in jets]) * xi_vals**k
        fitted, worst, ok = sup_fit(ts, dvals)
        c_k.append(fitted)
        c_k_worst.append(worst)
        c_k_stable.append(ok)

    records = []
    for name in names:
        if name == "H1*":
            dev = np.array([profile.deviation_integral(t) for t in ts])
            fitted, worst, ok = sup_fit(ts, dev / theta_vals)
        elif name == "H2*":
            i = int(np.argmax(c_k))
            fitted, worst, ok = c_k[i], c_k_worst[i], all(c_k_stable)
        elif name == "H3*":
            fitted, worst, ok = sup_fit(ts, theta_vals / xi_vals)
        elif name == "H4*":
            tails = np.array([profile.xi_control.tail_integral_inverse_power(t, m) for t in ts])
            fitted, worst, ok = sup_fit(ts, theta_vals ** (m - 1) * tails)
        elif name == "H5*":
            fitted, worst, ok = sup_fit(ts, lam_vals / xi_vals)
        elif name == "H6*":
            tails = np.array([profile.xi_control.tail_integral_inverse_power(t, m) for t in ts])
            fitted, worst, ok = sup_fit(ts, lam_vals**m / theta_vals * tails)
        else:  # La-infty: theta/lam monotone increasing and unbounded, lam increasing
            ratio = theta_vals / lam_vals
            monotone = bool(np.all(np.diff(ratio) >= -1e-12 * np.abs(ratio[:-1])))
            mid = ratio[ts <= ts[-1] / 100.0]
            growing = mid.size > 0 and ratio[-1] >= 1.5 * float(np.max(mid))
            ok = monotone and growing and profile.lam.is_increasing
            fitted = float(ratio[-1] / ratio[0]) if ratio[0] > 0 else math.inf
            worst = float(ts[-1])
        records.append(HypothesisRecord(name=name, holds=bool(ok) and math.isfinite(fitted), fitted_constant=fitted, worst_t=worst))

    return HypothesisReport(
        family=profile.family,
        records=tuple(records),
        derivative_constants=tuple(c_k),
    )


def gec_case(profile: SpeedProfile, report: HypothesisReport | None = None) -> str | None:
    """Which two-sided energy-bound regime applies: 'i', 'ii', 'iii', or None.

    'i' needs a bounded deviation majorant, 'ii' needs m = 1 with an
    integrable inverse of the derivative control, 'iii' needs m >= 2 and
    the full stabilization/oscillation hypothesis set to verify.
    """
    if profile.theta.is_constant:
        return "i"
    if profile.m == 1 and math.isfinite(profile.xi_control.l1_norm_of_inverse()):
        return "ii"
    if profile.m >= 2:
        if report is None:
            report = verify_hypotheses(profile)
        if all(report.holds(n) for n in ("H1*", "H2*", "H3*", "H4*")):
            return "iii"
    return None


def lambda_applicable(report: HypothesisReport) -> bool:
    """True when the lam-flavored zone estimate applies (weighted energy bound)."""
    needed = ("H1*", "H2*", "H5*", "H6*", "La-infty")
    try:
        return all(report.holds(n) for n in needed)
    except KeyError:
        return False


def lambda_inverse(profile: SpeedProfile, s: float) -> float:
    """Inverse of the attached lam at s, accurate to 1e-12*max(1,s)."""
    if profile.lam is None:
        raise ValueError("profile has no lam control function")
    lam0 = float(profile.lam(0.0))
    if s < lam0:
        raise ValueError(f"lam inverse requested below lam(0) = {lam0:g}")
    return profile.lam.inverse(s)
