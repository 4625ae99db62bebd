"""Weight sequences and boundedness gates for very slowly stabilizing speeds.

A log-convex weight sequence M_0, M_1, ... defines the associated
function T(tau) = sup_j tau^j / M_j.  Lattice data whose moments vanish
and whose entries decay against {M_j} have spectra suppressed like 1/T
near theta = 0, and whether that suppression beats the profile's
low-frequency energy growth is decided by two scalar diagnostics:

* the domination constant
      inf_{tau >= 1} T[{M_j/j!}](tau) / exp(Theta(Lam^{-1}(N tau))/tau),
  positive exactly when the sequence wins for every datum in its class;
* the growth ratio
      inf_tau Theta(Lam^{-1}(N tau)) / (N Theta(Lam^{-1}(tau))),
  which must blow up with N for the weighted-energy route to apply to
  one fixed datum.

The module also evaluates the weighted initial-energy functional
int exp(2|xi(theta)| Theta(Lam^{-1}(N/|xi(theta)|))) E(0, theta) dtheta
by dyadic-shell quadrature toward theta = 0, checks moment and decay
conditions, and builds the two model data families with flat spectra
(powers of sin^2(theta/2), and spectra exponentially flat at theta = 0).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .diagonalization import growth_weight_log
from .errors import QuadratureError
from .lattice import LatticeField
from .profiles import SpeedProfile

_DROP_BELOW = 1e-16
_LOG_NEGLIGIBLE = math.log(1e-13)
_MIN_SHELLS = 8


# -- weight sequences ---------------------------------------------------------


class LogConvexSequence:
    """Positive weights M_0, M_1, ... with nondecreasing ratios M_{j+1}/M_j.

    Log-convexity makes tau^j/M_j unimodal in j, so the associated
    function can be located by a monotone search on the ratio sequence.
    Instances are defined by a closed form (factorial powers, factorial
    times a stretched exponential, a constant) or by a finite table; a
    finite table is read as its minimal log-convex extension, which
    keeps the last ratio forever.
    """

    def __init__(self, kind: str, log_m, value=None):
        self.kind = kind
        self._log_m = log_m
        self._value = value

    @classmethod
    def factorial_power(cls, nu: float) -> "LogConvexSequence":
        """M_j = j!^nu (the Gevrey-type scale), nu >= 1."""
        if nu < 1.0:
            raise ValueError("factorial-power sequences need nu >= 1")

        def value(j: int, divided: bool):
            power = nu - 1.0 if divided else nu
            f = math.factorial(j)
            if power == int(power):
                v = f ** int(power)
            else:
                v = float(f) ** power
            return float(v)

        return cls(
            kind=f"factorial-power({nu:g})",
            log_m=lambda j: nu * math.lgamma(j + 1.0),
            value=value,
        )

    @classmethod
    def exponential(cls, b: float, sigma: float) -> "LogConvexSequence":
        """M_j = j! * exp(b j^sigma) with b > 0, sigma > 1."""
        if b <= 0 or sigma <= 1.0:
            raise ValueError("exponential sequences need b > 0 and sigma > 1")

        def value(j: int, divided: bool):
            extra = math.exp(b * float(j) ** sigma)
            return extra if divided else math.factorial(j) * extra

        return cls(
            kind=f"exponential(b={b:g}, sigma={sigma:g})",
            log_m=lambda j: math.lgamma(j + 1.0) + b * float(j) ** sigma,
            value=value,
        )

    @classmethod
    def constant(cls, c: float = 1.0) -> "LogConvexSequence":
        if c <= 0:
            raise ValueError("constant sequences need c > 0")
        lc = math.log(c)
        return cls(kind=f"constant({c:g})", log_m=lambda j: lc, value=lambda j, divided: c / math.factorial(j) if divided else c)

    @classmethod
    def from_table(cls, values) -> "LogConvexSequence":
        """Finite table, read as its minimal log-convex extension.

        Beyond the stored entries the last ratio repeats forever, the
        slowest growth compatible with log-convexity.
        """
        vals = [float(v) for v in values]
        if not vals or any(v <= 0 for v in vals):
            raise ValueError("a sequence table needs at least one positive entry")
        logs = [math.log(v) for v in vals]
        for j in range(1, len(logs) - 1):
            if logs[j + 1] - logs[j] < logs[j] - logs[j - 1] - 1e-12:
                raise ValueError(f"table ratios decrease at j = {j}: not log-convex")
        last_ratio = logs[-1] - logs[-2] if len(logs) >= 2 else 0.0

        def log_m(j: int) -> float:
            if j < len(logs):
                return logs[j]
            return logs[-1] + (j - (len(logs) - 1)) * last_ratio

        return cls(
            kind="custom-table",
            log_m=log_m,
            value=lambda j, divided: ((vals[j] / math.factorial(j)) if divided else vals[j]) if j < len(vals) else None,
        )

    def log_m(self, j: int) -> float:
        if j < 0:
            raise ValueError("sequence indices start at 0")
        return float(self._log_m(int(j)))

    def m(self, j: int) -> float:
        return math.exp(self.log_m(j))

    def increment(self, j: int, divided: bool) -> float:
        """log M'_{j+1} - log M'_j for the (possibly factorial-divided) sequence."""
        out = self.log_m(j + 1) - self.log_m(j)
        if divided:
            out -= math.log(j + 1.0)
        return out

    def exact_value(self, j: int, divided: bool) -> float | None:
        if self._value is None:
            return None
        try:
            v = self._value(int(j), divided)
        except OverflowError:
            return None
        if v is None:
            return None
        try:
            v = float(v)
        except OverflowError:
            return None
        return v if math.isfinite(v) and v > 0 else None


# -- associated function ------------------------------------------------------

_MODES = ("raw", "factorial-divided")
_SEARCH_CAP = 2**40
_EXACT_INDEX_CAP = 400


def _first_falling_index(seq: LogConvexSequence, log_tau: float, divided: bool):
    """Smallest j with increment(j) > log_tau, or None when terms never fall.

    Increments are nondecreasing (log-convexity, spot-checked during the
    search), so the term sequence tau^j/M'_j rises until this index and
    falls after it; None means the supremum over j is infinite.  An
    exact plateau at the search cap (increment == log_tau) is a constant
    tail, whose supremum is already attained there.
    """
    prev_inc = -math.inf
    lo = -1
    j = 0
    while True:
        inc = seq.increment(j, divided)
        if inc < prev_inc - 1e-9 * max(1.0, abs(prev_inc)):
            raise ValueError(f"sequence {seq.kind} ratios decrease at j = {j}: not log-convex")
        prev_inc = inc
        if inc > log_tau:
            hi = j
            break
        if j >= _SEARCH_CAP:
            return None if inc < log_tau - 1e-12 else j
        lo = j
        j = 1 if j == 0 else j * 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if seq.increment(mid, divided) > log_tau:
            hi = mid
        else:
            lo = mid
    return hi


def log_associated_function(seq: LogConvexSequence, tau: float, mode: str = "raw") -> float:
    """log of T(tau) = sup_j tau^j / M_j (factorial-divided: M_j/j! instead).

    Returns +inf when the ratio test never turns over within the search
    range, the divergence flag for genuinely unbounded suprema.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if tau < 0:
        raise ValueError("the associated function needs tau >= 0")
    divided = mode == "factorial-divided"
    if tau == 0.0:
        return -seq.log_m(0)  # only the j = 0 term survives
    log_tau = math.log(tau)
    j_star = _first_falling_index(seq, log_tau, divided)
    if j_star is None:
        return math.inf
    out = j_star * log_tau - seq.log_m(j_star)
    if divided:
        out += math.lgamma(j_star + 1.0)
    return out


def associated_function(seq: LogConvexSequence, tau: float, mode: str = "raw") -> float:
    """T(tau) itself; exact float arithmetic when the maximizing index is small."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if tau < 0:
        raise ValueError("the associated function needs tau >= 0")
    divided = mode == "factorial-divided"
    if tau == 0.0:
        v = seq.exact_value(0, divided)
        return 1.0 / v if v is not None else math.exp(-seq.log_m(0))
    j_star = _first_falling_index(seq, math.log(tau), divided)
    if j_star is None:
        return math.inf
    if j_star <= _EXACT_INDEX_CAP:
        m = seq.exact_value(j_star, divided)
        if m is not None:
            num = tau**j_star
            if math.isfinite(num):
                return num / m
    out = j_star * math.log(tau) - seq.log_m(j_star)
    if divided:
        out += math.lgamma(j_star + 1.0)
    return math.exp(out) if out < 709.0 else math.inf


# -- domination constant and growth ratio -------------------------------------


def _log_theta_at_lam_inverse(profile: SpeedProfile, y: float) -> float:
    """log Theta(Lam^{-1}(y)), clamped to t = 0 when y is below Lam(0)."""
    lam = profile.lam
    if lam is None:
        raise ValueError("this diagnostic needs a profile with a lam control function")
    if y <= float(lam(0.0)):
        u = 0.0
    else:
        u = lam.inverse_u(math.log(y))
    return profile.theta.log_value_u(u)


def domination_constant(
    N: float,
    seq: LogConvexSequence,
    profile: SpeedProfile,
    tau_max: float = 1e6,
    grid_points: int = 160,
    refinements: int = 2,
    return_log: bool = False,
) -> float:
    """inf over tau >= 1 of T[{M_j/j!}](tau) / exp(Theta(Lam^{-1}(N tau))/tau).

    Positive exactly when the sequence's associated function outgrows
    the profile's weighted low-frequency growth, so every datum in the
    sequence's class keeps bounded energy.  A tail that decays
    monotonically through the end of the grid is reported as 0 (log
    scale: -inf).  The constant routinely leaves double range, so
    decisions should use ``return_log=True``; the linear value is for
    display only.
    """
    if N <= 0:
        raise ValueError("the domination constant needs N > 0")

    def log_ratio(tau: float) -> float:
        lt = log_associated_function(seq, tau, mode="factorial-divided")
        if math.isinf(lt):
            return math.inf
        log_th = _log_theta_at_lam_inverse(profile, N * tau)
        expo = math.exp(log_th) / tau if log_th < 709.0 else math.inf
        return lt - expo

    taus = np.geomspace(1.0, tau_max, grid_points)
    vals = np.array([log_ratio(float(t)) for t in taus])
    tail = vals[3 * len(vals) // 4 :]
    if int(np.argmin(vals)) == len(vals) - 1 and np.all(np.diff(tail) < 0):
        return -math.inf if return_log else 0.0
    for _ in range(refinements):
        i = int(np.argmin(vals))
        lo = float(taus[max(i - 1, 0)])
        hi = float(taus[min(i + 1, len(taus) - 1)])
        if hi <= lo:
            break
        taus = np.geomspace(lo, hi, grid_points)
        vals = np.array([log_ratio(float(t)) for t in taus])
    best = float(np.min(vals))
    if return_log:
        return best
    if best == math.inf:
        return math.inf
    return math.exp(best) if best < 709.0 else math.inf


def growth_ratio(profile: SpeedProfile, N: float, dim: int = 1, tau_max: float = 1e6) -> float:
    """inf over tau >= 1/(2 sqrt d) of Theta(Lam^{-1}(N tau)) / (N Theta(Lam^{-1}(tau)))."""
    if N <= 0:
        raise ValueError("the growth ratio needs N > 0")
    log_n = math.log(N)

    def log_ratio(tau: float) -> float:
        return _log_theta_at_lam_inverse(profile, N * tau) - log_n - _log_theta_at_lam_inverse(profile, tau)

    taus = np.geomspace(1.0 / (2.0 * math.sqrt(dim)), tau_max, 160)
    vals = np.array([log_ratio(float(t)) for t in taus])
    i = int(np.argmin(vals))
    lo, hi = float(taus[max(i - 1, 0)]), float(taus[min(i + 1, len(taus) - 1)])
    if hi > lo:
        taus = np.geomspace(lo, hi, 160)
        vals = np.array([log_ratio(float(t)) for t in taus])
    return math.exp(float(np.min(vals)))


# -- weighted initial energy ---------------------------------------------------


def _dtft_points(f: LatticeField, pts: np.ndarray) -> np.ndarray:
    if f.support_size == 0:
        return np.zeros(len(pts), dtype=complex)
    return np.exp(-1j * (pts @ f.keys.astype(float).T)) @ f.values


def weighted_initial_energy(
    N: float,
    u0: LatticeField,
    u1: LatticeField,
    profile: SpeedProfile,
    log_spectrum=None,
    max_shells: int = 60,
    return_log: bool = False,
) -> float:
    """Torus integral of exp(2|xi| Theta(Lam^{-1}(N/|xi|))) E(0, theta).

    The weight blows up toward theta = 0, so the torus is covered by
    dyadic shells shrinking into the origin (midpoint rule per shell);
    any overflowing integrand value, or shells still contributing when
    the shell budget runs out, report the integral as +inf.  A shell
    scan cannot stop early on growth alone: a convergent integrand may
    peak in the interior several levels deep.  ``log_spectrum``, when
    given, replaces the
    field-built density with a closed form evaluated in log scale --
    truncated lattice data cannot resolve super-exponentially small
    tails, so closed-form spectra must be integrated this way.
    """
    if u0.dim != u1.dim:
        raise ValueError("data fields must share one lattice dimension")
    dim = u1.dim
    if N <= 0:
        raise ValueError("the weighted energy needs N > 0")
    if profile.lam is None:
        raise ValueError("the weighted energy needs a profile with a lam control function")
    a0sq = profile.value(0.0) ** 2
    n_sub = {1: 64, 2: 16, 3: 8}[dim]

    axes_cache = np.arange(n_sub) + 0.5
    shell_logs: list[float] = []
    total_log = -math.inf
    stale = 0
    for level in range(max_shells):
        h = math.pi * 2.0 ** (-level)
        step = 2.0 * h / n_sub
        coords = -h + axes_cache * step
        mesh = np.meshgrid(*([coords] * dim), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        pts = pts[np.max(np.abs(pts), axis=1) > h / 2.0]  # outer part of the shell only
        xi_sq = np.sum(4.0 * np.sin(pts / 2.0) ** 2, axis=1)
        xi_nrm = np.sqrt(xi_sq)
        w = np.array([growth_weight_log(profile, N, float(x)) for x in xi_nrm])
        if log_spectrum is not None:
            le = np.asarray(log_spectrum(pts[:, 0] if dim == 1 else pts), dtype=float)
        else:
            e0 = np.abs(_dtft_points(u1, pts)) ** 2 + a0sq * xi_sq * np.abs(_dtft_points(u0, pts)) ** 2
            with np.errstate(divide="ignore"):
                le = np.log(e0)
        log_integrand = np.where(np.isneginf(le), -math.inf, w + le)
        if np.any(np.isposinf(log_integrand)) or np.any(np.isnan(log_integrand)):
            return math.inf
        shell = float(logsumexp(log_integrand)) + dim * math.log(step) if len(log_integrand) else -math.inf
        shell_logs.append(shell)
        total_log = float(logsumexp([total_log, shell]))
        negligible = shell == -math.inf or shell < total_log + _LOG_NEGLIGIBLE
        stale = stale + 1 if negligible else 0
        if level >= _MIN_SHELLS and stale >= 2:
            break
    else:
        if shell_logs and shell_logs[-1] > total_log + math.log(1e-10):
            return math.inf
    if return_log:
        return total_log
    return math.exp(total_log) if total_log < 709.0 else math.inf


# -- data conditions -----------------------------------------------------------


@dataclass(frozen=True)
class MomentCheck:
    passed: bool
    failing: tuple | None
    worst_rel: float


def moment_check(v: LatticeField, max_order: int, tol: float = 1e-9) -> MomentCheck:
    """Vanishing of sum_k k^alpha v[k] for every |alpha| <= max_order.

    Each moment is compared to its own absolute-value scale, and the
    first failing multi-index (lowest total order, lexicographic within
    it) is reported.
    """
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    if v.support_size == 0:
        return MomentCheck(True, None, 0.0)
    keys = v.keys.astype(float)
    vals = v.values
    abs_vals = np.abs(vals)
    worst = 0.0
    for total in range(max_order + 1):
        for alpha in itertools.product(range(total + 1), repeat=v.dim):
            if sum(alpha) != total:
                continue
            powers = np.prod(keys ** np.asarray(alpha, dtype=float), axis=1)
            scale = float(np.abs(powers) @ abs_vals)
            if scale == 0.0:
                continue
            rel = abs(complex(powers @ vals)) / scale
            worst = max(worst, rel)
            if rel > tol:
                return MomentCheck(False, alpha, rel)
    return MomentCheck(True, None, worst)


@dataclass(frozen=True)
class DecayCheck:
    passed: bool
    constant: float
    log_constant: float
    worst_key: tuple | None


def decay_check(v: LatticeField, seq: LogConvexSequence, rho: float) -> DecayCheck:
    """sup over stored k of |v[k]| |k|^(d+1) T[{M_j}](|k|/rho).

    Fails when the supremum is infinite or still growing at the largest
    stored radii (no decay on the support tail).
    """
    if rho <= 0:
        raise ValueError("decay_check needs rho > 0")
    if v.support_size == 0:
        return DecayCheck(True, 0.0, -math.inf, None)
    d = v.dim
    by_radius: dict[float, float] = {}
    worst_key = None
    worst_log = -math.inf
    for k, val in v.items():
        r = math.sqrt(sum(float(x) ** 2 for x in k))
        if r == 0.0:
            term = -math.inf
        else:
            term = math.log(abs(val)) + (d + 1) * math.log(r) + log_associated_function(seq, r / rho)
        key_r = round(r, 9)
        by_radius[key_r] = max(by_radius.get(key_r, -math.inf), term)
        if term > worst_log:
            worst_log, worst_key = term, k
    radii = sorted(by_radius)
    logs = [by_radius[r] for r in radii]
    tail_growing = (
        len(logs) >= 3
        and logs[-1] == max(logs)
        and logs[-1] > logs[-2] + 1e-12
        and logs[-1] > logs[len(logs) // 2] + 1e-12
    )
    finite = math.isfinite(worst_log) or worst_log == -math.inf
    constant = math.exp(worst_log) if worst_log < 709.0 else math.inf
    return DecayCheck(passed=finite and not tail_growing, constant=constant, log_constant=worst_log, worst_key=worst_key)


# -- model data families --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GevreyData:
    """A velocity datum with a prescribed flat spectrum on the 1-d lattice."""

    kind: str
    field: LatticeField
    params: dict
    spectrum: object  # theta array -> E(0, theta)
    log_spectrum: object  # theta array -> log E(0, theta)


def build_gevrey_data(kind: str, *, M0: float | None = None, rho: float | None = None, kappa: float | None = None, truncation: int = 128) -> GevreyData:
    """Velocity data whose spectrum is flat (vanishes fast) at theta = 0.

    kind "sine-power": amplitude (sin^2(theta/2))^(M0/2); for even M0
    this is a trigonometric polynomial supported on |k| <= M0/2, with
    vanishing moments up to order M0 - 2.
    kind "exp-flat": amplitude exp(-rho (sin^2(theta/2))^(-kappa/2)),
    vanishing to infinite order at theta = 0.

    Coefficients come from periodic trapezoid quadrature, dropped below
    1e-16; a doubled-resolution rebuild certifies convergence.
    """
    if truncation < 16:
        raise ValueError("truncation must be at least 16")
    if kind == "sine-power":
        if M0 is None or M0 <= 0:
            raise ValueError("sine-power data needs M0 > 0")
        params = {"M0": float(M0)}

        def amplitude(th):
            return (np.sin(np.asarray(th) / 2.0) ** 2) ** (M0 / 2.0)

        def spectrum(th):
            return (np.sin(np.asarray(th) / 2.0) ** 2) ** float(M0)

        def log_spectrum(th):
            s2 = np.sin(np.asarray(th) / 2.0) ** 2
            with np.errstate(divide="ignore"):
                return float(M0) * np.log(s2)

    elif kind == "exp-flat":
        if rho is None or rho <= 0 or kappa is None or kappa <= 0:
            raise ValueError("exp-flat data needs rho > 0 and kappa > 0")
        params = {"rho": float(rho), "kappa": float(kappa)}
        scale = -(2.0 ** (kappa + 1.0)) * rho

        def amplitude(th):
            s2 = np.sin(np.asarray(th) / 2.0) ** 2
            with np.errstate(divide="ignore"):
                expo = np.where(s2 > 0, -rho * s2 ** (-kappa / 2.0), -np.inf)
            return np.exp(expo)

        def spectrum(th):
            return np.exp(log_spectrum(th))

        def log_spectrum(th):
            s2 = np.sin(np.asarray(th) / 2.0) ** 2
            xi = 2.0 * np.sqrt(s2)
            with np.errstate(divide="ignore"):
                return np.where(xi > 0, scale * xi ** (-kappa), -np.inf)

    else:
        raise ValueError("kind must be 'sine-power' or 'exp-flat'")

    def coefficients(ngrid: int) -> np.ndarray:
        th = 2.0 * np.pi * np.arange(ngrid) / ngrid
        fv = amplitude(th)
        ks = np.arange(-truncation, truncation + 1)
        return np.exp(1j * np.outer(ks, th)) @ fv / ngrid

    n1 = max(8 * truncation, 1024)
    c1 = coefficients(n1)
    c2 = coefficients(2 * n1)
    drift = float(np.max(np.abs(c1 - c2)))
    if drift > 1e-12:
        raise QuadratureError(f"initial-data quadrature moved by {drift:.2e} at doubled resolution")
    coeffs = c2
    peak = float(np.max(np.abs(coeffs))) if len(coeffs) else 0.0
    if peak > 0 and float(np.max(np.abs(coeffs.imag))) < 1e-13 * peak:
        coeffs = coeffs.real.astype(complex)  # even amplitude: coefficients are real
    ks = np.arange(-truncation, truncation + 1)
    pairs = [((int(k),), complex(c)) for k, c in zip(ks, coeffs) if abs(c) >= _DROP_BELOW]
    field = LatticeField.from_pairs(1, pairs)
    return GevreyData(kind=kind, field=field, params=params, spectrum=spectrum, log_spectrum=log_spectrum)


# -- the gate -------------------------------------------------------------------


@dataclass(frozen=True)
class GateResult:
    case: str  # "i" | "ii" | "neither"
    N0: float | None
    N_grid: np.ndarray
    domination: np.ndarray  # linear scale, may under/overflow; display only
    log_domination: np.ndarray
    growth: np.ndarray


def boundedness_gate(
    N_grid,
    seq: LogConvexSequence,
    profile: SpeedProfile,
    dim: int = 1,
    threshold: float = 10.0,
    tau_max: float = 1e6,
) -> GateResult:
    """Decide which energy-boundedness mechanism applies.

    Case "i": the domination constant is positive at every grid N, so
    the sequence class absorbs the growth for arbitrary data in it.
    Case "ii": the growth ratio climbs through ``threshold``; the first
    such N is reported as N0 and boundedness holds per-datum whenever
    the weighted initial energy at N0 is finite.  "neither" otherwise.
    """
    Ns = np.array(sorted(float(n) for n in N_grid))
    if len(Ns) == 0 or Ns[0] <= 0:
        raise ValueError("the gate needs a grid of positive N values")
    log_dom = np.array(
        [domination_constant(float(n), seq, profile, tau_max=tau_max, return_log=True) for n in Ns]
    )
    with np.errstate(over="ignore"):
        dom = np.exp(log_dom)
    growth = np.array([growth_ratio(profile, float(n), dim=dim, tau_max=tau_max) for n in Ns])
    # the linear constants routinely underflow, so positivity is a log question
    if bool(np.all(log_dom > -math.inf)):
        return GateResult("i", None, Ns, dom, log_dom, growth)
    hits = np.nonzero(growth >= threshold)[0]
    climbing = len(Ns) >= 2 and growth[-1] > 1.5 * growth[0]
    if len(hits) and climbing:
        return GateResult("ii", float(Ns[hits[0]]), Ns, dom, log_dom, growth)
    return GateResult("neither", None, Ns, dom, log_dom, growth)
