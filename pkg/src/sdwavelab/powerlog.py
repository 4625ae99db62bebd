"""Monotone control functions of the form c*(1+t)^s*log(e+t)^w.

Every stabilization/oscillation/partition control used by the speed
profiles fits this family (constants are the degenerate case s=w=0).
The class provides overflow-safe evaluation and inversion in
u = log1p(t) coordinates, plus upper estimates of tail integrals
of f(t)^(-m), which the hypothesis checks and the remainder bounds
consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError

_E = math.e


def _log_e_plus_t_of_u(u: float) -> float:
    """log(log(e+t)) ... inner part: returns log(e+t) for u = log1p(t), stably."""
    if u < 700.0:
        return math.log(_E + math.expm1(u))
    # e + t ~ t = expm1(u) ~ e^u; correction e*exp(-u) is below rounding
    return u


@dataclass(frozen=True)
class PowerLog:
    """f(t) = coef * (1+t)^s * log(e+t)^w on t >= 0."""

    coef: float = 1.0
    s: float = 0.0
    w: float = 0.0

    def __post_init__(self) -> None:
        if self.coef <= 0:
            raise ValueError("coef must be positive")
        if self.s < 0:
            raise ValueError("negative power exponent would not be monotone")
        # With s > 0 the derivative is s*log(e+t) + w*(1+t)/(e+t) times a
        # positive factor; s*log(e+t) >= s >= |w|*(1+t)/(e+t) may fail for
        # strongly negative w, so check monotonicity on a sample grid.
        if self.w < 0:
            ts = np.geomspace(1e-3, 1e6, 200)
            vals = self.__call__(np.concatenate(([0.0], ts)))
            if np.any(np.diff(vals) < -1e-12 * vals[:-1]):
                raise ValueError("power-log parameters give a non-monotone function")

    # -- evaluation -----------------------------------------------------

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.coef * np.power(1.0 + t, self.s)
        if self.w != 0.0:
            out = out * np.power(np.log(_E + t), self.w)
        return out if out.ndim else float(out)

    def log_value_u(self, u: float) -> float:
        """log f(t) at u = log1p(t); valid far beyond float range of t."""
        out = math.log(self.coef) + self.s * u
        if self.w != 0.0:
            out += self.w * math.log(_log_e_plus_t_of_u(u))
        return out

    @property
    def is_constant(self) -> bool:
        return self.s == 0.0 and self.w == 0.0

    @property
    def is_increasing(self) -> bool:
        return self.s > 0.0 or (self.s == 0.0 and self.w > 0.0)

    def sup(self) -> float:
        """Supremum over t >= 0 (finite only for constants)."""
        return self.coef if self.is_constant else math.inf

    # -- inversion ------------------------------------------------------

    def inverse_u(self, log_y: float) -> float:
        """Solve f(t) = y for u = log1p(t), given log y.

        Bisection on the increasing map u -> log f; u may exceed the
        float range of t itself, which is what the weighted-energy
        functionals need near theta -> 0.
        """
        if not self.is_increasing:
            raise ValueError("inverse requires a strictly increasing function")
        f0 = self.log_value_u(0.0)
        if log_y < f0 - 1e-12 * max(1.0, abs(f0)):
            raise ValueError(f"value below f(0)={math.exp(f0):g}; no preimage in t >= 0")
        if log_y <= f0:
            return 0.0
        hi = 1.0
        while self.log_value_u(hi) < log_y:
            hi *= 2.0
            if hi > 1e12:
                raise NumericalError("power-log inversion bracket exceeded")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.log_value_u(mid) < log_y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-16 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)

    def inverse(self, y: float) -> float:
        """Solve f(t) = y for t >= 0 (may overflow to inf for huge y)."""
        if y <= 0:
            raise ValueError("inverse needs a positive value")
        if self.w == 0.0 and self.s > 0.0:
            # closed form for pure powers
            if y < self.coef * (1.0 - 1e-12):
                raise ValueError(f"value below f(0)={self.coef:g}; no preimage in t >= 0")
            return max(0.0, (y / self.coef) ** (1.0 / self.s) - 1.0)
        u = self.inverse_u(math.log(y))
        return math.expm1(u) if u < 709.0 else math.inf

    # -- tail integrals of f^(-m) ----------------------------------------

    def _tail_bound(self, t0: float, m: int) -> float:
        """Analytic upper bound for ∫_{t0}^∞ f(s)^{-m} ds.

        The integrand is coef^{-m} (1+s)^{-A} log(e+s)^{B} with
        A = m*s, B = -m*w.  Requires A > 1.
        """
        a_exp = m * self.s
        b_exp = -m * self.w
        if a_exp <= 1.0:
            return math.inf
        lead = self.coef ** (-m) * (1.0 + t0) ** (1.0 - a_exp)
        lg = math.log(_E + t0)
        if b_exp <= 0.0:
            # log factor only shrinks the integrand past t0
            return lead * lg**b_exp / (a_exp - 1.0)
        # absorb log^B into (1+s)^{(A-1)/2}; valid once log(e+t0) is large enough
        eps = 0.5 * (a_exp - 1.0)
        if lg * eps < b_exp:
            return math.inf  # caller must push t0 further out first
        return 2.0 * lead * lg**b_exp / (a_exp - 1.0)

    def tail_integral_inverse_power(self, t0: float, m: int) -> float:
        """Upper estimate of ∫_{t0}^∞ f(s)^{-m} ds (inf when divergent).

        Exact for pure powers; otherwise quadrature out to a comfortable
        multiple of t0 plus the analytic remainder bound.
        """
        if m <= 0:
            raise ValueError("m must be positive")
        a_exp = m * self.s
        if a_exp <= 1.0:
            return math.inf
        if self.w == 0.0:
            return self.coef ** (-m) * (1.0 + t0) ** (1.0 - a_exp) / (a_exp - 1.0)
        b_exp = -m * self.w
        far = max(10.0 * (1.0 + t0), 1e4)
        if b_exp > 0.0:
            need = math.expm1(2.0 * b_exp / (a_exp - 1.0)) - _E + 1.0
            far = max(far, need)
        val, err = quad(
            lambda s: float(self(s)) ** (-m),
            t0,
            far,
            limit=800,
            epsabs=1e-12,
            epsrel=1e-12,
        )
        if err > 1e-7 * max(1.0, abs(val)):
            raise NumericalError("tail quadrature did not converge")
        return val + self._tail_bound(far, m)

    def l1_norm_of_inverse(self) -> float:
        """‖f^{-1}‖_{L^1(0,∞)} (inf when divergent)."""
        return self.tail_integral_inverse_power(0.0, 1)
