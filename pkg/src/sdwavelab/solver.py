"""Per-frequency integration of the reduced wave ODE and energy assembly.

Each torus frequency theta contributes one complex oscillator
    v'' + a(t)^2 |xi(theta)|^2 v = 0,
integrated as a first-order system for (v, v').  All modes of a grid
share every time step, so the right-hand side is evaluated on (2, P)
complex arrays with a single a(t) lookup per stage.

The stepper is the classic embedded 5(4) pair with a first-same-as-last
stage, controlled per unit step: a step of size h is accepted when the
scaled error estimate is at most tol*h.  Sample times and the profile's
breakpoints (bump edges, where the coefficient is only finitely
differentiable) are forced as exact step endpoints.  Integration runs in
either time direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StepBudgetExceeded, StepSizeUnderflow
from .lattice import FrequencyPoint, LatticeField, ThetaGrid, dtft_on_grid, xi_of_theta
from .profiles import SpeedProfile

DEFAULT_TOL = 1e-10
MAX_STEPS = 20_000_000

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_ERR = _B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _rhs(profile: SpeedProfile, t: float, y: np.ndarray, xi_sq: np.ndarray) -> np.ndarray:
    a = profile.value(t)
    out = np.empty_like(y)
    out[0] = y[1]
    out[1] = -(a * a) * xi_sq * y[0]
    return out


def integrate_modes(
    profile: SpeedProfile,
    xi_norms: np.ndarray,
    v0: np.ndarray,
    w0: np.ndarray,
    t0: float,
    t1: float,
    sample_times,
    tol: float = DEFAULT_TOL,
    max_steps: int = MAX_STEPS,
) -> np.ndarray:
    """Integrate all modes from t0 to t1, returning states at sample_times.

    Result shape is (len(sample_times), 2, P): axis 1 holds (v, dv/dt).
    Sample times must lie between t0 and t1 (inclusive, either direction).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    xi_sq = np.asarray(xi_norms, dtype=float) ** 2
    y = np.stack([np.asarray(v0, dtype=complex), np.asarray(w0, dtype=complex)])
    samples = [float(s) for s in sample_times]
    d = 1.0 if t1 >= t0 else -1.0
    for s in samples:
        if d * (s - t0) < -1e-12 or d * (s - t1) > 1e-12:
            raise ValueError(f"sample time {s} outside the integration span")

    out = np.empty((len(samples), *y.shape), dtype=complex)
    want: dict[float, list] = {}
    for i, s in enumerate(samples):
        want.setdefault(s, []).append(i)

    lo, hi = min(t0, t1), max(t0, t1)
    forced = sorted(set(samples) | set(profile.breakpoints_in(lo, hi)) | {t1}, key=lambda s: d * s)

    t = t0
    for i in want.get(t0, []):
        out[i] = y
    nflat = y.size
    K = np.empty((7, nflat), dtype=complex)
    K[0] = _rhs(profile, t, y, xi_sq).reshape(nflat)
    fnorm = float(np.max(np.abs(K[0]))) if nflat else 0.0
    ynorm = max(1.0, float(np.max(np.abs(y))) if nflat else 0.0)
    h = min(abs(t1 - t0), 0.1 * ynorm / max(fnorm, ynorm), 1.0) or abs(t1 - t0)
    steps = 0

    for target in forced:
        if d * (target - t) <= 0:
            for i in want.get(target, []):
                out[i] = y
            continue
        while d * (target - t) > 0:
            if steps >= max_steps:
                raise StepBudgetExceeded(f"step budget {max_steps} exhausted at t={t:g}")
            steps += 1
            h = min(h, abs(target - t))
            if h < 2.0 ** -46 * max(1.0, abs(t)):
                raise StepSizeUnderflow(f"step size underflow at t={t:g}")
            hd = d * h
            yf = y.reshape(nflat)
            for s_i in range(1, 7):
                ys = (yf + hd * (_A[s_i] @ K[:s_i])).reshape(y.shape)
                K[s_i] = _rhs(profile, t + hd * _C[s_i], ys, xi_sq).reshape(nflat)
            err = h * np.abs(_ERR @ K)
            e = float(np.max(err / np.maximum(1.0, np.abs(yf)))) if nflat else 0.0
            if e <= tol * h:
                t = target if h == abs(target - t) else t + hd
                y = (yf + hd * (_B5 @ K)).reshape(y.shape)
                K[0] = K[6]
            # error ~ h^5 against a tol*h target, so the optimum scales as (tol*h/e)^(1/4)
            factor = 0.9 * (tol * h / e) ** 0.25 if e > 0 else 5.0
            h *= min(5.0, max(0.2, factor))
        for i in want.get(target, []):
            out[i] = y
    return out


# -- single-mode interface ---------------------------------------------------


@dataclass(frozen=True)
class ModeState:
    """One frequency's state (v, dv/dt) at a time point."""

    t: float
    v: complex
    vt: complex
    freq: FrequencyPoint


def integrate_mode(
    profile: SpeedProfile,
    freq: FrequencyPoint,
    init,
    t_end: float,
    tol: float = DEFAULT_TOL,
    sample_times=None,
) -> list:
    """Integrate a single mode; returns states at 0 and each sample time."""
    v0, v1 = complex(init[0]), complex(init[1])
    if sample_times is None:
        sample_times = (t_end,)
    states = integrate_modes(
        profile,
        np.array([freq.xi_norm]),
        np.array([v0]),
        np.array([v1]),
        0.0,
        t_end,
        sample_times,
        tol=tol,
    )
    result = [ModeState(t=0.0, v=v0, vt=v1, freq=freq)]
    for s, row in zip(sample_times, states):
        result.append(ModeState(t=float(s), v=complex(row[0, 0]), vt=complex(row[1, 0]), freq=freq))
    return result


def energy_density(state: ModeState, profile: SpeedProfile, mode: str = "actual") -> float:
    """|dv/dt|^2 + a^2 |xi|^2 |v|^2 with a = a(t) ('actual') or a_inf ('stabilized')."""
    if mode == "actual":
        a = profile.value(state.t)
    elif mode == "stabilized":
        a = profile.a_inf
    else:
        raise ValueError("mode must be 'actual' or 'stabilized'")
    return abs(state.vt) ** 2 + (a * state.freq.xi_norm) ** 2 * abs(state.v) ** 2


def density_arrays(v: np.ndarray, w: np.ndarray, a: float, xi_norms: np.ndarray) -> np.ndarray:
    return np.abs(w) ** 2 + (a * xi_norms) ** 2 * np.abs(v) ** 2


def total_energy(density: np.ndarray) -> np.ndarray:
    """(2*pi)^{-d} integral over the torus = plain mean over the uniform grid."""
    return np.mean(density, axis=-1)


# -- grid simulation ---------------------------------------------------------


@dataclass(frozen=True)
class EnergyTrace:
    """Energy densities on a theta-grid at increasing sample times."""

    grid: ThetaGrid = field(repr=False)
    xi_norms: np.ndarray = field(repr=False)
    times: np.ndarray
    density: np.ndarray = field(repr=False)      # (T, P), speed a(t)
    density_inf: np.ndarray = field(repr=False)  # (T, P), speed a_inf
    total: np.ndarray = field(repr=False)        # (T,)
    v: np.ndarray = field(repr=False)            # (T, P) mode values
    vt: np.ndarray = field(repr=False)           # (T, P) mode velocities


def sample_schedule(t_end: float, per_decade: int = 64) -> np.ndarray:
    """Geometric sample times resolving slow growth: 0, then per-decade points."""
    if t_end <= 0:
        return np.array([0.0])
    start = min(1.0, t_end)
    n = max(2, int(math.ceil(per_decade * max(1.0, math.log10(t_end / start) + 1))))
    ts = np.geomspace(start, t_end, n)
    return np.concatenate([[0.0], ts])


def xi_norms_of_grid(grid: ThetaGrid) -> np.ndarray:
    return np.array([xi_of_theta(p).xi_norm for p in grid.points])


def simulate(
    profile: SpeedProfile,
    u0: LatticeField,
    u1: LatticeField,
    grid: ThetaGrid,
    sample_times,
    tol: float = DEFAULT_TOL,
) -> EnergyTrace:
    """Evolve initial lattice data over the grid and record energy densities."""
    if u0.dim != grid.dim or u1.dim != grid.dim:
        raise ValueError("data and grid dimension mismatch")
    v0 = dtft_on_grid(u0, grid)
    w0 = dtft_on_grid(u1, grid)
    return simulate_spectral(profile, v0, w0, grid, sample_times, tol=tol)


def simulate_spectral(
    profile: SpeedProfile,
    v0: np.ndarray,
    w0: np.ndarray,
    grid: ThetaGrid,
    sample_times,
    tol: float = DEFAULT_TOL,
) -> EnergyTrace:
    """Same as simulate, but starting from mode values given on the grid."""
    times = np.asarray(list(sample_times), dtype=float)
    if times.size == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("sample times must be nondecreasing and nonnegative")
    xi_norms = xi_norms_of_grid(grid)
    states = integrate_modes(
        profile, xi_norms, v0, w0, 0.0, float(times[-1]), times, tol=tol
    )
    v = states[:, 0, :]
    w = states[:, 1, :]
    a_vals = np.array([profile.value(t) for t in times])
    density = np.abs(w) ** 2 + (a_vals[:, None] * xi_norms[None, :]) ** 2 * np.abs(v) ** 2
    density_inf = np.abs(w) ** 2 + (profile.a_inf * xi_norms[None, :]) ** 2 * np.abs(v) ** 2
    return EnergyTrace(
        grid=grid,
        xi_norms=xi_norms,
        times=times,
        density=density,
        density_inf=density_inf,
        total=np.mean(density, axis=-1),
        v=v,
        vt=w,
    )
