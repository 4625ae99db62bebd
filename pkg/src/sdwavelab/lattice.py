"""Finitely supported fields on the integer lattice and their Fourier side.

Fields are sparse maps from Z^d (d <= 3) to complex values.  The
discrete-time Fourier transform (DTFT) of such a field is a trigonometric
polynomial on the d-torus [-pi, pi]^d, so uniform trapezoidal quadrature
is exact once the grid outresolves the support diameter; that exactness
is what the Parseval-based energy identities lean on.

Conventions
-----------
* forward difference  (D+ f)[k] = f[k + e_j] - f[k]
* backward difference (D- f)[k] = f[k] - f[k - e_j]
* dtft(f)(theta) = sum_k exp(-i k.theta) f[k]
* frequency symbol xi_j(theta) = 2 sin(theta_j / 2), |xi| <= 2 sqrt(d)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
MAX_DIM = 3

#: default uniform grid size per dimension (exactness needs n > support diameter)
DEFAULT_GRID_SIZE = {1: 256, 2: 64, 3: 16}


def _reduce_angle(x: float) -> float:
    """Reduce an angle to [-pi, pi] deterministically (IEEE remainder is exact)."""
    r = math.remainder(x, TWO_PI)
    return r


@dataclass(frozen=True)
class LatticeField:
    """Sparse complex field on Z^dim with finite support.

    ``keys`` is an (S, dim) int array sorted lexicographically and
    ``values`` the matching (S,) complex array; sorting fixes the
    summation order so norms and transforms are reproducible bit for bit.
    Entries that are exactly zero are dropped.
    """

    dim: int
    keys: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must be in 1..{MAX_DIM}")
        if self.keys.ndim != 2 or self.keys.shape[1] != self.dim:
            raise ValueError("keys must be an (S, dim) array")
        if self.values.shape != (self.keys.shape[0],):
            raise ValueError("values must match keys")

    @classmethod
    def from_dict(cls, dim: int, entries: dict) -> "LatticeField":
        pairs = []
        for k, v in entries.items():
            kk = (k,) if np.isscalar(k) else tuple(k)
            if len(kk) != dim:
                raise ValueError(f"index {kk} does not have dimension {dim}")
            pairs.append((kk, complex(v)))
        return cls.from_pairs(dim, pairs)

    @classmethod
    def from_pairs(cls, dim: int, pairs) -> "LatticeField":
        agg: dict[tuple, complex] = {}
        for k, v in pairs:
            kk = tuple(int(x) for x in k)
            agg[kk] = agg.get(kk, 0j) + complex(v)
        items = sorted((k, v) for k, v in agg.items() if v != 0)
        if not items:
            return cls(dim, np.zeros((0, dim), dtype=np.int64), np.zeros(0, dtype=complex))
        keys = np.array([k for k, _ in items], dtype=np.int64).reshape(-1, dim)
        vals = np.array([v for _, v in items], dtype=complex)
        return cls(dim, keys, vals)

    @classmethod
    def zero(cls, dim: int) -> "LatticeField":
        return cls(dim, np.zeros((0, dim), dtype=np.int64), np.zeros(0, dtype=complex))

    # -- mapping access --------------------------------------------------

    @property
    def support_size(self) -> int:
        return self.keys.shape[0]

    def support(self) -> list[tuple]:
        return [tuple(int(x) for x in row) for row in self.keys]

    def items(self):
        for row, v in zip(self.keys, self.values):
            yield tuple(int(x) for x in row), complex(v)

    def get(self, k) -> complex:
        kk = np.asarray((k,) if np.isscalar(k) else tuple(k), dtype=np.int64)
        if kk.shape != (self.dim,):
            raise ValueError(f"index {k} does not have dimension {self.dim}")
        idx = np.flatnonzero(np.all(self.keys == kk, axis=1))
        return complex(self.values[idx[0]]) if idx.size else 0j

    def __len__(self) -> int:
        return self.support_size


def delta(dim: int, index=None) -> LatticeField:
    """Kronecker delta at ``index`` (origin by default)."""
    if index is None:
        index = (0,) * dim
    return LatticeField.from_dict(dim, {tuple(np.atleast_1d(index)): 1.0})


def l2_norm_squared(f: LatticeField) -> float:
    """sum_k |f[k]|^2 over the support."""
    return float(np.sum(np.abs(f.values) ** 2))


def _unit_shift(dim: int, axis: int) -> np.ndarray:
    if not 1 <= axis <= dim:
        raise ValueError(f"axis must be in 1..{dim} (got {axis})")
    e = np.zeros(dim, dtype=np.int64)
    e[axis - 1] = 1
    return e


def difference(f: LatticeField, axis: int, direction: str = "forward") -> LatticeField:
    """Forward or backward difference along ``axis`` (1-based)."""
    e = _unit_shift(f.dim, axis)
    pairs = []
    if direction == "forward":
        for k, v in f.items():
            pairs.append((tuple(np.asarray(k) - e), v))  # f[k] enters (D+f)[k-e] with +
            pairs.append((k, -v))
    elif direction == "backward":
        for k, v in f.items():
            pairs.append((k, v))
            pairs.append((tuple(np.asarray(k) + e), -v))
    else:
        raise ValueError("direction must be 'forward' or 'backward'")
    return LatticeField.from_pairs(f.dim, pairs)


def discrete_laplacian(f: LatticeField) -> LatticeField:
    """sum_j D+_j D-_j f, i.e. the standard (2d+1)-point stencil."""
    pairs = []
    for axis in range(1, f.dim + 1):
        e = _unit_shift(f.dim, axis)
        for k, v in f.items():
            ka = np.asarray(k)
            pairs.append((tuple(ka - e), v))
            pairs.append((k, -2.0 * v))
            pairs.append((tuple(ka + e), v))
    return LatticeField.from_pairs(f.dim, pairs)


# -- Fourier side ---------------------------------------------------------


def dtft(f: LatticeField, theta) -> complex:
    """DTFT at one point of the torus; the input angle is reduced mod 2*pi."""
    th = np.asarray(theta, dtype=float).reshape(-1)
    if th.shape != (f.dim,):
        raise ValueError(f"theta must have {f.dim} components")
    th = np.array([_reduce_angle(x) for x in th])
    if f.support_size == 0:
        return 0j
    phase = np.exp(-1j * (f.keys @ th))
    return complex(np.dot(f.values, phase))


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform tensor grid on [-pi, pi)^dim with trapezoidal weight."""

    dim: int
    n: int
    axis: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, dim: int, n: int | None = None) -> "ThetaGrid":
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dim must be in 1..{MAX_DIM}")
        if n is None:
            n = DEFAULT_GRID_SIZE[dim]
        if n < 2:
            raise ValueError("grid size must be at least 2")
        axis = -math.pi + TWO_PI * np.arange(n) / n
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        points = np.stack([m.reshape(-1) for m in mesh], axis=1)
        return cls(dim, n, axis, points)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def weight(self) -> float:
        """Quadrature weight per node for ∫ over the torus."""
        return (TWO_PI / self.n) ** self.dim


def torus_grid(dim: int, n: int | None = None) -> ThetaGrid:
    return ThetaGrid.build(dim, n)


def dtft_on_grid(f: LatticeField, grid: ThetaGrid) -> np.ndarray:
    """DTFT evaluated on every grid node, shape (grid.size,)."""
    if f.dim != grid.dim:
        raise ValueError("field and grid dimension mismatch")
    if f.support_size == 0:
        return np.zeros(grid.size, dtype=complex)
    phase = np.exp(-1j * (f.keys.astype(float) @ grid.points.T))
    return f.values @ phase


def parseval_quadrature(f: LatticeField, grid: ThetaGrid | None = None) -> float:
    """(2*pi)^{-d} ∫ |dtft f|^2 via the trapezoidal grid.

    Exact (to rounding) once the grid size exceeds the support diameter,
    and then equal to l2_norm_squared(f).
    """
    if grid is None:
        grid = torus_grid(f.dim)
    vals = dtft_on_grid(f, grid)
    return float(np.sum(np.abs(vals) ** 2)) / grid.size


# -- frequency symbol ------------------------------------------------------


@dataclass(frozen=True)
class FrequencyPoint:
    """A torus point with its frequency symbol; xi is always derived from theta."""

    theta: tuple
    xi: tuple = field(init=False)
    xi_norm: float = field(init=False)

    def __post_init__(self) -> None:
        th = tuple(float(x) for x in np.atleast_1d(self.theta))
        if not 1 <= len(th) <= MAX_DIM:
            raise ValueError(f"theta must have 1..{MAX_DIM} components")
        for x in th:
            if not -math.pi <= x <= math.pi:
                raise ValueError(f"theta component {x} outside [-pi, pi]")
        xi = tuple(2.0 * math.sin(0.5 * x) for x in th)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "xi_norm", math.sqrt(math.fsum(x * x for x in xi)))

    @property
    def dim(self) -> int:
        return len(self.theta)


def xi_of_theta(theta) -> FrequencyPoint:
    """Frequency symbol xi_j = 2 sin(theta_j/2) at a torus point."""
    return FrequencyPoint(theta=tuple(np.atleast_1d(np.asarray(theta, dtype=float))))


def xi_norm_of_theta(theta) -> float:
    return xi_of_theta(theta).xi_norm
