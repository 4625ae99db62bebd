"""Truncated Taylor-series arithmetic ("jets").

A jet carries the value and the first ``order`` derivatives of a smooth
function of one real variable at a single point, stored as Taylor
coefficients ``c[i] = f^(i)(t0)/i!``.  Arithmetic on jets propagates
derivatives exactly (to rounding), which is what the speed profiles and
the diagonalization chain use instead of symbolic differentiation or
finite differences.

Binary operations between jets of different orders truncate to the
shorter one: coefficients beyond the shared order would not be
determined by the inputs.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    """Taylor coefficients of a function at a point, up to a fixed order."""

    __slots__ = ("c",)

    def __init__(self, coeffs) -> None:
        c = np.atleast_1d(np.asarray(coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet needs a nonempty 1-d coefficient array")
        self.c = c

    # -- constructors -------------------------------------------------

    @classmethod
    def variable(cls, t: float, order: int, dtype=float) -> "Jet":
        """The identity function t ↦ t, expanded at ``t``."""
        c = np.zeros(order + 1, dtype=dtype)
        c[0] = t
        if order >= 1:
            c[1] = 1
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, dtype=None) -> "Jet":
        if dtype is None:
            dtype = complex if isinstance(value, complex) else float
        c = np.zeros(order + 1, dtype=dtype)
        c[0] = value
        return cls(c)

    # -- basic views ---------------------------------------------------

    @property
    def order(self) -> int:
        return self.c.size - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int):
        """k-th derivative value (not the Taylor coefficient)."""
        if not 0 <= k <= self.order:
            raise ValueError(f"derivative order {k} outside jet order {self.order}")
        return self.c[k] * math.factorial(k)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot extend a jet")
        return Jet(self.c[: order + 1])

    def astype(self, dtype) -> "Jet":
        return Jet(self.c.astype(dtype))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Jet({self.c!r})"

    # -- ring operations -----------------------------------------------

    @staticmethod
    def _coerce(other, order: int):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, order, dtype=np.asarray(other).dtype)

    def _aligned(self, other):
        other = self._coerce(other, self.order)
        n = min(self.order, other.order)
        return self.c[: n + 1], other.c[: n + 1], n

    def __add__(self, other) -> "Jet":
        a, b, _ = self._aligned(other)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.c)

    def __sub__(self, other) -> "Jet":
        a, b, _ = self._aligned(other)
        return Jet(a - b)

    def __rsub__(self, other) -> "Jet":
        a, b, _ = self._aligned(other)
        return Jet(b - a)

    def __mul__(self, other) -> "Jet":
        a, b, n = self._aligned(other)
        return Jet(np.convolve(a, b)[: n + 1])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        a, b, n = self._aligned(other)
        if b[0] == 0:
            raise ZeroDivisionError("jet division by a jet with zero value")
        q = np.zeros(n + 1, dtype=np.result_type(a, b))
        q[0] = a[0] / b[0]
        for k in range(1, n + 1):
            q[k] = (a[k] - np.dot(b[1 : k + 1], q[k - 1 :: -1])) / b[0]
        return Jet(q)

    def __rtruediv__(self, other) -> "Jet":
        return self._coerce(other, self.order) / self

    # -- calculus ------------------------------------------------------

    def deriv(self) -> "Jet":
        """Jet of f', one order shorter."""
        if self.order == 0:
            raise ValueError("order-0 jet has no derivative budget")
        k = np.arange(1, self.order + 1)
        return Jet(self.c[1:] * k)

    def conj(self) -> "Jet":
        return Jet(np.conj(self.c))

    def real(self) -> "Jet":
        return Jet(self.c.real.copy())

    def imag(self) -> "Jet":
        return Jet(self.c.imag.copy())

    def abs2(self) -> "Jet":
        """|f|^2 as a real jet (valid because the variable is real)."""
        return (self * self.conj()).real()

    # -- elementary functions (standard power-series recurrences) ------

    def exp(self) -> "Jet":
        n = self.order
        e = np.zeros(n + 1, dtype=np.result_type(self.c, 1.0))
        e[0] = np.exp(self.c[0])
        for k in range(1, n + 1):
            j = np.arange(1, k + 1)
            e[k] = np.dot(j * self.c[1 : k + 1], e[k - 1 :: -1]) / k
        return Jet(e)

    def log(self) -> "Jet":
        n = self.order
        if np.real(self.c[0]) <= 0 and np.imag(self.c[0]) == 0:
            raise ValueError("jet log needs a positive value")
        l = np.zeros(n + 1, dtype=np.result_type(self.c, 1.0))
        l[0] = np.log(self.c[0])
        for k in range(1, n + 1):
            acc = self.c[k]
            if k >= 2:
                j = np.arange(1, k)
                acc = acc - np.dot(j * l[1:k], self.c[k - 1 : 0 : -1]) / k
            l[k] = acc / self.c[0]
        return Jet(l)

    def power(self, alpha: float) -> "Jet":
        """f**alpha for real alpha; f must have nonzero value."""
        if alpha == 0:
            return Jet.constant(1.0, self.order, dtype=np.result_type(self.c, 1.0))
        n = self.order
        if self.c[0] == 0:
            raise ZeroDivisionError("jet power at a zero value")
        p = np.zeros(n + 1, dtype=np.result_type(self.c, 1.0))
        p[0] = self.c[0] ** alpha
        for k in range(1, n + 1):
            j = np.arange(1, k + 1)
            w = (alpha + 1) * j - k
            p[k] = np.dot(w * self.c[1 : k + 1], p[k - 1 :: -1]) / (k * self.c[0])
        return Jet(p)

    def sqrt(self) -> "Jet":
        return self.power(0.5)

    def ipow(self, n: int) -> "Jet":
        """f**n for integer n >= 0 by repeated squaring; no value restriction."""
        if n < 0 or n != int(n):
            raise ValueError("ipow needs a nonnegative integer exponent")
        out = Jet.constant(1.0, self.order, dtype=np.result_type(self.c, 1.0))
        base = self
        n = int(n)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sin_cos(self) -> tuple["Jet", "Jet"]:
        n = self.order
        dt = np.result_type(self.c, 1.0)
        s = np.zeros(n + 1, dtype=dt)
        c = np.zeros(n + 1, dtype=dt)
        s[0] = np.sin(self.c[0])
        c[0] = np.cos(self.c[0])
        for k in range(1, n + 1):
            j = np.arange(1, k + 1)
            g = j * self.c[1 : k + 1]
            s[k] = np.dot(g, c[k - 1 :: -1]) / k
            c[k] = -np.dot(g, s[k - 1 :: -1]) / k
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self.sin_cos()[0]

    def cos(self) -> "Jet":
        return self.sin_cos()[1]
