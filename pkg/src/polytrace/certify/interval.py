"""Real and complex interval arithmetic with outward rounding.

Each bound is computed in round-to-nearest and then pushed one ulp outward
with math.nextafter, which encloses the exact result of every operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..algebra import LaurentPolynomial, LaurentSystem

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(float(x), float(x))

    @classmethod
    def around(cls, x: float, r: float) -> "Interval":
        return cls(_down(x - r), _up(x + r))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def interior_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def _co(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        other = self._co(other)
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = self._co(other)
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        other = self._co(other)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(_down(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(_down(1 / self.hi), _up(1 / self.lo))

    def __truediv__(self, other):
        other = self._co(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval contains zero")
        p = (self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi)
        return Interval(_down(min(p)), _up(max(p)))

    def __rtruediv__(self, other):
        return self._co(other) / self

    def square(self) -> "Interval":
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return Interval(_down(lo * lo), _up(hi * hi))
        if hi <= 0:
            return Interval(_down(hi * hi), _up(lo * lo))
        return Interval(0.0, _up(max(lo * lo, hi * hi)))

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return (self ** -k).reciprocal()
        result, base = Interval.point(1.0), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base.square()
        return result

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    @classmethod
    def point(cls, z: complex) -> "ComplexInterval":
        z = complex(z)
        return cls(Interval.point(z.real), Interval.point(z.imag))

    @classmethod
    def around(cls, z: complex, r: float) -> "ComplexInterval":
        z = complex(z)
        return cls(Interval.around(z.real, r), Interval.around(z.imag, r))

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __contains__(self, z) -> bool:
        if isinstance(z, ComplexInterval):
            return z.re in self.re and z.im in self.im
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def interior_contains(self, other: "ComplexInterval") -> bool:
        return self.re.interior_contains(other.re) and self.im.interior_contains(other.im)

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def mag(self) -> float:
        """Upper bound on |z| over the box."""
        return _up(_up(math.hypot(self.re.mag(), self.im.mag())))

    def _co(self, other) -> "ComplexInterval":
        if isinstance(other, ComplexInterval):
            return other
        if isinstance(other, Interval):
            return ComplexInterval(other, Interval.point(0.0))
        return ComplexInterval.point(other)

    def __add__(self, other):
        other = self._co(other)
        return ComplexInterval(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __sub__(self, other):
        other = self._co(other)
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        # (X + iY)(Z + iW) = (XZ - YW) + i(XW + YZ)
        other = self._co(other)
        X, Y, Z, W = self.re, self.im, other.re, other.im
        return ComplexInterval(X * Z - Y * W, X * W + Y * Z)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # (X + iY)/(Z + iW) = ((XZ + YW) + i(YZ - XW)) / (Z^2 + W^2)
        other = self._co(other)
        X, Y, Z, W = self.re, self.im, other.re, other.im
        den = Z.square() + W.square()
        return ComplexInterval((X * Z + Y * W) / den, (Y * Z - X * W) / den)

    def __rtruediv__(self, other):
        return self._co(other) / self

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return ComplexInterval.point(1.0) / (self ** -k)
        result, base = ComplexInterval.point(1.0), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


Box = list[ComplexInterval]


def box_around(x: Sequence[complex], r) -> Box:
    r = np.broadcast_to(np.asarray(r, float), (len(x),))
    return [ComplexInterval.around(z, float(ri)) for z, ri in zip(x, r)]


def point_box(x: Sequence[complex]) -> Box:
    return [ComplexInterval.point(z) for z in x]


def eval_poly_interval(f: LaurentPolynomial, box: Box) -> ComplexInterval:
    """Enclosure of f over the box; terms summed in graded-lex order."""
    total = ComplexInterval.point(0.0)
    for e, c in f.ordered_terms():
        term = ComplexInterval.point(c)
        for zj, a in zip(box, e):
            if a:
                term = term * (zj ** a)
        total = total + term
    return total


def eval_system_interval(F: LaurentSystem, box: Box) -> list[ComplexInterval]:
    return [eval_poly_interval(f, box) for f in F.polys]


def eval_jacobian_interval(F: LaurentSystem, box: Box) -> list[list[ComplexInterval]]:
    return [[eval_poly_interval(d, box) for d in row] for row in F.jacobian_polys()]


def matvec(M, v) -> list[ComplexInterval]:
    """Interval (or point) matrix times interval vector."""
    out = []
    for row in M:
        acc = ComplexInterval.point(0.0)
        for a, b in zip(row, v):
            acc = acc + (a if isinstance(a, ComplexInterval) else ComplexInterval.point(a)) * b
        out.append(acc)
    return out


def point_times_interval_matrix(Y: np.ndarray, M) -> list[list[ComplexInterval]]:
    n, k = Y.shape[0], len(M[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = ComplexInterval.point(0.0)
            for l in range(Y.shape[1]):
                acc = acc + ComplexInterval.point(Y[i, l]) * M[l][j]
            row.append(acc)
        out.append(row)
    return out


def inf_norm_upper(M) -> float:
    """Upper bound of max_i sum_j |M_ij| over an interval matrix."""
    best = 0.0
    for row in M:
        s = 0.0
        for a in row:
            s = _up(s + a.mag())
        best = max(best, s)
    return best
