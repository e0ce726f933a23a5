"""Homotopies H(x, t) tracked from t = 1 down to t = 0.

Every homotopy exposes ``nvars`` and ``evaluate(x, t)`` returning the triple
(H, dH/dx, dH/dt).  Blocks of equations can be stacked so that slices, fixed
equations and blended equations share one interface.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import LaurentSystem, ParametricFamily
from .errors import DimensionMismatch


class AffineSlice:
    """A list of affine forms a·x + a0, one per row of ``coeffs``.

    ``coeffs`` has shape (d, n + 1); the last column holds the constants.
    """

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 2:
            coeffs = coeffs.reshape(-1, coeffs.shape[-1])
        self.coeffs = coeffs

    @property
    def nforms(self) -> int:
        return self.coeffs.shape[0]

    @property
    def nvars(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def matrix(self) -> np.ndarray:
        return self.coeffs[:, :-1]

    @property
    def constants(self) -> np.ndarray:
        return self.coeffs[:, -1]

    def evaluate(self, x) -> np.ndarray:
        return self.matrix @ x + self.constants

    def evaluate_with_jacobian(self, x):
        return self.evaluate(x), self.matrix

    def head(self, k: int) -> "AffineSlice":
        return AffineSlice(self.coeffs[:k])

    def replace(self, row: int, coeffs) -> "AffineSlice":
        c = self.coeffs.copy()
        c[row] = coeffs
        return AffineSlice(c)

    def __add__(self, other: "AffineSlice") -> "AffineSlice":
        return AffineSlice(self.coeffs + other.coeffs)

    def __mul__(self, s) -> "AffineSlice":
        return AffineSlice(self.coeffs * s)

    __rmul__ = __mul__

    @classmethod
    def random(cls, nvars: int, nforms: int, rng) -> "AffineSlice":
        from .rng import complex_normal

        return cls(complex_normal(rng, (nforms, nvars + 1)))

    @classmethod
    def through_point(cls, x0, nforms: int, rng) -> "AffineSlice":
        from .rng import complex_normal

        x0 = np.asarray(x0, complex)
        A = complex_normal(rng, (nforms, x0.size))
        return cls(np.hstack([A, -(A @ x0)[:, None]]))

    @classmethod
    def empty(cls, nvars: int) -> "AffineSlice":
        return cls(np.zeros((0, nvars + 1), dtype=complex))

    def as_polys(self, names=None):
        from .algebra import LaurentPolynomial

        n = self.nvars
        polys = []
        for row in self.coeffs:
            terms = {tuple(int(i == j) for i in range(n)): row[j] for j in range(n)}
            terms[(0,) * n] = row[-1]
            polys.append(LaurentPolynomial(n, terms))
        return polys


class Randomized:
    """R·F for a complex matrix R, evaluated without expanding the products."""

    def __init__(self, system, matrix):
        self.system = system
        self.matrix = np.asarray(matrix, dtype=complex)

    def evaluate_with_jacobian(self, x):
        v, J = self.system.evaluate_with_jacobian(x)
        return self.matrix @ v, self.matrix @ J

    def __len__(self):
        return self.matrix.shape[0]


def _nrows(block) -> int:
    if isinstance(block, AffineSlice):
        return block.nforms
    return len(block)


class Fixed:
    """Equations that do not depend on t."""

    def __init__(self, part):
        self.part = part

    def __len__(self):
        return _nrows(self.part)

    def evaluate(self, x, t):
        v, J = self.part.evaluate_with_jacobian(x)
        return v, J, np.zeros_like(v)


class Blend:
    """gamma·t·start + (1 - t)·target."""

    def __init__(self, start, target, gamma: complex = 1.0):
        if _nrows(start) != _nrows(target):
            raise DimensionMismatch("blended blocks must have equally many equations")
        self.start, self.target, self.gamma = start, target, complex(gamma)
        self._joint = None
        if isinstance(start, LaurentSystem) and isinstance(target, LaurentSystem):
            # one monomial table serves both systems
            self._joint = LaurentSystem(start.polys + target.polys, target.variables, target.nvars)

    def __len__(self):
        return _nrows(self.start)

    def evaluate(self, x, t):
        if self._joint is not None:
            k = _nrows(self.start)
            v, J = self._joint.compiled.values_and_jacobian(x)
            g, f, Jg, Jf = v[:k], v[k:], J[:k], J[k:]
        else:
            g, Jg = self.start.evaluate_with_jacobian(x)
            f, Jf = self.target.evaluate_with_jacobian(x)
        gt = self.gamma * t
        return gt * g + (1 - t) * f, gt * Jg + (1 - t) * Jf, self.gamma * g - f


class StackedHomotopy:
    def __init__(self, blocks: Sequence, nvars: int):
        self.blocks = list(blocks)
        self.nvars = nvars
        if sum(len(b) for b in self.blocks) != nvars:
            raise DimensionMismatch("homotopy is not square")

    def evaluate(self, x, t):
        if len(self.blocks) == 1:
            return self.blocks[0].evaluate(x, t)
        parts = [b.evaluate(x, t) for b in self.blocks]
        return (np.concatenate([p[0] for p in parts]),
                np.vstack([p[1] for p in parts]),
                np.concatenate([p[2] for p in parts]))


def straight_line(start: LaurentSystem, target: LaurentSystem, gamma: complex = 1.0) -> StackedHomotopy:
    """H = gamma·t·G + (1 - t)·F."""
    if not target.is_square or len(start) != len(target) or start.nvars != target.nvars:
        raise DimensionMismatch("start and target must be square systems of the same shape")
    return StackedHomotopy([Blend(start, target, gamma)], target.nvars)


def slice_homotopy(system, randomizer, start: AffineSlice, target: AffineSlice) -> StackedHomotopy:
    """(R·F(x), t·L(x) + (1 - t)·L'(x)): moves points along V(F) between slices."""
    blocks = []
    if randomizer is not None and np.asarray(randomizer).shape[0]:
        blocks.append(Fixed(Randomized(system, randomizer)))
    if start.nforms:
        blocks.append(Blend(start, target))
    return StackedHomotopy(blocks, start.nvars)


class ParameterHomotopy:
    """F(x; t·p1 + (1 - t)·p0) for a parametric family; at t = 1 it is F(·; p1)."""

    def __init__(self, family: ParametricFamily, p_start, p_end, randomizer=None):
        self.family = family
        self.p_start = np.asarray(p_start, complex).ravel()
        self.p_end = np.asarray(p_end, complex).ravel()
        self.nvars = family.nvars
        self.randomizer = None if randomizer is None else np.asarray(randomizer, complex)
        rows = len(family) if self.randomizer is None else self.randomizer.shape[0]
        if rows != self.nvars:
            raise DimensionMismatch("parameter homotopy is not square")

    def evaluate(self, x, t):
        p = t * self.p_start + (1 - t) * self.p_end
        v, Jx, Jp = self.family.evaluate(x, p)
        dt = Jp @ (self.p_start - self.p_end)
        if self.randomizer is not None:
            R = self.randomizer
            return R @ v, R @ Jx, R @ dt
        return v, Jx, dt
