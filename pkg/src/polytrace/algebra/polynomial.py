"""Sparse Laurent polynomials over the complex numbers.

A polynomial is a map from integer exponent tuples to nonzero complex
coefficients.  Terms are always presented in graded-lex order (total degree
descending, then lexicographic descending), which fixes the evaluation order
used by both the floating-point and interval evaluators.
"""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import DimensionMismatch, DivisionByZero

Exponent = tuple[int, ...]


def grlex_key(e: Exponent):
    return (-sum(e), tuple(-v for v in e))


def _as_complex(c) -> complex:
    if isinstance(c, Fraction):
        return complex(float(c))
    return complex(c)


class LaurentPolynomial:
    """Immutable sparse Laurent polynomial in ``nvars`` variables."""

    __slots__ = ("_terms", "nvars", "_order")

    def __init__(self, nvars: int, terms: Mapping[Exponent, complex] | Iterable = ()):
        self.nvars = int(nvars)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, complex] = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars:
                raise DimensionMismatch(f"exponent {e} has length {len(e)}, expected {self.nvars}")
            acc[e] = acc.get(e, 0j) + _as_complex(c)
        self._terms = {e: c for e, c in acc.items() if c != 0}
        self._order: tuple[Exponent, ...] | None = None

    # construction helpers

    @classmethod
    def constant(cls, nvars: int, c) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "LaurentPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c=1) -> "LaurentPolynomial":
        return cls(len(exponent), {tuple(exponent): c})

    # inspection

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return MappingProxyType(self._terms)

    def ordered_exponents(self) -> tuple[Exponent, ...]:
        if self._order is None:
            self._order = tuple(sorted(self._terms, key=grlex_key))
        return self._order

    def ordered_terms(self) -> list[tuple[Exponent, complex]]:
        return [(e, self._terms[e]) for e in self.ordered_exponents()]

    def support(self) -> list[Exponent]:
        return list(self.ordered_exponents())

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Maximal total degree of a term (0 for the zero polynomial)."""
        return max((sum(e) for e in self._terms), default=0)

    def has_negative_exponents(self) -> bool:
        return any(v < 0 for e in self._terms for v in e)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    # arithmetic

    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials live in different rings")
            return other
        return LaurentPolynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0j) + c
        return LaurentPolynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            c = _as_complex(other)
            return LaurentPolynomial(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        terms: dict[Exponent, complex] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return LaurentPolynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentPolynomial):
            if len(other) != 1:
                raise ValueError("can only divide by a monomial")
            ((e, c),) = other._terms.items()
            return self * LaurentPolynomial.monomial([-v for v in e], 1 / c)
        return self * (1 / _as_complex(other))

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            if len(self) != 1:
                raise ValueError("negative powers are only defined for monomials")
            ((e, c),) = self._terms.items()
            return LaurentPolynomial.monomial([v * k for v in e], c**k)
        result = LaurentPolynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def almost_equal(self, other: "LaurentPolynomial", tol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(e, 0) - other._terms.get(e, 0)) <= tol for e in keys)

    # calculus and evaluation

    def diff(self, j: int) -> "LaurentPolynomial":
        terms = {}
        for e, c in self._terms.items():
            if e[j]:
                d = list(e)
                d[j] -= 1
                terms[tuple(d)] = c * e[j]
        return LaurentPolynomial(self.nvars, terms)

    def __call__(self, z: Sequence[complex]) -> complex:
        return eval_poly(self, z)

    def map_coefficients(self, fn) -> "LaurentPolynomial":
        return LaurentPolynomial(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    def __repr__(self) -> str:
        from .text import format_polynomial

        return f"LaurentPolynomial({format_polynomial(self)!r})"


def eval_poly(f: LaurentPolynomial, z: Sequence[complex]) -> complex:
    """Evaluate term by term in graded-lex order."""
    if len(z) != f.nvars:
        raise DimensionMismatch(f"point has {len(z)} coordinates, polynomial has {f.nvars} variables")
    total = 0j
    for e, c in f.ordered_terms():
        term = c
        for zj, a in zip(z, e):
            if a:
                if a < 0 and zj == 0:
                    raise DivisionByZero("negative exponent at a zero coordinate")
                term *= complex(zj) ** a
        total += term
    return total


def support(f: LaurentPolynomial) -> list[Exponent]:
    return f.support()


class _CompiledSystem:
    """Values and Jacobian of a system from one shared table of monomials."""

    def __init__(self, polys: Sequence[LaurentPolynomial], nvars: int):
        m, n = len(polys), nvars
        derivs = [[p.diff(j) for j in range(n)] for p in polys]
        monos: set[Exponent] = set()
        for p in polys:
            monos.update(p.terms)
        for row in derivs:
            for d in row:
                monos.update(d.terms)
        order = sorted(monos, key=grlex_key)
        index = {e: k for k, e in enumerate(order)}
        K = max(len(order), 1)
        self.exponents = np.array(order, dtype=np.int64).reshape(len(order), n) if order else np.zeros((1, n), np.int64)
        cf = np.zeros((m, K), dtype=complex)
        cj = np.zeros((m * n, K), dtype=complex)
        for i, p in enumerate(polys):
            for e, c in p.terms.items():
                cf[i, index[e]] += c
            for j, d in enumerate(derivs[i]):
                for e, c in d.terms.items():
                    cj[i * n + j, index[e]] += c
        self.cf, self.cj = cf, cj
        self.m, self.n = m, n
        self.negative_columns = np.flatnonzero((self.exponents < 0).any(axis=0))
        self.derivatives = derivs

    def monomials(self, z: np.ndarray) -> np.ndarray:
        if self.negative_columns.size and not z[self.negative_columns].all():
            raise DivisionByZero("negative exponent at a zero coordinate")
        if self.n == 0:
            return np.ones(self.exponents.shape[0], dtype=complex)
        return np.multiply.reduce(z ** self.exponents, axis=1)

    def values(self, z):
        return self.cf @ self.monomials(z)

    def values_and_jacobian(self, z):
        mon = self.monomials(z)
        return self.cf @ mon, (self.cj @ mon).reshape(self.m, self.n)


class LaurentSystem:
    """An ordered tuple of Laurent polynomials sharing one set of variables."""

    def __init__(self, polys: Sequence[LaurentPolynomial], variables: Sequence[str] | None = None,
                 nvars: int | None = None):
        polys = tuple(polys)
        if nvars is None:
            if not polys and variables is None:
                raise DimensionMismatch("cannot infer the number of variables of an empty system")
            nvars = len(variables) if variables is not None else polys[0].nvars
        for p in polys:
            if p.nvars != nvars:
                raise DimensionMismatch("all polynomials must share the same variables")
        if variables is None:
            variables = [f"x{k + 1}" for k in range(nvars)]
        if len(variables) != nvars:
            raise DimensionMismatch("variable names do not match the number of variables")
        self.polys = polys
        self.nvars = nvars
        self.variables = tuple(variables)
        self._compiled: _CompiledSystem | None = None

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    @property
    def is_square(self) -> bool:
        return len(self.polys) == self.nvars

    def degrees(self) -> list[int]:
        return [p.degree() for p in self.polys]

    def supports(self) -> list[list[Exponent]]:
        return [p.support() for p in self.polys]

    def has_negative_exponents(self) -> bool:
        return any(p.has_negative_exponents() for p in self.polys)

    def is_real(self) -> bool:
        return all(p.is_real() for p in self.polys)

    @property
    def compiled(self) -> _CompiledSystem:
        if self._compiled is None:
            self._compiled = _CompiledSystem(self.polys, self.nvars)
        return self._compiled

    def jacobian_polys(self) -> list[list[LaurentPolynomial]]:
        return self.compiled.derivatives

    def _point(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionMismatch(f"point has {z.shape[0]} coordinates, system has {self.nvars} variables")
        return z

    def evaluate(self, z) -> np.ndarray:
        return self.compiled.values(self._point(z))

    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)

    def jacobian(self, z) -> np.ndarray:
        return self.compiled.values_and_jacobian(self._point(z))[1]

    def evaluate_with_jacobian(self, z) -> tuple[np.ndarray, np.ndarray]:
        return self.compiled.values_and_jacobian(self._point(z))

    def map(self, fn) -> "LaurentSystem":
        return LaurentSystem([fn(p) for p in self.polys], self.variables, self.nvars)

    def with_polys(self, polys: Sequence[LaurentPolynomial]) -> "LaurentSystem":
        return LaurentSystem(polys, self.variables, self.nvars)

    def combine(self, matrix) -> "LaurentSystem":
        """Rows of ``matrix`` times the polynomials, as a new system."""
        matrix = np.asarray(matrix, dtype=complex)
        out = []
        for row in matrix:
            acc = LaurentPolynomial(self.nvars)
            for c, p in zip(row, self.polys):
                if c != 0:
                    acc = acc + p * complex(c)
            out.append(acc)
        return self.with_polys(out)

    def __repr__(self):
        return f"LaurentSystem({len(self.polys)} polynomials in {', '.join(self.variables)})"


def eval_jacobian(F: LaurentSystem, z) -> np.ndarray:
    return F.jacobian(z)


def variables(names: Sequence[str]) -> list[LaurentPolynomial]:
    """Coordinate functions for building systems in code."""
    n = len(names)
    return [LaurentPolynomial.variable(i, n) for i in range(n)]
