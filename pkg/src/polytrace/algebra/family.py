"""Systems whose coefficients depend polynomially on parameters."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch
from .polynomial import LaurentPolynomial, LaurentSystem


class ParametricFamily:
    """F(x; p) stored as one system in the variables followed by the parameters."""

    def __init__(self, system: LaurentSystem, nparams: int):
        if nparams > system.nvars:
            raise DimensionMismatch("more parameters than variables")
        self.system = system
        self.nparams = int(nparams)
        self.nvars = system.nvars - self.nparams

    @property
    def variables(self) -> tuple[str, ...]:
        return self.system.variables[: self.nvars]

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.system.variables[self.nvars:]

    def __len__(self):
        return len(self.system)

    def evaluate(self, x, p):
        """Values, Jacobian in x and Jacobian in p at (x, p)."""
        z = np.concatenate([np.asarray(x, complex).ravel(), np.asarray(p, complex).ravel()])
        vals, jac = self.system.evaluate_with_jacobian(z)
        return vals, jac[:, : self.nvars], jac[:, self.nvars:]

    def specialize(self, p) -> LaurentSystem:
        """Substitute parameter values, returning a system in x alone."""
        p = [complex(v) for v in np.asarray(p, complex).ravel()]
        if len(p) != self.nparams:
            raise DimensionMismatch("wrong number of parameter values")
        n = self.nvars
        out = []
        for f in self.system.polys:
            terms: dict = {}
            for e, c in f.terms.items():
                scale = c
                for v, a in zip(p, e[n:]):
                    if a:
                        scale *= v**a
                key = e[:n]
                terms[key] = terms.get(key, 0j) + scale
            out.append(LaurentPolynomial(n, terms))
        return LaurentSystem(out, self.variables, n)

    def randomized(self, matrix) -> "ParametricFamily":
        return ParametricFamily(self.system.combine(matrix), self.nparams)

    @classmethod
    def from_coefficients(cls, supports: Sequence[Sequence[tuple[int, ...]]], variables=None) -> "ParametricFamily":
        """The family sum_a c_{i,a} x^a with one parameter per coefficient.

        Parameters are ordered support by support, in the given order.
        """
        n = len(supports[0][0])
        k = sum(len(s) for s in supports)
        polys, j = [], 0
        for supp in supports:
            terms = {}
            for a in supp:
                e = [0] * k
                e[j] = 1
                terms[tuple(a) + tuple(e)] = 1
                j += 1
            polys.append(LaurentPolynomial(n + k, terms))
        names = list(variables or [f"x{i + 1}" for i in range(n)]) + [f"c{i + 1}" for i in range(k)]
        return cls(LaurentSystem(polys, names, n + k), k)


def coefficient_vector(F: LaurentSystem, supports=None) -> np.ndarray:
    """Coefficients of F listed support by support (graded-lex within each)."""
    supports = supports or F.supports()
    return np.array([F.polys[i].terms.get(tuple(a), 0) for i, s in enumerate(supports) for a in s], dtype=complex)
