"""Smale's alpha test in floating point.

gamma is bounded above by the coefficient mass of the Taylor expansion:
for every order k >= 2 the sum of absolute entries of JF(x)^{-1} times the
order-k Taylor coefficients of F at x, raised to 1/(k-1).  The bound is exact
for univariate polynomials.  Computations are in binary64, so the verdicts
are floating-point certificates, not rigorous ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..algebra import LaurentSystem
from ..errors import LaurentUnsupported, NotSquare, SingularMatrix
from .certificate import Certificate, Method

ALPHA_THRESHOLD = (13 - 3 * math.sqrt(17)) / 4


@dataclass(frozen=True)
class AlphaData:
    beta: float
    gamma_upper: float
    alpha_upper: float


def isolation_radius(gamma: float) -> float:
    """Radius within which a second approximate zero shares the same root."""
    return 1.0 / (20.0 * gamma) if gamma > 0 else math.inf


def taylor_coefficients(F: LaurentSystem, x) -> dict[int, tuple[list, np.ndarray]]:
    """Order-k Taylor coefficients of F at x, k >= 2.

    Returns {k: (multi-indices, matrix)} where the matrix has one row per
    equation and one column per multi-index m with |m| = k.
    """
    x = np.asarray(x, dtype=complex)
    acc: dict[int, dict[tuple, np.ndarray]] = {}
    m_eq = len(F)
    for i, f in enumerate(F.polys):
        for a, c in f.terms.items():
            for mvec in itertools.product(*(range(aj + 1) for aj in a)):
                k = sum(mvec)
                if k < 2:
                    continue
                coef = c
                for aj, mj, xj in zip(a, mvec, x):
                    coef *= math.comb(aj, mj) * xj ** (aj - mj)
                row = acc.setdefault(k, {}).setdefault(mvec, np.zeros(m_eq, dtype=complex))
                row[i] += coef
    out = {}
    for k, cols in acc.items():
        keys = sorted(cols)
        out[k] = (keys, np.column_stack([cols[m] for m in keys]))
    return out


def alpha_data(F: LaurentSystem, x) -> AlphaData:
    """beta, an upper bound for gamma, and their product at x."""
    if not F.is_square:
        raise NotSquare("alpha theory needs a square system")
    if F.has_negative_exponents():
        raise LaurentUnsupported("gamma bound needs a polynomial system")
    x = np.asarray(x, dtype=complex).ravel()
    v, J = F.evaluate_with_jacobian(x)
    try:
        Jinv = np.linalg.inv(J)
    except np.linalg.LinAlgError:
        raise SingularMatrix("Jacobian is singular at the point") from None
    if not np.all(np.isfinite(Jinv)) or np.linalg.cond(J) > 1e15:
        raise SingularMatrix("Jacobian is numerically singular at the point")
    beta = float(np.linalg.norm(Jinv @ v))
    gamma = 0.0
    for k, (_, C) in taylor_coefficients(F, x).items():
        mass = float(np.abs(Jinv @ C).sum())
        if mass > 0:
            gamma = max(gamma, mass ** (1.0 / (k - 1)))
    return AlphaData(beta, gamma, beta * gamma)


def alpha_certify(F: LaurentSystem, x) -> Certificate:
    x = np.asarray(x, dtype=complex).ravel()
    cert = Certificate(Method.ALPHA, x)
    try:
        d = alpha_data(F, x)
    except SingularMatrix:
        return cert
    cert.beta, cert.gamma, cert.alpha = d.beta, d.gamma_upper, d.alpha_upper
    cert.certified = d.alpha_upper < ALPHA_THRESHOLD
    if cert.certified:
        cert.radius = 2 * d.beta
        if F.is_real():
            cert.real = float(np.linalg.norm(x - x.conj())) < isolation_radius(d.gamma_upper)
    return cert


def distinct(c1: Certificate, c2: Certificate) -> bool:
    """Both certified and their associated zeros differ."""
    if not (c1.certified and c2.certified):
        return False
    return float(np.linalg.norm(c1.point - c2.point)) > 2 * c1.beta + 2 * c2.beta


def same_root(c1: Certificate, x2) -> bool:
    """x2 is an approximate zero with the same associated zero as c1."""
    if not c1.certified:
        return False
    return float(np.linalg.norm(c1.point - np.asarray(x2, complex))) < isolation_radius(c1.gamma)


def certify_alpha(F: LaurentSystem, points: Sequence) -> list[Certificate]:
    certs = [alpha_certify(F, p) for p in points]
    for (i, a), (j, b) in itertools.combinations(enumerate(certs), 2):
        if distinct(a, b):
            a.distinct_from.append(j)
            b.distinct_from.append(i)
    return certs


def all_distinct(certs: Sequence[Certificate]) -> bool:
    return all(len(c.distinct_from) == len(certs) - 1 for c in certs)
