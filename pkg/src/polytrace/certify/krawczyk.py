"""Krawczyk-operator certification of approximate zeros."""

from __future__ import annotations

import math
import itertools
from typing import Sequence

import numpy as np

from ..algebra import LaurentSystem
from ..errors import DivisionByZero, NotSquare
from .certificate import Certificate, Method
from .interval import (
    Box,
    ComplexInterval,
    Interval,
    box_around,
    eval_jacobian_interval,
    eval_system_interval,
    inf_norm_upper,
    matvec,
    point_box,
    point_times_interval_matrix,
)

INFLATION = 4.0
ROUNDS = 10


def krawczyk_operator(F: LaurentSystem, x: np.ndarray, Y: np.ndarray, box: Box):
    """K = x - Y·F(x) + (I - Y·JF(box))·(box - x), plus the middle matrix."""
    n = len(x)
    fx = eval_system_interval(F, point_box(x))
    yfx = matvec(Y, fx)
    YJ = point_times_interval_matrix(Y, eval_jacobian_interval(F, box))
    M = [[(ComplexInterval.point(1.0 if i == j else 0.0) - YJ[i][j]) for j in range(n)] for i in range(n)]
    shifted = [b - complex(xi) for b, xi in zip(box, x)]
    corr = matvec(M, shifted)
    K = [ComplexInterval.point(complex(xi)) - a + c for xi, a, c in zip(x, yfx, corr)]
    return K, M


def krawczyk_certify(F: LaurentSystem, x, rounds: int = ROUNDS, inflation: float = INFLATION) -> Certificate:
    """Try boxes around x of growing radius until K(I) lies inside I.

    Never raises on failure: an uncertifiable point yields a certificate
    with ``certified`` false.
    """
    if not F.is_square:
        raise NotSquare("Krawczyk certification needs a square system")
    x = np.asarray(x, dtype=complex).ravel()
    cert = Certificate(Method.KRAWCZYK, x)
    try:
        v, J = F.evaluate_with_jacobian(x)
        Y = np.linalg.inv(J)
    except (np.linalg.LinAlgError, DivisionByZero):
        return cert
    if not np.all(np.isfinite(Y)):
        return cert
    step = float(np.linalg.norm(Y @ v))
    r = max(8.0 * step, 1e-12)
    for k in range(1, rounds + 1):
        box = box_around(x, r)
        try:
            K, M = krawczyk_operator(F, x, Y, box)
        except (ZeroDivisionError, OverflowError, ValueError):
            r *= inflation
            continue
        cert.rounds = k
        if all(b.interior_contains(kk) for b, kk in zip(box, K)):
            cert.box = box
            cert.certified = True
            cert.radius = r
            cert.contraction = inf_norm_upper(M)
            cert.unique = math.sqrt(2.0) * cert.contraction < 1.0
            if F.is_real():
                cert.real = all(kk.conj() in b for kk, b in zip(K, box))
            return cert
        r *= inflation
    return cert


def boxes_disjoint(a: Box, b: Box) -> bool:
    def apart(I: Interval, J: Interval) -> bool:
        return I.hi < J.lo or J.hi < I.lo

    return any(apart(p.re, q.re) or apart(p.im, q.im) for p, q in zip(a, b))


def certify_krawczyk(F: LaurentSystem, points: Sequence) -> list[Certificate]:
    """Certify each point; certified unique boxes that do not meet are
    recorded as mutually distinct."""
    certs = [krawczyk_certify(F, p) for p in points]
    for (i, a), (j, b) in itertools.combinations(enumerate(certs), 2):
        if a.certified and b.certified and a.unique and b.unique and boxes_disjoint(a.box, b.box):
            a.distinct_from.append(j)
            b.distinct_from.append(i)
    return certs
