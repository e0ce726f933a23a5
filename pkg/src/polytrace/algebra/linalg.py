"""Dense complex LU with partial pivoting.

Factorization is delegated to LAPACK (zgetrf/zgetrs via scipy); this module
adds the singularity rule used throughout the package.  Rows are first scaled
to unit absolute row sum, so the rule does not depend on how individual
equations are normalized; a pivot of the scaled matrix then counts as zero
when it falls below PIVOT_THRESHOLD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from ..errors import DimensionMismatch, SingularMatrix

PIVOT_THRESHOLD = 1e-14


@dataclass
class LUFactorization:
    lu: np.ndarray
    piv: np.ndarray
    deficiency: int  # pivots below threshold, an estimate of rank deficiency
    row_scale: np.ndarray | None = None

    def solve(self, b) -> np.ndarray:
        if self.deficiency:
            raise SingularMatrix(f"matrix is numerically singular (deficiency {self.deficiency})")
        b = np.asarray(b, dtype=complex)
        if self.row_scale is not None:
            b = (b.T / self.row_scale).T
        x, info = lapack.zgetrs(self.lu, self.piv, b)
        if info:
            raise SingularMatrix("triangular solve failed")
        return x


def lu_factor(A, threshold: float = PIVOT_THRESHOLD) -> LUFactorization:
    a = np.asarray(A, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return LUFactorization(a, np.zeros(0, np.int32), 0)
    rows = np.abs(a).sum(axis=1)
    if not np.all(np.isfinite(rows)):
        raise SingularMatrix("matrix has non-finite entries")
    zero = rows == 0
    rows[zero] = 1.0
    lu, piv, info = lapack.zgetrf(a / rows[:, None])
    if info < 0:
        raise SingularMatrix("LU factorization failed")
    deficiency = int(np.count_nonzero(np.abs(lu.diagonal()) <= threshold))
    return LUFactorization(lu, piv, max(deficiency, int(zero.sum())), rows)


def lu_solve(A, b, threshold: float = PIVOT_THRESHOLD) -> np.ndarray:
    fac = lu_factor(A, threshold)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != fac.lu.shape[0]:
        raise DimensionMismatch("right-hand side has the wrong length")
    if fac.lu.shape[0] == 0:
        return b.copy()
    return fac.solve(b)
