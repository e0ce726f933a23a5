"""Exact integer lattice routines: Smith normal form and determinants."""

from __future__ import annotations

from typing import Sequence

from ..errors import DimensionMismatch, SingularLattice

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(len(B[0]))] for row in A]


def integer_det(A: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) elimination."""
    M = [[int(v) for v in row] for row in A]
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionMismatch("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular X, Y and diagonal D with X·A·Y = D.

    Diagonal entries are positive and each divides the next.  The pivot at
    every stage is an entry of smallest nonzero magnitude in the remaining
    block.  Raises SingularLattice when det A = 0.
    """
    D = [[int(v) for v in row] for row in A]
    n = len(D)
    if any(len(row) != n for row in D):
        raise DimensionMismatch("Smith normal form is implemented for square matrices")
    X, Y = identity(n), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        X[i], X[j] = X[j], X[i]

    def swap_cols(i, j):
        for M in (D, Y):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        for M in (D, X):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):
        for M in (D, Y):
            for row in M:
                row[dst] += q * row[src]

    for t in range(n):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, n) for j in range(t, n) if D[i][j]]
            if not nz:
                raise SingularLattice("matrix has determinant zero")
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            dirty = False
            for i in range(t + 1, n):
                q = D[i][t] // p
                if q:
                    add_row(i, t, -q)
                dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(j, t, -q)
                dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            for M in (D, X):
                M[t] = [-v for v in M[t]]
    return X, D, Y
