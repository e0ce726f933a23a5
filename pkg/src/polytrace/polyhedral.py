"""Mixed volumes, mixed cells and the polyhedral homotopy.

Given supports A_1..A_n in Z^n and integer lifts w_i, a mixed cell is a
choice of one edge {a_i, b_i} per support together with a primitive normal
(alpha, r), r > 0, such that <alpha, a> + r*w_i(a) is minimized over A_i
exactly on the chosen edge.  Its volume |det(a_i - b_i)| counts the roots of
the binomial start system it defines, and the volumes sum to the mixed
volume.

Cells are found by depth-first search over edge tuples.  Partial tuples are
pruned with a floating-point LP feasibility test (never rejects a true cell);
every leaf is re-checked in exact integer arithmetic.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .algebra import LaurentPolynomial, LaurentSystem, ParametricFamily, integer_det, smith_normal_form
from .algebra.family import coefficient_vector
from .errors import DimensionMismatch, GenericityExhausted, NonGenericLifting, NotSquare
from .rng import complex_normal, stream
from .solve import SolveResult, collect_solutions, parameter_solve
from .tracker import TrackerOptions, track_all

log = logging.getLogger(__name__)

DEFAULT_LIFT_BOUND = 32
MAX_LIFT_ATTEMPTS = 20


@dataclass(frozen=True)
class MixedCell:
    edges: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # one exponent pair per support
    normal: tuple[int, ...]  # primitive (alpha, r)
    beta: tuple[int, ...]  # minimal lifted inner product per support
    volume: int

    @property
    def alpha(self) -> tuple[int, ...]:
        return self.normal[:-1]

    @property
    def r(self) -> int:
        return self.normal[-1]

    def exponent_matrix(self) -> list[list[int]]:
        return [[p - q for p, q in zip(b, a)] for a, b in self.edges]


def _as_supports(supports) -> list[list[tuple[int, ...]]]:
    out = [list(dict.fromkeys(tuple(int(v) for v in a) for a in s)) for s in supports]
    n = len(out)
    for s in out:
        if not s:
            raise DimensionMismatch("empty support")
        if any(len(a) != n for a in s):
            raise NotSquare("need n supports in n variables")
    return out


def random_lifting(supports, bound: int = DEFAULT_LIFT_BOUND, seed: int = 0) -> list[list[int]]:
    rng = stream(seed, "lifting")
    return [[int(v) for v in rng.integers(0, bound + 1, len(s))] for s in supports]


def _primitive_kernel(M: list[list[int]]) -> tuple[int, ...] | None:
    """Integer kernel vector of an n x (n+1) matrix via signed maximal minors."""
    n = len(M)
    v = []
    for j in range(n + 1):
        minor = [row[:j] + row[j + 1:] for row in M]
        v.append((-1) ** j * integer_det(minor))
    g = 0
    for c in v:
        g = math.gcd(g, c)
    if g == 0:
        return None
    return tuple(c // g for c in v)


class _CellSearch:
    def __init__(self, supports, lifting):
        self.supports = supports
        self.n = len(supports)
        self.lifted = [np.array([list(a) + [w] for a, w in zip(s, lift)], dtype=float)
                       for s, lift in zip(supports, lifting)]
        self.lifting = [list(map(int, lift)) for lift in lifting]

    def _feasible(self, chosen) -> bool:
        n = self.n
        A_eq, A_ub = [], []
        for i, (p, q) in enumerate(chosen):
            L = self.lifted[i]
            A_eq.append(L[q] - L[p])
            for k in range(len(L)):
                if k != p and k != q:
                    A_ub.append(-(L[k] - L[p]))
        bounds = [(None, None)] * n + [(1, None)]
        res = linprog(np.zeros(n + 1), A_ub=np.array(A_ub) if A_ub else None,
                      b_ub=np.full(len(A_ub), 1e-9) if A_ub else None,
                      A_eq=np.array(A_eq), b_eq=np.zeros(len(A_eq)), bounds=bounds, method="highs")
        return res.status == 0

    def _lower_edges(self, i):
        edges = []
        for p, q in itertools.combinations(range(len(self.supports[i])), 2):
            if self._feasible_single(i, p, q):
                edges.append((p, q))
        return edges

    def _feasible_single(self, i, p, q) -> bool:
        L = self.lifted[i]
        n = self.n
        A_ub = [-(L[k] - L[p]) for k in range(len(L)) if k not in (p, q)]
        res = linprog(np.zeros(n + 1), A_ub=np.array(A_ub) if A_ub else None,
                      b_ub=np.full(len(A_ub), 1e-9) if A_ub else None,
                      A_eq=np.array([L[q] - L[p]]), b_eq=[0.0],
                      bounds=[(None, None)] * n + [(1, None)], method="highs")
        return res.status == 0

    def _exact_cell(self, chosen) -> MixedCell | None:
        rows = []
        for i, (p, q) in enumerate(chosen):
            a, b = self.supports[i][p], self.supports[i][q]
            rows.append([y - x for x, y in zip(a, b)] + [self.lifting[i][q] - self.lifting[i][p]])
        v = _primitive_kernel(rows)
        if v is None or v[-1] == 0:
            return None
        if v[-1] < 0:
            v = tuple(-c for c in v)
        alpha, r = v[:-1], v[-1]
        betas = []
        for i, (p, q) in enumerate(chosen):
            vals = [sum(x * y for x, y in zip(alpha, a)) + r * w
                    for a, w in zip(self.supports[i], self.lifting[i])]
            m = min(vals)
            if vals[p] != m or vals[q] != m:
                return None
            if sum(1 for x in vals if x == m) > 2:
                raise NonGenericLifting(f"lifted support {i} has three points on the face with normal {v}")
            betas.append(m)
        edges = tuple((self.supports[i][p], self.supports[i][q]) for i, (p, q) in enumerate(chosen))
        vol = abs(integer_det([row[:-1] for row in rows]))
        return MixedCell(edges, v, tuple(betas), vol)

    def run(self) -> list[MixedCell]:
        candidates = [self._lower_edges(i) for i in range(self.n)]
        cells: list[MixedCell] = []

        def rank_ok(chosen):
            D = np.array([self.lifted[i][q][:-1] - self.lifted[i][p][:-1] for i, (p, q) in enumerate(chosen)])
            return np.linalg.matrix_rank(D) == len(chosen)

        def dfs(chosen):
            i = len(chosen)
            if i == self.n:
                cell = self._exact_cell(chosen)
                if cell is not None:
                    cells.append(cell)
                return
            for e in candidates[i]:
                nxt = chosen + [e]
                if not rank_ok(nxt):
                    continue
                if i == 0 or self._feasible(nxt):
                    dfs(nxt)

        dfs([])
        return cells


def mixed_cells(supports, lifting) -> list[MixedCell]:
    """All mixed cells of the lifted supports.

    Raises NonGenericLifting when the lift puts three points of one support on
    a lower face that is otherwise a candidate cell.
    """
    supports = _as_supports(supports)
    if len(lifting) != len(supports) or any(len(w) != len(s) for w, s in zip(lifting, supports)):
        raise DimensionMismatch("lifting does not match the supports")
    return _CellSearch(supports, lifting).run()


def mixed_cells_generic(supports, seed: int = 0, bound: int = DEFAULT_LIFT_BOUND,
                        attempts: int = MAX_LIFT_ATTEMPTS):
    """Mixed cells for a random lifting, resampled until it is generic.

    Each failed attempt quadruples the lift range: small ranges keep the
    cell homotopies' powers of s low, but many identical supports need a
    wide range before ties become unlikely.
    """
    supports = _as_supports(supports)
    for k in range(attempts):
        lifting = random_lifting(supports, bound, seed=int(stream(seed, "lift-attempt", k).integers(2**62)))
        try:
            return mixed_cells(supports, lifting), lifting
        except NonGenericLifting:
            log.info("lifting attempt %d with bound %d was not generic", k, bound)
            bound *= 4
    raise GenericityExhausted(f"no generic lifting found in {attempts} attempts")


def mixed_volume(supports, seed: int = 0, bound: int = DEFAULT_LIFT_BOUND) -> int:
    supports = _as_supports(supports)
    if len(supports) == 1:
        xs = [a[0] for a in supports[0]]
        return max(xs) - min(xs)
    cells, _ = mixed_cells_generic(supports, seed, bound)
    return sum(c.volume for c in cells)


def binomial_solve(A: Sequence[Sequence[int]], b: Sequence[complex]) -> list[np.ndarray]:
    """All |det A| solutions in the torus of y^{A_i} = b_i (rows of A are
    exponent vectors), via the Smith form X A Y = D."""
    n = len(A)
    b = np.asarray(b, dtype=complex)
    if np.any(b == 0):
        raise DimensionMismatch("binomial right-hand sides must be nonzero")
    X, D, Y = smith_normal_form(A)
    c = [np.prod([b[i] ** X[k][i] for i in range(n)]) for k in range(n)]
    roots = []
    for k in range(n):
        d = D[k][k]
        base = c[k] ** (1.0 / d)
        roots.append([base * np.exp(2j * np.pi * j / d) for j in range(d)])
    sols = []
    for z in itertools.product(*roots):
        sols.append(np.array([np.prod([z[k] ** Y[j][k] for k in range(n)]) for j in range(n)]))
    return sols


def _binomial_system(cell: MixedCell, coeffs: list[dict]):
    """Exponent rows b - a and right-hand sides -c_a / c_b for the cell."""
    A, rhs = [], []
    for i, (a, b) in enumerate(cell.edges):
        A.append([y - x for x, y in zip(a, b)])
        rhs.append(-coeffs[i][a] / coeffs[i][b])
    return A, rhs


def cell_start_solutions(cell: MixedCell, G: LaurentSystem) -> list[np.ndarray]:
    """Roots of the binomial system of ``cell``, Newton-polished."""
    coeffs = [dict(p.terms) for p in G.polys]
    A, rhs = _binomial_system(cell, coeffs)
    sols = binomial_solve(A, rhs)
    n = len(A)
    Ai = np.array(A, dtype=float)
    rhs = np.asarray(rhs)
    polished = []
    for y in sols:
        for _ in range(3):
            mono = np.array([np.prod(y ** Ai[i]) for i in range(n)])
            F = mono - rhs
            J = mono[:, None] * Ai / y[None, :]
            try:
                y = y - np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                break
        polished.append(y)
    return polished


class CellHomotopy:
    """H(y, t) = sum c_a y^a s^(e_a) with s = 1 - t and
    e_a = <alpha, a> + r*w(a) - beta_i >= 0, zero exactly on the cell edge."""

    def __init__(self, G: LaurentSystem, cell: MixedCell, lifting_map: list[dict]):
        n = G.nvars
        alpha, r = cell.alpha, cell.r
        polys = []
        for i, p in enumerate(G.polys):
            terms = {}
            for a, c in p.terms.items():
                e = sum(x * y for x, y in zip(alpha, a)) + r * lifting_map[i][a] - cell.beta[i]
                terms[a + (e,)] = c
            polys.append(LaurentPolynomial(n + 1, terms))
        self.system = LaurentSystem(polys, list(G.variables) + ["s"], n + 1)
        self.nvars = n

    def evaluate(self, y, t):
        z = np.empty(self.nvars + 1, dtype=complex)
        z[:-1] = y
        z[-1] = 1.0 - t
        v, J = self.system.compiled.values_and_jacobian(z)
        return v, J[:, :-1], -J[:, -1]


def _random_coefficient_system(F: LaurentSystem, supports, seed: int) -> LaurentSystem:
    rng = stream(seed, "polyhedral-coefficients")
    polys = []
    for s in supports:
        polys.append(LaurentPolynomial(F.nvars, dict(zip(s, complex_normal(rng, len(s))))))
    return LaurentSystem(polys, F.variables, F.nvars)


@dataclass
class PolyhedralStart:
    system: LaurentSystem
    cells: list[MixedCell]
    lifting: list[list[int]]
    supports: list[list[tuple[int, ...]]]
    mixed_volume: int = field(init=False)

    def __post_init__(self):
        self.mixed_volume = sum(c.volume for c in self.cells)


def polyhedral_start(F: LaurentSystem, seed: int = 0, bound: int = DEFAULT_LIFT_BOUND) -> PolyhedralStart:
    if not F.is_square:
        raise NotSquare(f"{len(F)} equations in {F.nvars} unknowns")
    supports = _as_supports(F.supports())
    cells, lifting = mixed_cells_generic(supports, seed, bound)
    G = _random_coefficient_system(F, supports, seed)
    return PolyhedralStart(G, cells, lifting, supports)


def solve_random_system(start: PolyhedralStart, opts: TrackerOptions, threads=None):
    """Phase one: track every cell homotopy to the random-coefficient system."""
    lift_maps = [dict(zip(s, w)) for s, w in zip(start.supports, start.lifting)]
    paths = []
    for cell in start.cells:
        h = CellHomotopy(start.system, cell, lift_maps)
        paths.extend(track_all(h, cell_start_solutions(cell, start.system), opts, threads))
    return paths


def polyhedral_solve(F: LaurentSystem, opts: TrackerOptions = TrackerOptions(), seed: int = 0,
                     threads: int | None = None, bound: int = DEFAULT_LIFT_BOUND) -> SolveResult:
    """Solve F with one path per unit of mixed volume.

    Phase one solves a system G with F's supports and random complex
    coefficients; phase two continues those roots along the coefficient
    segment from G to F.  For systems with negative exponents, endpoints with
    a vanishing coordinate are discarded since they leave the torus.
    """
    start = polyhedral_start(F, seed, bound)
    paths1 = solve_random_system(start, opts, threads)
    g_sols, _ = collect_solutions(paths1)
    supports = start.supports
    family = ParametricFamily.from_coefficients(supports, F.variables)
    c_start = coefficient_vector(start.system, supports)
    c_target = coefficient_vector(F, supports)
    result = parameter_solve(family, c_start, g_sols, c_target, opts, seed, threads)
    if F.has_negative_exponents():
        keep = [s for s in result.solutions if np.abs(s).min() > 1e-8 * max(1.0, np.abs(s).max())]
        mult = [m for s, m in zip(result.solutions, result.multiplicities)
                if np.abs(s).min() > 1e-8 * max(1.0, np.abs(s).max())]
        result.solutions, result.multiplicities = keep, mult
    result.npaths = start.mixed_volume
    result.info.update(mixed_volume=start.mixed_volume, cells=len(start.cells),
                       phase_one_paths=paths1, phase_one_solutions=len(g_sols))
    return result
