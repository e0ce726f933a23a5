"""Total-degree solving, squaring up, Gauss-Newton filtering and
parameter continuation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .algebra import LaurentPolynomial, LaurentSystem, ParametricFamily
from .errors import DimensionMismatch, LaurentUnsupported, NotSquare
from .homotopy import ParameterHomotopy, straight_line
from .rng import complex_normal, stream, unit_phase
from .tracker import PathResult, PathStatus, TrackerOptions, cluster_points, track_all

log = logging.getLogger(__name__)


@dataclass
class SolveResult:
    """Distinct finite solutions plus the raw path data behind them."""

    solutions: list[np.ndarray]
    multiplicities: list[int] = field(default_factory=list)
    paths: list[PathResult] = field(default_factory=list)
    npaths: int = 0
    seed: int = 0
    info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    def real_solutions(self, tol: float = 1e-8) -> list[np.ndarray]:
        return [s for s in self.solutions if np.abs(s.imag).max(initial=0) <= tol * max(1, np.abs(s).max(initial=0))]


def bezout_number(F: LaurentSystem) -> int:
    if not F.is_square:
        raise NotSquare(f"{len(F)} equations in {F.nvars} unknowns")
    if F.has_negative_exponents():
        raise LaurentUnsupported("total degree is undefined for negative exponents")
    return int(np.prod(F.degrees(), dtype=object))


@dataclass
class TotalDegreeStart:
    system: LaurentSystem
    degrees: list[int]
    b0: complex
    b: np.ndarray

    def solutions(self) -> Iterator[np.ndarray]:
        """All prod(d_i) roots of b0·x_i^d_i = b_i, lazily."""
        roots = []
        for d, bi in zip(self.degrees, self.b):
            r = (bi / self.b0) ** (1.0 / d)
            roots.append([r * np.exp(2j * np.pi * k / d) for k in range(d)])
        for combo in itertools.product(*roots):
            yield np.array(combo, dtype=complex)


def _random_modulus_phase(rng, shape=()):
    return rng.uniform(0.5, 2.0, shape) * unit_phase(rng, shape)


def total_degree_start(F: LaurentSystem, seed: int = 0) -> TotalDegreeStart:
    bezout_number(F)
    n = F.nvars
    rng = stream(seed, "total-degree")
    b0 = complex(_random_modulus_phase(rng))
    b = _random_modulus_phase(rng, n)
    degrees = F.degrees()
    if any(d == 0 for d in degrees):
        raise DimensionMismatch("a constant equation has no solutions")
    polys = []
    for i, d in enumerate(degrees):
        e = [0] * n
        e[i] = d
        polys.append(LaurentPolynomial(n, {tuple(e): b0, (0,) * n: -b[i]}))
    return TotalDegreeStart(LaurentSystem(polys, F.variables, n), degrees, b0, b)


def collect_solutions(paths: Sequence[PathResult], tol: float = 1e-6, keep=None):
    """Cluster successful endpoints into distinct solutions."""
    good = [p for p in paths if p.ok and (keep is None or keep(p.endpoint))]
    groups = cluster_points([p.endpoint for p in good], tol)
    sols, mult = [], []
    for g in groups:
        best = min(g, key=lambda i: good[i].residual)
        sols.append(good[best].endpoint)
        mult.append(len(g))
    return sols, mult


def _suspicious(paths: Sequence[PathResult], opts: TrackerOptions) -> int:
    return sum(p.status is PathStatus.STEP_SIZE_COLLAPSE and p.t_reached > opts.singular_t for p in paths)


def total_degree_solve(F: LaurentSystem, opts: TrackerOptions = TrackerOptions(), seed: int = 0,
                       threads: int | None = None, rerolls: int = 1) -> SolveResult:
    """Track the prod(deg f_i) paths of the straight-line total-degree homotopy.

    If a path collapses well before t = 0 the start system is redrawn with a
    fresh sub-seed (at most ``rerolls`` times) and the attempt with fewest
    such failures is kept.
    """
    best = None
    for attempt in range(rerolls + 1):
        sub = seed if attempt == 0 else int(stream(seed, "reroll", attempt).integers(2**62))
        start = total_degree_start(F, sub)
        h = straight_line(start.system, F)
        paths = track_all(h, list(start.solutions()), opts, threads)
        bad = _suspicious(paths, opts)
        if best is None or bad < best[0]:
            best = (bad, paths, sub)
        if bad == 0:
            break
        log.warning("total-degree attempt %d: %d paths collapsed mid-path, resampling", attempt, bad)
    bad, paths, sub = best
    sols, mult = collect_solutions(paths)
    return SolveResult(sols, mult, paths, len(paths), sub, {"suspicious": bad})


def square_up(F: LaurentSystem, seed: int = 0, k: int | None = None) -> tuple[LaurentSystem, np.ndarray]:
    """Replace m > n equations by n random complex combinations M·F."""
    k = F.nvars if k is None else k
    if len(F) < k:
        raise DimensionMismatch("cannot square up an underdetermined system")
    M = complex_normal(stream(seed, "square-up"), (k, len(F)))
    return F.combine(M), M


def evaluation_scale(F: LaurentSystem, x) -> float:
    """max(1, |(|F|)(|x|)|): the size of the terms summed when evaluating F
    at x, where |F| has the absolute values of F's coefficients."""
    absF = F.map(lambda p: p.map_coefficients(abs))
    return max(1.0, float(np.linalg.norm(absF.evaluate(np.abs(np.asarray(x, complex))))))


def gauss_newton_refine(F, x0, max_iters: int = 12, floor: float = 1e-10):
    """Least-squares Newton.  Returns (x, quadratic, residual).

    ``quadratic`` is true when the step norm fell below ``floor`` (relative to
    max(1, |x|)) with each earlier step at most a quarter of its predecessor.
    """
    x = np.array(x0, dtype=complex)
    prev, quad = np.inf, False
    try:
        for _ in range(max_iters):
            v, J = F.evaluate_with_jacobian(x)
            dx = np.linalg.lstsq(J, -v, rcond=None)[0]
            size = float(np.linalg.norm(dx))
            if not np.isfinite(size):
                break
            x = x + dx
            if size <= floor * max(1.0, float(np.linalg.norm(x))):
                quad = True
                break
            if size > 0.25 * prev:
                break
            prev = size
        residual = float(np.linalg.norm(F.evaluate(x)))
    except Exception:  # evaluation at a pole or overflow
        return x, False, float("inf")
    return x, quad, residual


def gauss_newton_filter(F, points: Sequence, tol: float = 1e-8, max_move: float = 1e-6) -> list[np.ndarray]:
    """Keep points where Gauss-Newton on F converges quadratically to a
    residual of at most ``tol`` times the evaluation scale; refined points
    are returned.

    The scale is 1 for points of moderate size and grows with the terms of F
    at x, so far-out zeros of high-degree equations are not lost to rounding.
    A candidate must also already sit on the zero it converges to: one that
    drifts more than ``max_move`` (relative to max(1, |x|)) merely lies in
    the basin of some other zero and is dropped.
    """
    kept = []
    for p in points:
        p = np.asarray(p, complex)
        x, quad, res = gauss_newton_refine(F, p)
        if not (quad and np.all(np.isfinite(x)) and res <= tol * evaluation_scale(F, x)):
            continue
        if np.linalg.norm(x - p) <= max_move * max(1.0, float(np.linalg.norm(x))):
            kept.append(x)
    return kept


def detour_point(p_start, p_end, seed: int = 0) -> np.ndarray:
    p_start, p_end = np.asarray(p_start, complex), np.asarray(p_end, complex)
    rng = stream(seed, "detour")
    radius = 0.5 * max(float(np.linalg.norm(p_end - p_start)), 1e-3)
    direction = complex_normal(rng, p_start.shape)
    direction /= np.linalg.norm(direction)
    return 0.5 * (p_start + p_end) + radius * direction


def _track_segments(family, waypoints, points, opts, threads, randomizer=None):
    current = [np.asarray(p, complex) for p in points]
    alive = list(range(len(current)))
    paths: list[PathResult | None] = [None] * len(current)
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        h = ParameterHomotopy(family, a, b, randomizer)
        res = track_all(h, [current[i] for i in alive], opts, threads)
        nxt = []
        for i, r in zip(alive, res):
            paths[i] = r
            if r.ok:
                current[i] = r.endpoint
                nxt.append(i)
        alive = nxt
    return paths, alive, current


def parameter_solve(family: ParametricFamily, p_start, solutions: Sequence, p_target,
                    opts: TrackerOptions = TrackerOptions(), seed: int = 0, threads: int | None = None,
                    randomizer=None) -> SolveResult:
    """Continue solutions of F(x; p_start) to F(x; p_target).

    The path passes through a random complex intermediate parameter value so
    that it avoids the real discriminant locus.
    """
    mid = detour_point(p_start, p_target, seed)
    paths, alive, current = _track_segments(family, [p_start, mid, p_target], solutions, opts, threads, randomizer)
    final = [paths[i] for i in range(len(paths))]
    sols, mult = collect_solutions([final[i] for i in alive])
    return SolveResult(sols, mult, final, len(solutions), seed, {"detour": mid})
