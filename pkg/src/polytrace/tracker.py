"""Predictor-corrector path tracking.

Paths run from t = 1 to t = 0 with an Euler predictor, a Newton corrector
and step halving on failure.  A final Newton polish at t = 0 decides between
a regular endpoint (Success) and a singular one.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .algebra import lu_solve
from .errors import DivisionByZero, SingularMatrix


class PathStatus(str, enum.Enum):
    SUCCESS = "Success"
    DIVERGED = "Diverged"
    STEP_SIZE_COLLAPSE = "StepSizeCollapse"
    SINGULAR_END = "SingularEnd"


@dataclass(frozen=True)
class TrackerOptions:
    corrector_tolerance: float = 1e-10
    max_corrector_iters: int = 3
    initial_step: float = 0.05
    min_step: float = 1e-14
    step_growth: float = 1.25
    divergence_norm: float = 1e14
    t_end_epsilon: float = 1e-14
    residual_tolerance: float = 1e-8
    singular_t: float = 1e-6
    max_steps: int = 20000
    growth_streak: int = 3
    escape_norm: float = 1e8
    # growth-rate divergence test near t = 0
    tail_t: float = 1e-3
    far_norm: float = 1e4
    tail_slope: float = -1.0 / 16
    tail_checks: int = 5


@dataclass(frozen=True)
class PathResult:
    start: np.ndarray
    endpoint: np.ndarray
    t_reached: float
    status: PathStatus
    steps: int = 0
    rejected: int = 0
    residual: float = float("inf")
    condition: float = float("inf")
    winding_hint: int = 1

    @property
    def ok(self) -> bool:
        return self.status is PathStatus.SUCCESS


def norm(v) -> float:
    return math.sqrt(np.vdot(v, v).real)


def _scale(x) -> float:
    return max(1.0, norm(x))


def newton_correct(func: Callable, x0, opts: TrackerOptions = TrackerOptions()):
    """Newton iteration x <- x - J⁻¹F with func(x) = (F, J).

    Returns (x, converged, iterations).  Convergence means a step of norm at
    most corrector_tolerance (relative to max(1, |x|)) was reached while every
    step shrank to at most half of the previous one.
    """
    x = np.array(x0, dtype=complex)
    prev = np.inf
    for k in range(1, opts.max_corrector_iters + 1):
        F, J = func(x)
        dx = lu_solve(J, -F)
        x = x + dx
        size = norm(dx)
        if not np.isfinite(size) or size > 0.5 * prev:
            return x, False, k
        if size <= opts.corrector_tolerance * _scale(x):
            return x, True, k
        prev = size
    return x, False, opts.max_corrector_iters


def euler_predict(h, x, t: float, t_next: float):
    _, Hx, Ht = h.evaluate(x, t)
    return x + (t_next - t) * lu_solve(Hx, -Ht)


def polish(func: Callable, x0, max_iters: int = 10, contraction: float = 0.25, floor: float = 1e-11):
    """Newton to the noise floor; only quadratic-looking convergence passes.

    Returns (x, converged).  A double root converges linearly with ratio 1/2
    and is rejected by the contraction requirement.
    """
    x = np.array(x0, dtype=complex)
    prev = np.inf
    for _ in range(max_iters):
        try:
            F, J = func(x)
            dx = lu_solve(J, -F)
        except (SingularMatrix, DivisionByZero):
            return x, False
        size = norm(dx)
        if not np.isfinite(size):
            return x, False
        x = x + dx
        if size <= floor * _scale(x):
            return x, True
        if size > contraction * prev:
            return x, False
        prev = size
    return x, False


def _condition(J) -> float:
    try:
        return float(np.linalg.cond(J))
    except np.linalg.LinAlgError:
        return float("inf")


def _correct(h, x, t: float, opts: TrackerOptions):
    """Newton at fixed t; also returns the last (Hx, Ht) for reuse by the
    next predictor."""
    prev = np.inf
    for _ in range(opts.max_corrector_iters):
        H, Hx, Ht = h.evaluate(x, t)
        dx = lu_solve(Hx, -H)
        x = x + dx
        size = norm(dx)
        if not size <= 0.5 * prev:
            return x, False, None
        if size <= opts.corrector_tolerance * _scale(x):
            return x, True, (Hx, Ht)
        prev = size
    return x, False, None


def track_path(h, start, opts: TrackerOptions = TrackerOptions()) -> PathResult:
    x = np.array(start, dtype=complex).ravel()
    start = x.copy()
    t = 1.0
    dt = opts.initial_step
    steps = rejected = streak = 0
    status = None
    cached = None  # derivatives at the current point, from the corrector
    tail = 0

    while t > opts.t_end_epsilon:
        if steps + rejected >= opts.max_steps:
            status = PathStatus.STEP_SIZE_COLLAPSE
            break
        t1 = t - min(dt, t)
        if t1 < opts.t_end_epsilon:
            t1 = 0.0
        try:
            if cached is None:
                _, Hx, Ht = h.evaluate(x, t)
                cached = (Hx, Ht)
            Hx, Ht = cached
            tangent = lu_solve(Hx, -Ht)
            xp = x + (t1 - t) * tangent
            xc, ok, derivs = _correct(h, xp, t1, opts)
            ok = ok and bool(np.all(np.isfinite(xc)))
        except (SingularMatrix, DivisionByZero, FloatingPointError):
            ok = False
        if ok:
            x, t, cached = xc, t1, derivs
            steps += 1
            streak += 1
            if streak >= opts.growth_streak:
                dt = min(dt * opts.step_growth, opts.initial_step)
                streak = 0
            size = norm(x)
            if size >= opts.divergence_norm or (t <= opts.singular_t and size >= opts.escape_norm):
                status = PathStatus.DIVERGED
                break
            if t <= opts.tail_t and size >= opts.far_norm:
                # d log|x| / d log t, from the tangent used for this step
                slope = t * float(np.real(np.vdot(x, tangent))) / (size * size)
                tail = tail + 1 if slope <= opts.tail_slope else 0
                if tail >= opts.tail_checks:
                    status = PathStatus.DIVERGED
                    break
            else:
                tail = 0
        else:
            rejected += 1
            streak = 0
            dt *= 0.5
            if dt < opts.min_step:
                status = PathStatus.STEP_SIZE_COLLAPSE
                break

    residual, cond = float("inf"), float("inf")
    if status is None:
        func = lambda z: h.evaluate(z, 0.0)[:2]  # noqa: E731
        x, ok = polish(func, x)
        try:
            F, J = func(x)
            residual = norm(F)
            cond = _condition(J)
        except DivisionByZero:
            ok = False
        if ok and residual <= opts.residual_tolerance:
            status = PathStatus.SUCCESS
        else:
            status = PathStatus.SINGULAR_END
    elif status is PathStatus.STEP_SIZE_COLLAPSE and t <= opts.singular_t:
        status = PathStatus.SINGULAR_END
    return PathResult(start, x, t, status, steps, rejected, residual, cond)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("POLYTRACE_THREADS", "1")))
    except ValueError:
        return 1


def cluster_points(points: Sequence[np.ndarray], tol: float = 1e-6) -> list[list[int]]:
    """Group points whose distance is at most tol·max(1, |a|, |b|).

    Clusters are returned in order of their first member.
    """
    n = len(points)
    if n == 0:
        return []
    P = np.array([np.asarray(p, complex) for p in points])
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    norms = np.linalg.norm(P, axis=1)
    for i in range(n):
        d = np.linalg.norm(P[i + 1:] - P[i], axis=1)
        lim = tol * np.maximum(1.0, np.maximum(norms[i + 1:], norms[i]))
        for j in np.flatnonzero(d <= lim):
            a, b = find(i), find(i + 1 + j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def track_all(h, starts: Sequence, opts: TrackerOptions = TrackerOptions(),
              threads: int | None = None, cluster_tol: float = 1e-6) -> list[PathResult]:
    """Track every start point; results keep the input order.

    Each path is independent and deterministic, so the output does not depend
    on the number of worker threads.  Successful endpoints that coincide get
    their cluster size recorded in ``winding_hint``.
    """
    threads = threads or default_threads()
    starts = list(starts)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: track_path(h, s, opts), starts))
    else:
        results = [track_path(h, s, opts) for s in starts]
    good = [i for i, r in enumerate(results) if r.ok]
    for group in cluster_points([results[i].endpoint for i in good], cluster_tol):
        if len(group) > 1:
            for g in group:
                results[good[g]] = replace(results[good[g]], winding_hint=len(group))
    return results
