"""Solving parametric families by monodromy."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import null_space

from ..algebra import ParametricFamily
from ..errors import DimensionMismatch, StalledBeforeCount
from ..rng import complex_normal, stream
from ..solve import _track_segments
from ..tracker import TrackerOptions, cluster_points

log = logging.getLogger(__name__)

STAGNATION_BUDGET = 10
MAX_LOOPS = 500


@dataclass
class MonodromyResult:
    parameters: np.ndarray
    solutions: list[np.ndarray]
    loops: int = 0
    failed_paths: int = 0
    stalled: bool = False
    info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.solutions)


def seed_pair(family: ParametricFamily, seed: int = 0, sampler: Callable | None = None,
              tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """A point x0 and parameters p0 with F(x0; p0) = 0.

    At a fixed x0 the equations are affine-linear in p; p0 is a random
    point of that affine solution space.  ``sampler(rng)`` may supply x0
    for families whose parameter-free equations restrict x.
    """
    rng = stream(seed, "monodromy-seed")
    n, k = family.nvars, family.nparams
    x0 = complex_normal(rng, n) if sampler is None else np.asarray(sampler(rng), complex)
    zero = np.zeros(k, complex)
    b, _, A = family.evaluate(x0, zero)
    probe = complex_normal(rng, k)
    v, _, _ = family.evaluate(x0, probe)
    if np.linalg.norm(v - (b + A @ probe)) > 1e-8 * max(1.0, np.linalg.norm(v)):
        raise DimensionMismatch("equations are not affine-linear in the parameters")
    p_part = np.linalg.lstsq(A, -b, rcond=None)[0]
    N = null_space(A)
    p0 = p_part + (N @ complex_normal(rng, N.shape[1]) if N.shape[1] else 0)
    res = family.evaluate(x0, p0)[0]
    if np.linalg.norm(res) > tol * max(1.0, np.linalg.norm(b)):
        raise DimensionMismatch("no parameters make the sampled point a solution")
    return x0, p0


def _fresh(known: list[np.ndarray], candidates, tol: float = 1e-6) -> list[np.ndarray]:
    new = []
    for c in candidates:
        pts = known + new + [c]
        if len(cluster_points(pts, tol)) == len(pts):
            new.append(c)
    return new


def monodromy_solve(family: ParametricFamily, known_count: int | None = None, seed: int = 0,
                    budget: int = STAGNATION_BUDGET, start: tuple | None = None,
                    sampler: Callable | None = None, randomizer=None,
                    opts: TrackerOptions = TrackerOptions(), threads: int | None = None,
                    max_loops: int = MAX_LOOPS) -> MonodromyResult:
    """Populate the fiber over p0 by tracking known solutions around random
    triangles p0 -> p1 -> p2 -> p0.

    Stops when ``known_count`` solutions are known or after ``budget``
    consecutive loops without a new one.  ``start`` gives (x0, p0)
    directly; ``randomizer`` squares up overdetermined families.
    """
    x0, p0 = seed_pair(family, seed, sampler) if start is None else (np.asarray(start[0], complex),
                                                                       np.asarray(start[1], complex))
    scale = max(1.0, float(np.sqrt(np.mean(np.abs(p0) ** 2))))
    sols = [x0]
    loops = quiet = failed = 0
    while (known_count is None or len(sols) < known_count) and quiet < budget and loops < max_loops:
        rng = stream(seed, "monodromy-solve-loop", loops)
        p1 = scale * complex_normal(rng, p0.shape)
        p2 = scale * complex_normal(rng, p0.shape)
        paths, alive, current = _track_segments(family, [p0, p1, p2, p0], sols, opts, threads, randomizer)
        loops += 1
        failed += len(sols) - len(alive)
        new = _fresh(sols, [current[i] for i in alive])
        if new:
            sols.extend(new)
            quiet = 0
            log.info("monodromy loop %d: %d solutions", loops, len(sols))
        else:
            quiet += 1
    if known_count is not None:
        sols = sols[:known_count] if len(sols) > known_count else sols
    result = MonodromyResult(p0, sols, loops, failed, quiet >= budget,
                             {"stagnation_budget": budget, "stopped_by": "count" if known_count and len(sols) >= known_count
                              else "stagnation"})
    if known_count is not None and len(sols) < known_count:
        raise StalledBeforeCount(f"found {len(sols)} of {known_count} solutions after {loops} loops", result)
    return result
