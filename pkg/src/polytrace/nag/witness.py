"""Witness sets: slicing, moving, membership and equidimensional filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..algebra import LaurentSystem
from ..errors import PathFailure
from ..homotopy import AffineSlice, slice_homotopy
from ..rng import complex_normal, stream
from ..solve import gauss_newton_filter, total_degree_solve
from ..tracker import PathStatus, TrackerOptions, cluster_points, track_all

log = logging.getLogger(__name__)

MATCH_TOL = 1e-6


def _close(a, b, tol: float = MATCH_TOL) -> bool:
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    return float(np.linalg.norm(a - b)) <= tol * max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))


def randomizer(F: LaurentSystem, rows: int, rng) -> np.ndarray | None:
    """A rows × len(F) matrix [I | R'] up to column order.

    The identity block sits on the highest-degree equations, so each row of
    R·F has the degree of its identity equation.  None if F has too few
    equations.
    """
    m = len(F)
    if rows > m:
        return None
    order = sorted(range(m), key=lambda j: -F.polys[j].degree())
    R = np.zeros((rows, m), dtype=complex)
    for r in range(rows):
        R[r, order[r]] = 1.0
    rest = order[rows:]
    if rest and rows:
        R[:, rest] = complex_normal(rng, (rows, len(rest)))
    return R


@dataclass
class WitnessSet:
    """Slice points of an equidimensional piece of V(F).

    ``randomizer`` maps the equations of ``system`` to n - dim combinations
    so that tracking happens on a square system.
    """

    system: LaurentSystem
    slice: AffineSlice
    points: list[np.ndarray]
    randomizer: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.slice.nforms

    @property
    def degree(self) -> int:
        return len(self.points)

    @property
    def nvars(self) -> int:
        return self.system.nvars

    def subset(self, indices: Sequence[int]) -> "WitnessSet":
        return WitnessSet(self.system, self.slice, [self.points[i] for i in indices], self.randomizer)

    def with_points(self, points, slice_: AffineSlice | None = None) -> "WitnessSet":
        return WitnessSet(self.system, self.slice if slice_ is None else slice_, list(points), self.randomizer)

    def residual(self) -> float:
        worst = 0.0
        for p in self.points:
            r = np.concatenate([self.system.evaluate(p), self.slice.evaluate(p)])
            worst = max(worst, float(np.linalg.norm(r, np.inf)))
        return worst


def _row_condition(J) -> float:
    rows = np.abs(J).sum(axis=1)
    rows[rows == 0] = 1.0
    try:
        return float(np.linalg.cond(J / rows[:, None]))
    except np.linalg.LinAlgError:
        return np.inf


def endpoint_usable(h, r, step_tol: float = 1e-8, max_cond: float = 1e10) -> bool:
    """Success, or a t = 0 endpoint that failed the absolute residual test
    only because of its size: Newton barely moves it and the row-scaled
    Jacobian is well conditioned."""
    if r.ok:
        return True
    if r.status is not PathStatus.SINGULAR_END or r.t_reached != 0.0 or not np.all(np.isfinite(r.endpoint)):
        return False
    H, J, _ = h.evaluate(r.endpoint, 0.0)
    if _row_condition(J) > max_cond:
        return False
    step = np.linalg.solve(J, -H)
    return float(np.linalg.norm(step)) <= step_tol * max(1.0, float(np.linalg.norm(r.endpoint)))


def track_slices(W: WitnessSet, path: Sequence[AffineSlice], points=None, opts: TrackerOptions = TrackerOptions(),
                 threads: int | None = None):
    """Track points through consecutive slice homotopies.

    Returns the endpoints, or None in place of each point whose path failed.
    """
    current = [np.asarray(p, complex) for p in (W.points if points is None else points)]
    alive = list(range(len(current)))
    out: list = list(current)
    for a, b in zip(path[:-1], path[1:]):
        h = slice_homotopy(W.system, W.randomizer, a, b)
        res = track_all(h, [out[i] for i in alive], opts, threads)
        nxt = []
        for i, r in zip(alive, res):
            if endpoint_usable(h, r):
                out[i] = r.endpoint
                nxt.append(i)
            else:
                out[i] = None
        alive = nxt
    return out


def move_witness(W: WitnessSet, target: AffineSlice, opts: TrackerOptions = TrackerOptions(),
                 threads: int | None = None) -> WitnessSet:
    if target.nforms != W.dim:
        raise ValueError("target slice has a different codimension")
    if W.dim == 0:
        return W.with_points(W.points, target)
    ends = track_slices(W, [W.slice, target], opts=opts, threads=threads)
    if any(e is None for e in ends):
        raise PathFailure(f"{sum(e is None for e in ends)} of {len(ends)} witness paths failed")
    if len(cluster_points(ends, MATCH_TOL)) != len(ends):
        raise PathFailure("moved witness points collided")
    return W.with_points(ends, target)


def membership_test(W: WitnessSet, x0, seed: int = 0, opts: TrackerOptions = TrackerOptions(),
                    threads: int | None = None, attempts: int = 3) -> bool:
    """Is x0 on the piece of V(F) that W represents?

    W is moved to a random slice through x0; x0 is a member iff some moved
    point lands on it.  A failed move is retried with a fresh slice.
    """
    x0 = np.asarray(x0, complex)
    if W.dim == 0:
        return any(_close(p, x0) for p in W.points)
    if not W.points:
        return False
    last = None
    for attempt in range(attempts):
        rng = stream(seed, "membership", attempt)
        L = AffineSlice.through_point(x0, W.dim, rng)
        try:
            moved = move_witness(W, L, opts, threads)
        except PathFailure as exc:
            last = exc
            continue
        return any(_close(p, x0) for p in moved.points)
    raise last


def witness_superset(F: LaurentSystem, dim: int, seed: int = 0, opts: TrackerOptions = TrackerOptions(),
                     threads: int | None = None, slice_: AffineSlice | None = None,
                     method: str = "total") -> WitnessSet:
    """Points U_i of L^i ∩ V(F) containing every witness point of the
    i-dimensional components.

    ``slice_`` supplies the forms ℓ_1..ℓ_i (its first ``dim`` rows are
    used); by default it is drawn from the seed.
    """
    n = F.nvars
    rng = stream(seed, "witness-superset", dim)
    L = AffineSlice.random(n, dim, rng) if slice_ is None else slice_.head(dim)
    R = randomizer(F, n - dim, rng)
    if R is None:
        return WitnessSet(F, L, [], np.zeros((n - dim, len(F)), complex), {"paths": 0})
    if n - dim == 0:
        return WitnessSet(F, L, [], R, {"paths": 0})
    square = LaurentSystem(list(F.combine(R).polys) + L.as_polys(), F.variables, n)
    if method == "polyhedral":
        from ..polyhedral import polyhedral_solve

        res = polyhedral_solve(square, opts, seed=seed, threads=threads)
    else:
        res = total_degree_solve(square, opts, seed=int(rng.integers(2**62)), threads=threads, rerolls=0)
    full = LaurentSystem(list(F.polys) + L.as_polys(), F.variables, n)
    # singular ends are kept as candidates: far-out witness points can fail
    # the absolute polish test yet refine cleanly on the full system
    candidates = [r.endpoint for r in res.paths
                  if r.status in (PathStatus.SUCCESS, PathStatus.SINGULAR_END) and np.all(np.isfinite(r.endpoint))]
    kept = gauss_newton_filter(full, candidates)
    groups = cluster_points(kept, MATCH_TOL)
    pts = [kept[g[0]] for g in groups]
    return WitnessSet(F, L, pts, R, {"paths": res.npaths, "candidates": len(candidates)})


def equidimensional_filter(supersets: dict[int, WitnessSet], seed: int = 0, opts: TrackerOptions = TrackerOptions(),
                           threads: int | None = None) -> dict[int, WitnessSet]:
    """Drop superset points lying on higher-dimensional components.

    ``supersets`` maps dimension to U_i; the top nonempty dimension passes
    through unchanged.
    """
    out: dict[int, WitnessSet] = {}
    for i in sorted(supersets, reverse=True):
        U = supersets[i]
        higher = [out[j] for j in out if j > i and out[j].points]
        keep = []
        for k, x0 in enumerate(U.points):
            on_higher = any(membership_test(Wj, x0, seed=int(stream(seed, "filter", i, k, Wj.dim).integers(2**62)),
                                            opts=opts, threads=threads) for Wj in higher)
            if on_higher:
                log.debug("dimension %d: point %d lies on a higher-dimensional component", i, k)
            else:
                keep.append(x0)
        out[i] = U.with_points(keep)
    return out
