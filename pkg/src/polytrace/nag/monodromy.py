"""Monodromy permutations of witness points and the trace test."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import PathFailure
from ..homotopy import AffineSlice
from ..rng import complex_normal, stream
from ..tracker import TrackerOptions
from .witness import MATCH_TOL, WitnessSet, _close, track_slices

log = logging.getLogger(__name__)

TRACE_TOL = 1e-6
MAX_LOOPS = 50
MERGE_SEARCH_LIMIT = 4096


def match_points(reference: Sequence, moved: Sequence, tol: float = MATCH_TOL) -> list[int] | None:
    """perm[i] = index of the reference point that moved[i] landed on, or
    None unless this is a bijection."""
    perm = []
    for x in moved:
        if x is None:
            return None
        hits = [j for j, r in enumerate(reference) if _close(x, r, tol)]
        if len(hits) != 1:
            return None
        perm.append(hits[0])
    return perm if len(set(perm)) == len(perm) else None


def monodromy_loop(W: WitnessSet, rng, opts: TrackerOptions = TrackerOptions(),
                   threads: int | None = None, via: Sequence[AffineSlice] | None = None) -> list[int] | None:
    """Track W around the triangle L -> L' -> L'' -> L; None if the loop failed."""
    if via is None:
        via = [AffineSlice.random(W.nvars, W.dim, rng) for _ in range(2)]
    ends = track_slices(W, [W.slice, *via, W.slice], opts=opts, threads=threads)
    return match_points(W.points, ends)


def orbit_partition(npoints: int, perms: Sequence[Sequence[int]],
                    initial: Sequence[Sequence[int]] | None = None) -> list[list[int]]:
    """Orbits of the group generated by the permutations, optionally
    coarsening an initial partition."""
    parent = list(range(npoints))
    for part in initial or ():
        for i in part[1:]:
            parent[i] = part[0]

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(npoints):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def monodromy_action(W: WitnessSet, nloops: int, seed: int = 0, opts: TrackerOptions = TrackerOptions(),
                     threads: int | None = None) -> tuple[list[list[int]], list[list[int]]]:
    """Run ``nloops`` successful loops; returns (permutations, orbit partition).

    Failed loops are logged and replaced by fresh ones, at most ``nloops``
    extra attempts.
    """
    perms: list[list[int]] = []
    attempt = 0
    while len(perms) < nloops and attempt < 2 * nloops:
        perm = monodromy_loop(W, stream(seed, "monodromy-loop", attempt), opts, threads)
        attempt += 1
        if perm is None:
            log.info("monodromy loop %d failed, drawing new slices", attempt)
            continue
        perms.append(perm)
    return perms, orbit_partition(len(W.points), perms)


@dataclass
class TraceData:
    """Per-point deviation from affine-linearity along a pencil.

    The first slice form is translated: ℓ_1 + (1 - t)·shift, sampled at
    t = 1, 1/2 and 0.  For a point x(t), ``defects`` holds
    x(1/2) - (x(1) + x(0))/2, and ``magnitudes`` holds |x(1)| + |x(1/2)| + |x(0)|.
    Defects add over subsets.
    """

    defects: np.ndarray
    magnitudes: np.ndarray
    tol: float = TRACE_TOL

    def defect(self, subset: Sequence[int]) -> float:
        idx = list(subset)
        return float(np.linalg.norm(self.defects[idx].sum(axis=0)))

    def scale(self, subset: Sequence[int]) -> float:
        return max(1.0, float(self.magnitudes[list(subset)].sum()))

    def passes(self, subset: Sequence[int]) -> bool:
        return self.defect(subset) <= self.tol * self.scale(subset)


def trace_data(W: WitnessSet, seed: int = 0, opts: TrackerOptions = TrackerOptions(),
               threads: int | None = None, tol: float = TRACE_TOL) -> TraceData:
    n = W.nvars
    if W.dim == 0 or not W.points:
        return TraceData(np.zeros((len(W.points), n), complex), np.zeros(len(W.points)), tol)
    shift = complex(complex_normal(stream(seed, "trace-pencil")))
    base = W.slice.coeffs[0]

    def translated(s):
        row = base.copy()
        row[-1] += s
        return W.slice.replace(0, row)

    half, zero = translated(0.5 * shift), translated(shift)
    mid = track_slices(W, [W.slice, half], opts=opts, threads=threads)
    end = track_slices(W, [W.slice, zero], opts=opts, threads=threads)
    if any(p is None for p in mid + end):
        raise PathFailure("trace pencil paths failed")
    X1 = np.array(W.points, complex)
    Xh, X0 = np.array(mid, complex), np.array(end, complex)
    defects = Xh - 0.5 * (X1 + X0)
    mags = np.linalg.norm(X1, axis=1) + np.linalg.norm(Xh, axis=1) + np.linalg.norm(X0, axis=1)
    return TraceData(defects, mags, tol)


def trace_test(W: WitnessSet, subset: Sequence[int], seed: int = 0, opts: TrackerOptions = TrackerOptions(),
               threads: int | None = None, tol: float = TRACE_TOL) -> bool:
    """Is the trace of the chosen witness points affine-linear along a pencil?"""
    subset = list(subset)
    if not subset:
        raise ValueError("trace test needs a nonempty subset")
    data = trace_data(W.subset(subset), seed, opts, threads, tol)
    return data.passes(range(len(subset)))


@dataclass
class Partition:
    parts: list[list[int]]
    permutations: list[list[int]] = field(default_factory=list)
    verified: list[bool] = field(default_factory=list)
    loops: int = 0
    failed_loops: int = 0

    @property
    def complete(self) -> bool:
        return all(self.verified)


def _merge_by_trace(parts: list[list[int]], data: TraceData) -> list[list[int]]:
    """Join unverified parts whose union passes the trace test, trying
    unions of fewer points first."""
    while True:
        bad = [p for p in parts if not data.passes(p)]
        if len(bad) < 2:
            return parts
        combos = []
        for k in range(2, len(bad) + 1):
            for c in itertools.combinations(range(len(bad)), k):
                combos.append(c)
                if len(combos) > MERGE_SEARCH_LIMIT:
                    break
            if len(combos) > MERGE_SEARCH_LIMIT:
                break
        combos.sort(key=lambda c: (sum(len(bad[i]) for i in c), c))
        for c in combos:
            union = sorted(itertools.chain.from_iterable(bad[i] for i in c))
            if data.passes(union):
                chosen = [bad[i] for i in c]
                parts = [p for p in parts if p not in chosen] + [union]
                parts.sort(key=lambda g: g[0])
                break
        else:
            return parts


def decompose_witness(W: WitnessSet, seed: int = 0, max_loops: int = MAX_LOOPS,
                      opts: TrackerOptions = TrackerOptions(), threads: int | None = None,
                      stall: int = 5) -> Partition:
    """Split an equidimensional witness set into irreducible pieces.

    Monodromy loops coarsen the partition; every part is checked with the
    trace test.  When loops stop changing the partition for ``stall`` rounds,
    unverified parts are merged where their combined trace is linear.
    """
    N = len(W.points)
    if N == 0:
        return Partition([])
    if W.dim == 0:
        return Partition([[i] for i in range(N)], verified=[True] * N)
    data = trace_data(W, seed, opts, threads)
    perms: list[list[int]] = []
    parts = [[i] for i in range(N)]
    loops = failed = quiet = 0
    while not all(data.passes(p) for p in parts) and loops < max_loops:
        perm = monodromy_loop(W, stream(seed, "decompose-loop", loops), opts, threads)
        loops += 1
        if perm is None:
            failed += 1
            continue
        perms.append(perm)
        new = orbit_partition(N, [perm], parts)
        if new == parts:
            quiet += 1
            if quiet >= stall:
                parts = _merge_by_trace(parts, data)
                quiet = 0
        else:
            parts, quiet = new, 0
    parts = _merge_by_trace(parts, data)
    return Partition(parts, perms, [data.passes(p) for p in parts], loops, failed)
