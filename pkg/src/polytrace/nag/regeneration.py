"""Equation-by-equation decomposition by regeneration."""

from __future__ import annotations

import logging

import numpy as np

from ..algebra import LaurentPolynomial, LaurentSystem
from ..homotopy import AffineSlice, Blend, Fixed, Randomized, StackedHomotopy
from ..rng import complex_normal, stream, unit_phase
from ..solve import evaluation_scale, gauss_newton_filter
from ..tracker import TrackerOptions, cluster_points, track_all
from .cascade import Decomposition, _trivial, assemble, whole_space
from .monodromy import MAX_LOOPS
from .witness import MATCH_TOL, WitnessSet, endpoint_usable, membership_test, randomizer, track_slices

log = logging.getLogger(__name__)

VANISH_TOL = 1e-8


class FormProduct:
    """The product of affine forms rows·[x; 1], as a one-equation block."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)

    def __len__(self):
        return 1

    def evaluate_with_jacobian(self, x):
        A, c = self.coeffs[:, :-1], self.coeffs[:, -1]
        v = A @ x + c
        prod = np.prod(v)
        grad = np.zeros(A.shape[1], dtype=complex)
        for k in range(len(v)):
            grad += np.prod(np.delete(v, k)) * A[k]
        return np.array([prod]), grad[None, :]


def _system(polys, F: LaurentSystem) -> LaurentSystem:
    return LaurentSystem(list(polys), F.variables, F.nvars)


def _dedupe(points):
    groups = cluster_points(points, MATCH_TOL)
    return [points[g[0]] for g in groups]


def _regenerate_piece(prev: LaurentSystem, f: LaurentPolynomial, cur: LaurentSystem, L: AffineSlice, d: int,
                      points, rng, opts, threads) -> list[np.ndarray]:
    """Witness points of X ∩ V(f) on ℓ_1..ℓ_{d-1}, for X of dimension d
    with witness points ``points`` on ℓ_1..ℓ_d."""
    n = cur.nvars
    R = randomizer(prev, n - d, rng) if len(prev) else np.zeros((0, 0), complex)
    Ld = L.head(d)
    W = WitnessSet(prev, Ld, list(points), R)
    delta = f.degree()
    extra = complex_normal(rng, n + 1)
    ts = complex_normal(rng, max(delta - 1, 0))
    forms = [Ld.coeffs[d - 1]]
    starts = list(points)
    for t in ts:
        row = t * Ld.coeffs[d - 1] + (1 - t) * extra
        forms.append(row)
        moved = track_slices(W, [Ld, Ld.replace(d - 1, row)], opts=opts, threads=threads)
        lost = sum(p is None for p in moved)
        if lost:
            log.warning("regeneration: %d of %d points lost while moving a slice", lost, len(moved))
        starts.extend(p for p in moved if p is not None)
    blocks = []
    if n - d:
        blocks.append(Fixed(Randomized(prev, R)))
    gamma = complex(unit_phase(rng))
    blocks.append(Blend(FormProduct(forms), _system([f], cur), gamma))
    if d - 1:
        blocks.append(Fixed(L.head(d - 1)))
    h = StackedHomotopy(blocks, n)
    results = track_all(h, starts, opts, threads)
    ends = [r.endpoint for r in results if endpoint_usable(h, r)]
    target = _system(list(cur.polys) + L.head(d - 1).as_polys(), cur)
    return _dedupe(gauss_newton_filter(target, ends)) if ends else []


def _vanishes(f: LaurentPolynomial, x, tol: float = VANISH_TOL) -> bool:
    g = LaurentSystem([f], None, f.nvars)
    return abs(complex(g.evaluate(x)[0])) <= tol * evaluation_scale(g, x)


def _filter_higher(cur: LaurentSystem, L: AffineSlice, state: dict[int, list], seed: int, opts, threads):
    """Remove points lying on pieces of larger dimension."""
    n = cur.nvars
    out: dict[int, list] = {}
    for e in sorted(state, reverse=True):
        higher = [WitnessSet(cur, L.head(j), out[j], randomizer(cur, n - j, stream(seed, "filter-rand", j)))
                  for j in out if out[j]]
        keep = []
        for k, x in enumerate(state[e]):
            if not any(membership_test(Wj, x, seed=int(stream(seed, "regen-member", e, k, Wj.dim).integers(2**62)),
                                       opts=opts, threads=threads) for Wj in higher):
                keep.append(x)
        out[e] = keep
    return out


def regenerate(F: LaurentSystem, opts: TrackerOptions = TrackerOptions(), seed: int = 0,
               threads: int | None = None, max_loops: int = MAX_LOOPS) -> Decomposition:
    """Decompose V(F) adding one equation at a time.

    Witness points are kept per dimension on one shared list of random forms
    ℓ_1..ℓ_n.  Points where the next equation vanishes stay; the others are
    regenerated into witness points one dimension lower.  Monodromy and the
    trace test split the final equidimensional sets.
    """
    n = F.nvars
    G = _trivial(F)
    if G is None:
        return Decomposition([], info={"empty": True})
    L = AffineSlice.random(n, n, stream(seed, "regeneration-slice"))
    if not G.polys:
        W = whole_space(G, L)
        return Decomposition([W], [True], equidimensional={n: W})
    state: dict[int, list] = {n: whole_space(G, L).points}
    for i, f in enumerate(G.polys):
        prev, cur = _system(G.polys[:i], G), _system(G.polys[: i + 1], G)
        rng = stream(seed, "regeneration-step", i)
        nxt: dict[int, list] = {}
        for d in sorted(state, reverse=True):
            stay = [x for x in state[d] if _vanishes(f, x)]
            move = [x for x in state[d] if not _vanishes(f, x)]
            nxt.setdefault(d, []).extend(stay)
            if d == 0 or not move:
                continue
            new = _regenerate_piece(prev, f, cur, L, d, move, rng, opts, threads)
            nxt.setdefault(d - 1, []).extend(new)
        nxt = {d: _dedupe(p) for d, p in nxt.items() if p}
        state = _filter_higher(cur, L, nxt, int(stream(seed, "regen-filter", i).integers(2**62)), opts, threads)
        log.info("after equation %d: %s", i + 1, {d: len(p) for d, p in sorted(state.items(), reverse=True)})
    equidim = {d: WitnessSet(G, L.head(d), pts, randomizer(G, n - d, stream(seed, "final-rand", d)))
               for d, pts in state.items() if pts}
    return assemble(equidim, seed, max_loops, opts, threads)
