"""Numerical irreducible decomposition by the cascade of witness supersets."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..algebra import LaurentSystem
from ..homotopy import AffineSlice
from ..rng import stream
from ..tracker import TrackerOptions
from .monodromy import MAX_LOOPS, decompose_witness
from .witness import WitnessSet, equidimensional_filter, witness_superset

log = logging.getLogger(__name__)


@dataclass
class Decomposition:
    """One witness set per irreducible component, highest dimension first.

    ``inconclusive`` is set when some part never passed the trace test within
    the loop budget; such parts are still reported, flagged in
    ``verified``.
    """

    components: list[WitnessSet]
    verified: list[bool] = field(default_factory=list)
    permutations: dict[int, list[list[int]]] = field(default_factory=dict)
    equidimensional: dict[int, WitnessSet] = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return not all(self.verified)

    @property
    def dimension(self) -> int:
        return max((W.dim for W in self.components), default=-1)

    def by_dimension(self) -> dict[int, list[WitnessSet]]:
        out: dict[int, list[WitnessSet]] = {}
        for W in self.components:
            out.setdefault(W.dim, []).append(W)
        return dict(sorted(out.items(), reverse=True))

    def summary(self) -> list[tuple[int, int]]:
        """(dimension, degree) per component."""
        return [(W.dim, W.degree) for W in self.components]

    def __len__(self) -> int:
        return len(self.components)


def _split(W: WitnessSet, seed: int, max_loops: int, opts, threads):
    part = decompose_witness(W, seed, max_loops, opts, threads)
    if not part.complete:
        log.warning("dimension %d: %d parts failed the trace test after %d loops",
                    W.dim, part.verified.count(False), part.loops)
    comps = [W.subset(p) for p in part.parts]
    for c, ok in zip(comps, part.verified):
        c.info = {"verified": ok}
    return comps, part


def assemble(equidim: dict[int, WitnessSet], seed: int = 0, max_loops: int = MAX_LOOPS,
             opts: TrackerOptions = TrackerOptions(), threads: int | None = None) -> Decomposition:
    """Split each equidimensional slice into components."""
    dec = Decomposition([], equidimensional=equidim)
    for i in sorted(equidim, reverse=True):
        W = equidim[i]
        if not W.points:
            continue
        comps, part = _split(W, int(stream(seed, "split", i).integers(2**62)), max_loops, opts, threads)
        dec.components.extend(comps)
        dec.verified.extend(part.verified)
        dec.permutations[i] = part.permutations
        dec.info[f"loops_dim{i}"] = part.loops
    return dec


def _trivial(F: LaurentSystem):
    """Drop zero equations; report an empty variety if an equation is a
    nonzero constant."""
    polys = [p for p in F.polys if p.terms]
    if any(p.degree() == 0 and not p.has_negative_exponents() for p in polys):
        return None
    return F.with_polys(polys)


def whole_space(F: LaurentSystem, L: AffineSlice) -> WitnessSet:
    """Witness set of C^n: the single point cut out by n independent forms."""
    point = np.linalg.solve(L.matrix, -L.constants)
    return WitnessSet(F, L, [point], np.zeros((0, len(F)), complex))


def numerical_irreducible_decomposition(F: LaurentSystem, opts: TrackerOptions = TrackerOptions(),
                                        seed: int = 0, threads: int | None = None,
                                        max_loops: int = MAX_LOOPS, method: str = "total",
                                        slice_: AffineSlice | None = None) -> Decomposition:
    """Cascade: witness supersets for every dimension, removal of points on
    higher-dimensional components, then monodromy and trace tests.

    All dimensions share one list of random forms ℓ_1..ℓ_{n-1} (or those of
    ``slice_``), so the slice in dimension i is ℓ_1..ℓ_i.
    """
    n = F.nvars
    G = _trivial(F)
    if G is None:
        return Decomposition([], info={"empty": True})
    L = AffineSlice.random(n, n, stream(seed, "cascade-slice")) if slice_ is None else slice_
    if not G.polys:
        W = whole_space(G, L.head(n))
        return Decomposition([W], [True], equidimensional={n: W})
    supersets = {}
    for i in range(n - 1, -1, -1):
        supersets[i] = witness_superset(G, i, seed=int(stream(seed, "superset", i).integers(2**62)),
                                        opts=opts, threads=threads, slice_=L, method=method)
        log.info("dimension %d: %d candidate witness points", i, len(supersets[i].points))
    equidim = equidimensional_filter(supersets, seed=seed, opts=opts, threads=threads)
    dec = assemble(equidim, seed, max_loops, opts, threads)
    dec.info["superset_sizes"] = {i: len(U.points) for i, U in supersets.items()}
    return dec
