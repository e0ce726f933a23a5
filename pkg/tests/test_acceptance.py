"""End-to-end acceptance checks, one group per criterion.

A summary line per criterion is printed at the end of the run.
"""

from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
import sympy

from conftest import load, set_distance, warn_criterion
from polytrace import bench
from polytrace.algebra import LaurentPolynomial, LaurentSystem, integer_det, smith_normal_form
from polytrace.certify import ComplexInterval, Interval, boxes_disjoint, certify_krawczyk
from polytrace.homotopy import AffineSlice, straight_line
from polytrace.nag import move_witness, numerical_irreducible_decomposition, trace_test, witness_superset
from polytrace.polyhedral import cell_start_solutions, mixed_cells, mixed_volume, polyhedral_solve
from polytrace.rng import complex_normal, stream
from polytrace.solve import bezout_number, total_degree_solve
from polytrace.tracker import TrackerOptions, track_all

ROOT = Path(__file__).resolve().parents[1]


def _exact_eq23_roots():
    """Exact roots of the triangular system y^3 + y^2 + y = 0, x^2 + y^2 - 1 = 0."""
    x, y = sympy.symbols("x y")
    roots = []
    for yv in sympy.solve(y**3 + y**2 + y, y):
        for xv in sympy.solve(x**2 + yv**2 - 1, x):
            roots.append(np.array([complex(sympy.N(xv, 30)), complex(sympy.N(yv, 30))]))
    return roots


# 1


@pytest.mark.criterion(1, "two curves: 6 solutions, certified unique and disjoint, 2 real")
def test_eq23_total_degree_and_krawczyk():
    F = load("eq23.txt")
    t0 = time.perf_counter()
    res = total_degree_solve(F, seed=0)
    certs = certify_krawczyk(F, res.solutions)
    elapsed = time.perf_counter() - t0
    oracle = _exact_eq23_roots()
    assert len(oracle) == 6
    assert len(res) == 6
    assert set_distance(res.solutions, oracle) <= 1e-8
    assert all(c.certified and c.unique for c in certs)
    for a, b in itertools.combinations(certs, 2):
        assert boxes_disjoint(a.box, b.box)
    assert sum(c.real is True for c in certs) == 2
    # every box holds exactly one exact root
    for c in certs:
        assert sum(c.contains(z) for z in oracle) == 1
    assert elapsed < 1.0


# 2


@pytest.mark.criterion(2, "distance critical points: Bezout 36, MV 12, 12 solutions both ways")
def test_biquadratic_two_solvers():
    F = load("biquadratic.txt")
    t0 = time.perf_counter()
    assert bezout_number(F) == 36
    assert mixed_volume(F.supports()) == 12
    poly = polyhedral_solve(F, seed=0)
    total = total_degree_solve(F, seed=0)
    elapsed = time.perf_counter() - t0
    assert poly.npaths == 12 and len(poly) == 12
    assert total.npaths == 36 and len(total) == 12
    assert set_distance(poly.solutions, total.solutions) <= 1e-6
    assert elapsed < 5.0


# 3

EX35_SUPPORTS = [[(0, 0), (0, 2), (2, 0), (2, 2)], [(0, 0), (1, 1), (1, 2), (2, 1)]]
EX35_LIFTING = [[0, 0, 0, 0], [a + b for a, b in EX35_SUPPORTS[1]]]


def _ex35_cells():
    return {(c.alpha, c.r): c for c in mixed_cells(EX35_SUPPORTS, EX35_LIFTING)}


@pytest.mark.criterion(3, "sparse pair with given lifts: two cells 4+4, binomial roots, 8 solutions")
def test_ex35_cells_and_solve():
    t0 = time.perf_counter()
    cells = _ex35_cells()
    F = load("ex35.txt")
    res = polyhedral_solve(F, seed=0)
    elapsed = time.perf_counter() - t0
    assert set(cells) == {((0, -3), 2), ((-3, 0), 2)}
    assert [cells[k].volume for k in sorted(cells)] == [4, 4]
    assert len(res) == 8
    assert elapsed < 2.0


@pytest.mark.criterion(3, "sparse pair with given lifts: two cells 4+4, binomial roots, 8 solutions")
@pytest.mark.xfail(strict=True, reason="the printed sign patterns are not roots: for y1 = -sqrt(3) the second "
                                       "binomial forces y2^2 < 0; see the decisions ledger")
def test_ex35_binomial_roots_as_printed():
    F = load("ex35.txt")
    cells = _ex35_cells()
    r75, r27 = 75 ** -0.25, 27 ** -0.25
    printed = {
        ((0, -3), 2): [(s * math.sqrt(3), u * r75) for s in (1, -1) for u in (1, -1)],
        ((-3, 0), 2): [(s * r27, u * math.sqrt(3)) for s in (1, -1) for u in (1, -1)],
    }
    for key, pts in printed.items():
        assert set_distance(cell_start_solutions(cells[key], F), [np.array(p) for p in pts]) <= 1e-10


def test_ex35_binomial_roots_exact():
    """Roots of the two start binomial systems, solved by hand: y1^2 = 3 with
    5 y1 y2^2 = 1, and y2^2 = 3 with 3 y1^2 y2 = 1."""
    F = load("ex35.txt")
    cells = _ex35_cells()
    expected = {((0, -3), 2): [], ((-3, 0), 2): []}
    for s in (1, -1):
        y1 = s * math.sqrt(3)
        for r in np.roots([5 * y1, 0, -1]):
            expected[((0, -3), 2)].append(np.array([y1, r]))
        y2 = s * math.sqrt(3)
        for r in np.roots([3 * y2, 0, -1]):
            expected[((-3, 0), 2)].append(np.array([r, y2]))
    for key, pts in expected.items():
        assert set_distance(cell_start_solutions(cells[key], F), pts) <= 1e-10


# 4


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _twice_area(points) -> int:
    h = _hull(points)
    return abs(sum(h[i][0] * h[(i + 1) % len(h)][1] - h[(i + 1) % len(h)][0] * h[i][1] for i in range(len(h))))


def _polarization(P, Q) -> Fraction:
    PQ = [(a[0] + b[0], a[1] + b[1]) for a in P for b in Q]
    return Fraction(_twice_area(PQ) - _twice_area(P) - _twice_area(Q), 2)


@pytest.mark.criterion(4, "mixed volumes: square and triangle, polarization, lifting independence")
def test_mixed_volume_fixtures():
    square = [(0, 0), (2, 0), (0, 2), (2, 2)]
    triangle = [(0, 0), (1, 1), (1, 2), (2, 1)]
    assert mixed_volume([square, triangle]) == 8
    assert _polarization(square, triangle) == 8
    rng = np.random.default_rng(20240)
    pairs = 0
    while pairs < 20:
        P = [tuple(int(v) for v in rng.integers(0, 6, 2)) for _ in range(rng.integers(3, 7))]
        Q = [tuple(int(v) for v in rng.integers(0, 6, 2)) for _ in range(rng.integers(3, 7))]
        if _twice_area(P) == 0 or _twice_area(Q) == 0:
            continue
        pairs += 1
        expected = _polarization(P, Q)
        assert expected.denominator == 1
        mvs = {mixed_volume([P, Q], seed=s) for s in range(5)}
        assert mvs == {int(expected)}, (P, Q)


# 5

SURFACE_SLICE = AffineSlice([[1, 1, 0, 2], [-0.25, 0, 1, 3]])
PLANE = AffineSlice([[1, 1, 0, 2]])
SURFACE_POINTS = [(10 / 3, -16 / 3, -13 / 6), (-8, 6, -5)]
CURVE_POINTS = {2: [(-2.06, 0.06, 2), (-0.40, -1.60, 2), (0.69, -2.69, 2), (1.76, -3.76, 2)],
                5: [(-2.06, 0.06, 5), (-0.40, -1.60, 5), (0.69, -2.69, 5), (1.76, -3.76, 5)]}
ISOLATED = [(a, b, c) for a in (4, 6) for b in (3, 5) for c in (2, 5)]


@pytest.fixture(scope="module")
def reducible_decomposition():
    F = load("reducible.txt")
    t0 = time.perf_counter()
    dec = numerical_irreducible_decomposition(F, seed=1)
    return F, dec, time.perf_counter() - t0


def _max_coord_error(points, reference) -> float:
    worst = 0.0
    for r in reference:
        worst = max(worst, min(float(np.abs(np.asarray(p) - np.asarray(r)).max()) for p in points))
    return worst


@pytest.mark.criterion(5, "reducible threefold example: 1 surface, 2 quartic curves, 8 points")
def test_reducible_decomposition(reducible_decomposition):
    F, dec, elapsed = reducible_decomposition
    assert not dec.inconclusive
    assert sorted(dec.summary(), reverse=True) == [(2, 2), (1, 4), (1, 4)] + [(0, 1)] * 8
    (surface,) = dec.by_dimension()[2]
    moved = move_witness(surface, SURFACE_SLICE)
    assert set_distance(moved.points, [np.array(p) for p in SURFACE_POINTS]) <= 1e-6
    curves = dec.by_dimension()[1]
    by_height = {}
    for W in curves:
        m = move_witness(W, PLANE)
        heights = {round(float(p[2].real)) for p in m.points}
        assert len(heights) == 1
        by_height[heights.pop()] = m.points
    assert sorted(by_height) == [2, 5]
    for z, ref in CURVE_POINTS.items():
        assert len(by_height[z]) == 4
        assert _max_coord_error(by_height[z], ref) <= 5e-3
    points = [W.points[0] for W in dec.by_dimension()[0]]
    assert set_distance(points, [np.array(p, complex) for p in ISOLATED]) <= 1e-6
    assert elapsed < 60.0


# 6


@pytest.mark.criterion(6, "trace test on the folium; folium and ellipse split 3 + 2")
def test_trace_folium_and_union():
    t0 = time.perf_counter()
    W = witness_superset(load("folium.txt"), 1, seed=0)
    assert W.degree == 3
    assert trace_test(W, [0, 1, 2], seed=0)
    for k in (1, 2):
        for sub in itertools.combinations(range(3), k):
            assert not trace_test(W, sub, seed=0), sub
    dec = numerical_irreducible_decomposition(load("folium_ellipse.txt"), seed=0)
    elapsed = time.perf_counter() - t0
    assert not dec.inconclusive
    assert sorted(W.degree for W in dec.components) == [2, 3]
    assert elapsed < 10.0


# 7


@pytest.mark.criterion(7, "oscillator equilibria counts match closed forms and solver counts")
def test_kuramoto_counts():
    t0 = time.perf_counter()
    expected = {"path:3": 4, "path:4": 8, "path:5": 16, "cycle:4": 12, "cycle:5": 30, "complete:3": 6}
    for desc, count in expected.items():
        assert bench.kuramoto_count(bench.parse_graph(desc)) == count, desc
    for desc in ("complete:3", "path:3", "cycle:4"):
        g = bench.parse_graph(desc)
        F = bench.kuramoto_system(g, seed=0)
        assert len(polyhedral_solve(F, seed=0)) == expected[desc], desc
    assert time.perf_counter() - t0 < 120.0


# 8


@pytest.mark.criterion(8, "three-point pose: 8 solutions, true depths recovered, 10 seeds")
@pytest.mark.parametrize("seed", range(10))
def test_p3p(seed):
    F, truth = bench.p3p_system(seed)
    t0 = time.perf_counter()
    res = total_degree_solve(F, seed=seed)
    elapsed = time.perf_counter() - t0
    assert len(res) == 8
    assert min(np.linalg.norm(s - truth) for s in res) <= 1e-8
    assert elapsed < 5.0


# 9


@pytest.mark.slow
@pytest.mark.criterion(9, "five-point relative pose: 20 solutions by monodromy (warning only)")
def test_five_point():
    title = "five-point relative pose: 20 solutions by monodromy (warning only)"
    t0 = time.perf_counter()
    try:
        out = bench.five_point_solve(seed=0)
    except Exception as exc:  # a failure here is reported, not fatal
        warn_criterion(9, title, f"five-point solve raised {type(exc).__name__}: {exc}")
        return
    elapsed = time.perf_counter() - t0
    truth = out.instance.truth
    err = min((float(np.linalg.norm(s - truth)) for s in out.solutions), default=np.inf)
    problems = []
    if out.fiber_size != 20 or len(out.solutions) != 20:
        problems.append(f"fiber {out.fiber_size}, real instance {len(out.solutions)} solutions")
    if err > 1e-8:
        problems.append(f"ground truth error {err:.2e}")
    if elapsed > 600:
        problems.append(f"took {elapsed:.0f} s")
    if problems:
        warn_criterion(9, title, "; ".join(problems))


# 10


def _fr(x: float) -> Fraction:
    return Fraction(x)


def _inside(value: Fraction, I: Interval) -> bool:
    return _fr(I.lo) <= value <= _fr(I.hi)


@pytest.mark.criterion(10, "property suites: intervals, Smith form, Jacobians, thread determinism")
def test_interval_enclosure_fuzz():
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(10_000):
        a, b = np.sort(rng.standard_normal(2) * 10.0 ** rng.integers(-3, 4))
        c, d = np.sort(rng.standard_normal(2) * 10.0 ** rng.integers(-3, 4))
        I, J = Interval(float(a), float(b)), Interval(float(c), float(d))
        p = _fr(float(rng.uniform(a, b)))
        q = _fr(float(rng.uniform(c, d)))
        violations += not _inside(p + q, I + J)
        violations += not _inside(p - q, I - J)
        violations += not _inside(p * q, I * J)
        if not (c <= 0 <= d):
            violations += not _inside(p / q, I / J)
        # complex rectangles from the same draws
        Z = ComplexInterval(I, J)
        Wc = ComplexInterval(J, I)
        zr, zi, wr, wi = p, q, q, p
        prod = Z * Wc
        violations += not (_inside(zr * wr - zi * wi, prod.re) and _inside(zr * wi + zi * wr, prod.im))
        s = Z + Wc
        violations += not (_inside(zr + wr, s.re) and _inside(zi + wi, s.im))
    assert violations == 0


@pytest.mark.criterion(10, "property suites: intervals, Smith form, Jacobians, thread determinism")
def test_smith_normal_form_200():
    rng = np.random.default_rng(11)
    done = 0
    while done < 200:
        n = int(rng.integers(1, 6))
        A = [[int(v) for v in row] for row in rng.integers(-9, 10, (n, n))]
        det = integer_det(A)
        if det == 0:
            continue
        X, D, Y = smith_normal_form(A)
        XAY = [[sum(X[i][k] * A[k][l] * Y[l][j] for k in range(n) for l in range(n)) for j in range(n)]
               for i in range(n)]
        assert XAY == D
        diag = [D[i][i] for i in range(n)]
        assert all(D[i][j] == 0 for i in range(n) for j in range(n) if i != j)
        assert all(diag[i + 1] % diag[i] == 0 for i in range(n - 1))
        assert abs(integer_det(X)) == 1 and abs(integer_det(Y)) == 1
        assert math.prod(diag) == abs(det) == abs(int(round(sympy.Matrix(A).det())))
        done += 1


@pytest.mark.criterion(10, "property suites: intervals, Smith form, Jacobians, thread determinism")
def test_jacobian_vs_finite_differences():
    rng = np.random.default_rng(3)
    for trial in range(50):
        n = int(rng.integers(1, 4))
        polys = []
        for _ in range(n):
            terms = {tuple(int(v) for v in rng.integers(-2, 4, n)): complex(*rng.standard_normal(2))
                     for _ in range(int(rng.integers(1, 6)))}
            polys.append(LaurentPolynomial(n, terms))
        F = LaurentSystem(polys)
        z = complex_normal(rng, n) + 1.5
        _, J = F.evaluate_with_jacobian(z)
        h = 1e-6
        fd = np.empty_like(J)
        for j in range(n):
            e = np.zeros(n, complex)
            e[j] = h
            fd[:, j] = (F.evaluate(z + e) - F.evaluate(z - e)) / (2 * h)
        scale = max(1.0, float(np.abs(J).max()))
        assert np.abs(J - fd).max() <= 1e-6 * scale, trial


@pytest.mark.criterion(10, "property suites: intervals, Smith form, Jacobians, thread determinism")
def test_thread_determinism():
    F = load("biquadratic.txt")
    G = LaurentSystem([LaurentPolynomial.variable(i, 3) ** d - 1 for i, d in enumerate(F.degrees())], F.variables)
    starts = [np.array(s, complex) for s in itertools.product(*[np.exp(2j * np.pi * np.arange(d) / d)
                                                                   for d in F.degrees()])]
    h = straight_line(G, F, gamma=complex(0.6, 0.8))
    runs = []
    for threads in (1, 2, 8):
        res = track_all(h, starts, TrackerOptions(), threads=threads)
        runs.append([(r.status, r.endpoint.tobytes(), r.t_reached, r.steps) for r in res])
    assert runs[0] == runs[1] == runs[2]


# 11


@pytest.mark.criterion(11, "stretch experiments documented, not gated")
def test_stretch_experiments_documented():
    readme = (ROOT / "README.md").read_text().lower()
    assert "3264" in readme
    assert "industrial" in readme
