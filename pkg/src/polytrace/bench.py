"""Benchmark families with known answers.

Graph descriptors are strings ``kind:N`` with kind one of ``path``
(alias ``tree``), ``star``, ``cycle``, ``complete`` or ``wheel``; N counts
nodes.  A wheel on N nodes is a hub joined to an (N-1)-cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import LaurentPolynomial, LaurentSystem, ParametricFamily
from .errors import DegenerateConfiguration, DimensionMismatch, Disconnected
from .polyhedral import mixed_volume
from .rng import stream


@dataclass(frozen=True)
class Graph:
    nodes: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""

    def neighbors(self, i: int) -> list[int]:
        return [b if a == i else a for a, b in self.edges if i in (a, b)]

    def is_connected(self) -> bool:
        seen, todo = {0}, [0]
        while todo:
            for j in self.neighbors(todo.pop()):
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == self.nodes


def _require_connected(g: Graph):
    if g.nodes < 2 or not g.is_connected():
        raise Disconnected(f"graph {g.name or g.edges} is not connected")


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)), f"path:{n}")


def star_graph(n: int) -> Graph:
    return Graph(n, tuple((0, i) for i in range(1, n)), f"star:{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DimensionMismatch("a cycle needs at least 3 nodes")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n - 1)) + ((0, n - 1),), f"cycle:{n}")


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)), f"complete:{n}")


def wheel_graph(n: int) -> Graph:
    if n < 4:
        raise DimensionMismatch("a wheel needs at least 4 nodes")
    rim = [(i, i + 1) for i in range(1, n - 1)] + [(1, n - 1)]
    return Graph(n, tuple((0, i) for i in range(1, n)) + tuple(rim), f"wheel:{n}")


_GRAPHS = {"path": path_graph, "tree": path_graph, "star": star_graph, "cycle": cycle_graph,
           "complete": complete_graph, "wheel": wheel_graph}


def parse_graph(desc: str) -> Graph:
    kind, _, count = desc.partition(":")
    if kind not in _GRAPHS or not count.isdigit():
        raise ValueError(f"unknown graph descriptor {desc!r}")
    return _GRAPHS[kind](int(count))


# Kuramoto equilibria


def kuramoto_family(g: Graph) -> ParametricFamily:
    """Equilibrium equations in (s_i, c_i) = (sin, cos) of nodes 1..N-1.

    Node 0 is fixed at s = 0, c = 1.  Parameters are the natural frequencies
    omega_1..omega_{N-1} followed by one coupling per edge.
    """
    _require_connected(g)
    N = g.nodes
    n = N - 1
    nv = 2 * n
    k = n + len(g.edges)
    total = nv + k

    def var(j):
        return LaurentPolynomial.variable(j, total)

    def s(i):
        return LaurentPolynomial.constant(total, 0) if i == 0 else var(i - 1)

    def c(i):
        return LaurentPolynomial.constant(total, 1) if i == 0 else var(n + i - 1)

    polys = []
    for i in range(1, N):
        f = var(nv + i - 1)
        for e, (a, b) in enumerate(g.edges):
            if i not in (a, b):
                continue
            j = b if a == i else a
            f = f - var(nv + n + e) * (s(i) * c(j) - c(i) * s(j))
        polys.append(f)
    for i in range(1, N):
        polys.append(s(i) ** 2 + c(i) ** 2 - 1)
    names = [f"s{i}" for i in range(1, N)] + [f"c{i}" for i in range(1, N)]
    names += [f"w{i}" for i in range(1, N)] + [f"k{a}_{b}" for a, b in g.edges]
    return ParametricFamily(LaurentSystem(polys, names, total), k)


def kuramoto_system(g: Graph, omega=None, coupling=None, seed: int = 0) -> LaurentSystem:
    """A member of the Kuramoto family; unspecified parameters are drawn
    uniformly from [-1, 1] (frequencies) and [0.5, 1.5] (couplings)."""
    rng = stream(seed, "kuramoto", g.name)
    n = g.nodes - 1
    omega = rng.uniform(-1, 1, n) if omega is None else np.asarray(omega, float)
    coupling = rng.uniform(0.5, 1.5, len(g.edges)) if coupling is None else np.asarray(coupling, float)
    return kuramoto_family(g).specialize(np.concatenate([omega, coupling]))


def symmetric_edge_polytope(g: Graph) -> list[tuple[int, ...]]:
    """Vertices ±(e_i - e_j) over the edges, with node 0's coordinate dropped."""
    _require_connected(g)
    n = g.nodes - 1
    pts = set()
    for a, b in g.edges:
        v = [0] * g.nodes
        v[a], v[b] = 1, -1
        pts.add(tuple(v[1:]))
        pts.add(tuple(-x for x in v[1:]))
    return sorted(pts)


def kuramoto_count(g: Graph, seed: int = 0) -> int:
    """Mixed volume of N-1 copies of the symmetric edge polytope."""
    pts = symmetric_edge_polytope(g)
    return mixed_volume([pts] * (g.nodes - 1), seed=seed)


def kuramoto_count_formula(g: Graph) -> int | None:
    """Closed-form counts for trees, cycles and wheels (None otherwise)."""
    kind = g.name.split(":")[0]
    N = g.nodes
    if kind in ("path", "tree", "star"):
        return 2 ** (N - 1)
    if kind == "cycle":
        return N * math.comb(N - 1, (N - 1) // 2)
    if kind == "wheel":
        n = N - 1
        lucas = round((1 - math.sqrt(3)) ** n + (1 + math.sqrt(3)) ** n)
        return lucas - 2 if n % 2 == 0 else lucas
    if kind == "complete":
        return math.comb(2 * (N - 1), N - 1)
    return None


# Perspective-3-point


@dataclass
class CameraInstance:
    system: LaurentSystem
    truth: np.ndarray
    data: dict = field(default_factory=dict)


def random_rotation(rng) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q @ np.diag(np.sign(np.diag(R)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def _well_spread(points: np.ndarray, tol: float = 1e-2) -> bool:
    if len(points) < 3:
        return True
    for a, b, c in [(0, 1, 2)] + ([(1, 2, 3), (0, 2, 3)] if len(points) > 3 else []):
        if np.linalg.norm(np.cross(points[b] - points[a], points[c] - points[a])) < tol:
            return False
    return True


def p3p_instance(seed: int = 0, attempts: int = 20) -> CameraInstance:
    """Depths l1, l2, l3 of three known world points seen by a calibrated
    camera: |X_i - X_j|^2 = |l_i x_i - l_j x_j|^2 for the three pairs."""
    rng = stream(seed, "p3p")
    for _ in range(attempts):
        X = rng.standard_normal((3, 3))
        if not _well_spread(X):
            continue
        R, t = random_rotation(rng), np.array([0.0, 0.0, 6.0]) + 0.5 * rng.standard_normal(3)
        Xc = X @ R.T + t
        depths = Xc[:, 2]
        if np.any(depths < 0.5):
            continue
        rays = Xc / depths[:, None]
        names = ["l1", "l2", "l3"]
        L = [LaurentPolynomial.variable(i, 3) for i in range(3)]
        polys = []
        for i, j in ((0, 1), (0, 2), (1, 2)):
            d2 = float(np.sum((X[i] - X[j]) ** 2))
            acc = LaurentPolynomial.constant(3, d2)
            for k in range(3):
                diff = L[i] * rays[i, k] - L[j] * rays[j, k]
                acc = acc - diff * diff
            polys.append(acc)
        return CameraInstance(LaurentSystem(polys, names, 3), depths.astype(complex),
                              {"world": X, "rays": rays, "rotation": R, "translation": t})
    raise DegenerateConfiguration("could not sample a non-degenerate P3P configuration")


# Five-point relative pose


def _det3(cols):
    a, b, c = cols
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def five_point_family() -> ParametricFamily:
    """Depths of five points in two calibrated views.

    Unknowns l2..l5 (l1 = 1) and m1..m5; parameters are the image coordinates
    (u_i, v_i) in the first view and (p_i, q_i) in the second.  Equations
    equate the ten pairwise distances and the orientation determinant of the
    reconstructed points in both camera frames.
    """
    nv, k = 9, 20
    total = nv + k
    V = [LaurentPolynomial.variable(j, total) for j in range(total)]
    one = LaurentPolynomial.constant(total, 1)
    lam = [one] + V[0:4]
    mu = V[4:9]
    x = [(V[nv + 2 * i], V[nv + 2 * i + 1], one) for i in range(5)]
    y = [(V[nv + 10 + 2 * i], V[nv + 10 + 2 * i + 1], one) for i in range(5)]
    polys = []
    for i in range(5):
        for j in range(i + 1, 5):
            acc = LaurentPolynomial(total)
            for c in range(3):
                a = lam[i] * x[i][c] - lam[j] * x[j][c]
                b = mu[i] * y[i][c] - mu[j] * y[j][c]
                acc = acc + a * a - b * b
            polys.append(acc)
    cols_x = [[lam[0] * x[0][c] - lam[j] * x[j][c] for c in range(3)] for j in (1, 2, 3)]
    cols_y = [[mu[0] * y[0][c] - mu[j] * y[j][c] for c in range(3)] for j in (1, 2, 3)]
    polys.append(_det3(cols_x) - _det3(cols_y))
    names = [f"l{i}" for i in range(2, 6)] + [f"m{i}" for i in range(1, 6)]
    names += [f"{a}{i}" for i in range(1, 6) for a in "uv"] + [f"{a}{i}" for i in range(1, 6) for a in "pq"]
    return ParametricFamily(LaurentSystem(polys, names, total), k)


def five_point_configuration(rng, complex_data: bool = False):
    """Sample world points and a relative pose; returns (params, depths)."""
    if complex_data:
        def draw(shape):
            return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        S = draw((3, 3)) * 0.5
        S = S - S.T
        I3 = np.eye(3)
        R = np.linalg.solve(I3 + S, I3 - S)  # complex orthogonal (Cayley)
        t = draw(3)
        X = draw((5, 3)) + np.array([0, 0, 4.0])
    else:
        R = random_rotation(rng)
        t = rng.standard_normal(3)
        X = rng.standard_normal((5, 3)) + np.array([0, 0, 5.0])
    X1 = X.astype(complex)
    X2 = X1 @ R.T + t
    lam, mu = X1[:, 2], X2[:, 2]
    scale = lam[0]
    x, y = X1 / lam[:, None], X2 / mu[:, None]
    params = np.concatenate([x[:, :2].ravel(), y[:, :2].ravel()])
    depths = np.concatenate([lam[1:] / scale, mu / scale])
    return params, depths


def five_point_instance(seed: int = 0) -> CameraInstance:
    rng = stream(seed, "five-point")
    fam = five_point_family()
    for _ in range(20):
        params, depths = five_point_configuration(rng)
        if np.all(depths.real > 0.1):
            break
    else:
        raise DegenerateConfiguration("could not sample points in front of both cameras")
    return CameraInstance(fam.specialize(params), depths, {"params": params, "family": fam})


def p3p_system(seed: int = 0) -> tuple[LaurentSystem, np.ndarray]:
    inst = p3p_instance(seed)
    return inst.system, inst.truth


def five_point_system(seed: int = 0) -> tuple[LaurentSystem, np.ndarray]:
    """The overdetermined 11 × 9 system of one real instance and its depths."""
    inst = five_point_instance(seed)
    return inst.system, inst.truth


@dataclass
class FivePointSolution:
    instance: CameraInstance
    solutions: list[np.ndarray]
    loops: int
    fiber_size: int


def five_point_solve(seed: int = 0, known_count: int = 20, budget: int = 15, opts=None,
                     threads: int | None = None) -> FivePointSolution:
    """Populate a generic complex fiber by monodromy, then continue it to a
    real instance.

    The eleven equations are squared up to nine by a random complex matrix;
    endpoints are kept only if they solve all eleven.
    """
    from .nag.monodromy_solve import monodromy_solve
    from .rng import complex_normal
    from .solve import gauss_newton_filter, parameter_solve
    from .tracker import TrackerOptions

    opts = opts or TrackerOptions()
    fam = five_point_family()
    p0, x0 = five_point_configuration(stream(seed, "five-point-fiber"), complex_data=True)
    R = complex_normal(stream(seed, "five-point-square"), (fam.nvars, len(fam.system)))
    fiber = monodromy_solve(fam, known_count, seed=seed, budget=budget, start=(x0, p0), randomizer=R,
                            opts=opts, threads=threads)
    inst = five_point_instance(seed)
    res = parameter_solve(fam, fiber.parameters, fiber.solutions, inst.data["params"], opts=opts, seed=seed,
                          threads=threads, randomizer=R)
    kept = gauss_newton_filter(inst.system, res.solutions)
    return FivePointSolution(inst, kept, fiber.loops, len(fiber.solutions))
