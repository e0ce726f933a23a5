import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, load
from polytrace.algebra import (
    LaurentPolynomial,
    LaurentSystem,
    eval_jacobian,
    eval_poly,
    format_polynomial,
    format_system,
    integer_det,
    lu_factor,
    lu_solve,
    parse_polynomial,
    parse_system,
    smith_normal_form,
    support,
)
from polytrace.errors import DimensionMismatch, DivisionByZero, ParseError, SingularLattice, SingularMatrix


def poly(text, names=("x", "y")):
    return parse_polynomial(text, list(names))


# evaluation


def test_unit_circle_point():
    assert eval_poly(poly("x^2 + y^2 - 1"), [1, 0]) == 0


def test_remaining_minor_value():
    F = load("minors.txt")
    assert eval_poly(F.polys[1], [-13 / 14, 3 / 14]) == pytest.approx(-963 / 98, rel=1e-13)


def test_laurent_monomial():
    assert eval_poly(poly("x*y^-1"), [6, 3]) == pytest.approx(2)


def test_negative_exponent_at_zero():
    with pytest.raises(DivisionByZero):
        eval_poly(poly("x^-1 + y"), [0, 1])


def test_wrong_length_point():
    with pytest.raises(DimensionMismatch):
        eval_poly(poly("x + y"), [1])


def test_jacobian_small_cases():
    F = LaurentSystem([parse_polynomial("x^2 - 1", ["x"])])
    v, J = F.evaluate_with_jacobian(np.array([1.0]))
    assert v.tolist() == [0] and J.tolist() == [[2]]
    G = load("eq23.txt")
    v, J = G.evaluate_with_jacobian(np.array([1.0, 0.0]))
    assert np.allclose(v, 0) and np.allclose(J, [[2, 0], [2, -1]])
    assert np.allclose(eval_jacobian(G, [1.0, 0.0]), J)


def test_constant_has_zero_gradient():
    F = LaurentSystem([LaurentPolynomial.constant(2, 5), poly("x*y")])
    _, J = F.evaluate_with_jacobian(np.array([2.0, 3.0]))
    assert J[0].tolist() == [0, 0]


def test_compiled_matches_term_order_evaluation():
    F = load("reducible.txt")
    z = np.array([0.3 + 0.1j, -1.2, 2.5 - 0.4j])
    assert np.allclose(F.evaluate(z), [eval_poly(f, z) for f in F.polys], rtol=1e-13)


# supports


def test_supports_of_fixtures():
    f = load("ex35.txt")
    assert sorted(support(f.polys[0])) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert sorted(support(f.polys[1])) == [(0, 0), (1, 1), (1, 2), (2, 1)]
    assert support(LaurentPolynomial(2)) == []


def test_zero_coefficients_dropped():
    f = poly("x - x + y")
    assert support(f) == [(0, 1)]


# parsing and formatting


def test_parse_basics():
    assert len(poly("x^2 + y^2 - 1").terms) == 3
    assert poly("x^-1*y").terms == {(-1, 1): 1}
    f = poly("(2 + 3*i)*x")
    assert f.terms[(1, 0)] == 2 + 3j
    assert poly("1/3*x").terms[(1, 0)] == pytest.approx(1 / 3)


@pytest.mark.parametrize("text, line", [("variables x\nx +* 1\n", 2), ("x + 1\n", 1),
                                          ("variables x\nx + z\n", 2)])
def test_parse_errors_carry_location(text, line):
    with pytest.raises(ParseError) as err:
        parse_system(text)
    assert err.value.line == line


def test_parameters_header():
    parsed = parse_system((DATA / "circle_family.txt").read_text())
    assert parsed.variables == ("x", "y") and parsed.parameters == ("a", "b")
    assert parsed.system.nvars == 4


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.glob("*.txt")))
def test_format_round_trip_on_fixtures(name):
    parsed = parse_system((DATA / name).read_text())
    text = format_system(parsed)
    again = parse_system(text)
    assert format_system(again) == text
    for f, g in zip(parsed.system.polys, again.system.polys):
        assert f.almost_equal(g, 1e-15)


exponents = st.tuples(st.integers(-3, 4), st.integers(-3, 4))
coefficients = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False).filter(lambda c: c != 0)


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(exponents, coefficients, max_size=8))
def test_support_parse_format_identity(terms):
    f = LaurentPolynomial(2, terms)
    g = parse_polynomial(format_polynomial(f, ["x", "y"]), ["x", "y"])
    assert sorted(support(g)) == sorted(support(f))
    for e, c in f.terms.items():
        assert g.terms[e] == c


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(exponents, coefficients, max_size=6), st.dictionaries(exponents, coefficients, max_size=6),
       st.tuples(st.floats(0.5, 2), st.floats(-3, 3), st.floats(0.5, 2), st.floats(-3, 3)))
def test_evaluation_is_linear(a, b, pt):
    f, g = LaurentPolynomial(2, a), LaurentPolynomial(2, b)
    z = [pt[0] * np.exp(1j * pt[1]), pt[2] * np.exp(1j * pt[3])]
    lhs = eval_poly(f + g, z)
    rhs = eval_poly(f, z) + eval_poly(g, z)
    scale = max(1.0, sum(abs(c) * abs(np.prod(np.power(z, e))) for e, c in list(a.items()) + list(b.items())))
    assert abs(lhs - rhs) <= 1e-12 * scale


# linear algebra


def test_lu_solve_small():
    assert np.allclose(lu_solve(np.eye(3), [1, 2, 3]), [1, 2, 3])
    assert np.allclose(lu_solve([[2, 0], [0, 4]], [2, 8]), [1, 2])


def test_lu_solve_random_residual():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)) + 5 * np.eye(5)
    b = rng.standard_normal(5) + 0j
    x = lu_solve(A, b)
    assert np.linalg.norm(A @ x - b) <= 1e-12 * np.linalg.norm(b)


def test_lu_signals_singularity():
    with pytest.raises(SingularMatrix):
        lu_solve([[1, 2], [2, 4]], [1, 1])
    assert lu_factor([[1, 2], [2, 4]]).deficiency == 1


def test_lu_row_scaling_invariance():
    # a badly scaled but well conditioned matrix is not declared singular
    A = np.diag([1e-12, 1.0]) @ np.array([[1.0, 2.0], [3.0, 4.0]])
    x = lu_solve(A, A @ np.array([1.0, -1.0]))
    assert np.allclose(x, [1, -1])


# lattice


def test_snf_small_cases():
    X, D, Y = smith_normal_form([[1, 0], [0, 1]])
    assert D == [[1, 0], [0, 1]]
    _, D, _ = smith_normal_form([[2, 0], [0, 3]])
    assert D == [[1, 0], [0, 6]]
    _, D, _ = smith_normal_form([[2, 0], [1, 2]])
    assert D[0][0] * D[1][1] == 4


def test_snf_singular():
    with pytest.raises(SingularLattice):
        smith_normal_form([[1, 2], [2, 4]])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_snf_properties(A):
    det = integer_det(A)
    if det == 0:
        with pytest.raises(SingularLattice):
            smith_normal_form(A)
        return
    X, D, Y = smith_normal_form(A)
    n = len(A)
    prod = [[sum(X[i][k] * A[k][l] * Y[l][j] for k in range(n) for l in range(n)) for j in range(n)]
            for i in range(n)]
    assert prod == D
    d = [D[i][i] for i in range(n)]
    assert all(v > 0 for v in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(n - 1))
    assert abs(integer_det(X)) == 1 == abs(integer_det(Y))
    assert np.prod(d) == abs(det)


def test_integer_det_matches_float():
    rng = np.random.default_rng(5)
    for _ in range(50):
        A = rng.integers(-9, 10, (4, 4))
        assert integer_det(A.tolist()) == round(np.linalg.det(A))
