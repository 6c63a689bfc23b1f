import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from akfronts.errors import DomainError, OrderExhausted
from akfronts.expr import eval_jet, evaluate, parse_expr
from akfronts.jet import Jet, directional_derivative, monomials, n_monomials

X, Y = sp.symbols("x y")


def sympy_coeffs(expr, point, order):
    """Scaled Taylor coefficients d^alpha f / alpha! in graded order."""
    out = []
    for alpha in monomials(2, order):
        d = expr
        if alpha[0]:
            d = sp.diff(d, X, alpha[0])
        if alpha[1]:
            d = sp.diff(d, Y, alpha[1])
        val = float(d.subs({X: point[0], Y: point[1]}))
        out.append(val / (math.factorial(alpha[0]) * math.factorial(alpha[1])))
    return np.array(out)


@pytest.mark.parametrize("text, sym", [
    ("x^3*y - 2*x*y^2 + 5", X**3 * Y - 2 * X * Y**2 + 5),
    ("sin(x)*cos(y)", sp.sin(X) * sp.cos(Y)),
    ("exp(x - y)/(1 + x^2)", sp.exp(X - Y) / (1 + X**2)),
    ("log(2 + x*y) + sqrt(3 + y)", sp.log(2 + X * Y) + sp.sqrt(3 + Y)),
    ("(x + 2*y)^-2", (X + 2 * Y) ** -2),
])
def test_jet_coefficients_match_sympy(text, sym):
    p = (0.3, -0.7)
    jet = eval_jet(parse_expr(text, ["x", "y"]), p, 6)
    np.testing.assert_allclose(jet.coeffs, sympy_coeffs(sym, p, 6), rtol=1e-11, atol=1e-12)


def test_monomial_table_is_graded():
    mons = monomials(3, 4)
    assert len(mons) == n_monomials(3, 4) == 35
    degrees = [sum(a) for a in mons]
    assert degrees == sorted(degrees)
    assert mons[0] == (0, 0, 0)


def test_partial_recovers_derivative():
    jet = eval_jet(parse_expr("x^4*y^3", ["x", "y"]), (1.0, 2.0), 7)
    # d^2/dx^2 d/dy at (1, 2): 12 x^2 * 3 y^2 = 144
    assert jet.partial((2, 1)) == pytest.approx(144.0)


def test_gradient_needs_order_one():
    jet = Jet.constant(1.0, np.zeros(2), 0)
    with pytest.raises(OrderExhausted):
        jet.gradient()
    with pytest.raises(OrderExhausted):
        jet.truncate(1)


def test_domain_errors_carry_positions():
    e = parse_expr("1 + log(x)", ["x"])
    with pytest.raises(DomainError) as info:
        eval_jet(e, [-1.0], 2)
    assert "column" in str(info.value)
    with pytest.raises(DomainError):
        eval_jet(parse_expr("1/x", ["x"]), [0.0], 2)


def test_mismatched_jets_refuse_to_mix():
    a = Jet.variable(0, np.zeros(2), 3)
    with pytest.raises(ValueError):
        a + Jet.variable(0, np.zeros(2), 4)
    with pytest.raises(ValueError):
        a * Jet.variable(0, np.ones(2), 3)


def test_batched_jets_match_pointwise():
    e = parse_expr("sin(x*y) + x^3", ["x", "y"])
    pts = np.array([[0.1, 0.2], [-0.4, 1.3], [2.0, -0.5]])
    batch = eval_jet(e, pts, 5)
    for i, p in enumerate(pts):
        np.testing.assert_allclose(batch.coeffs[i], eval_jet(e, p, 5).coeffs, rtol=1e-13)


def test_compose_matches_direct_evaluation():
    # g(u, v) = u^2 v + sin(u); inner (u, v) = (1 + s + s t, 2 - t + s^2)
    g = parse_expr("u^2*v + sin(u)", ["u", "v"])
    outer = eval_jet(g, (1.0, 2.0), 5)
    s = Jet.variable(0, np.zeros(2), 5)
    t = Jet.variable(1, np.zeros(2), 5)
    inner = [1.0 + s + s * t, 2.0 - t + s * s]
    direct = evaluate(g, inner)
    np.testing.assert_allclose(outer.compose(inner).coeffs, direct.coeffs, atol=1e-13)


def test_compose_requires_matching_base_point():
    outer = Jet.variable(0, np.array([1.0]), 3)
    with pytest.raises(ValueError):
        outer.compose([Jet.variable(0, np.array([0.0]), 3)])


def test_directional_derivative_of_linear_field():
    e = parse_expr("x^2*y", ["x", "y"])
    jet = eval_jet(e, (1.0, 3.0), 4)
    dd = directional_derivative(jet, [2.0, -1.0])
    # 2 * 2xy - x^2 = 11 at (1, 3)
    assert dd.value == pytest.approx(11.0)
    assert dd.order == 3


def test_complex_jets():
    e = parse_expr("exp(x)*y", ["x", "y"])
    p = np.array([0.5 + 0.2j, 1j])
    jet = eval_jet(e, p, 3, field="complex")
    assert jet.field == "complex"
    assert jet.value == pytest.approx(np.exp(p[0]) * p[1])


# -- algebraic properties ----------------------------------------------------

def random_jet(coeffs, order=4):
    return Jet(np.array([0.2, -0.1]), order, coeffs)


coeff_arrays = arrays(np.float64, n_monomials(2, 4),
                      elements=st.floats(-3, 3, allow_nan=False, allow_infinity=False))


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, coeff_arrays, coeff_arrays)
def test_ring_axioms(a, b, c):
    A, B, C = random_jet(a), random_jet(b), random_jet(c)
    np.testing.assert_allclose(((A * B) * C).coeffs, (A * (B * C)).coeffs, atol=1e-9)
    np.testing.assert_allclose((A * (B + C)).coeffs, (A * B + A * C).coeffs, atol=1e-9)
    np.testing.assert_allclose((A * B).coeffs, (B * A).coeffs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, coeff_arrays, st.integers(0, 1))
def test_leibniz_rule(a, b, i):
    A, B = random_jet(a), random_jet(b)
    lhs = (A * B).deriv(i)
    rhs = A.deriv(i) * B.truncate(3) + A.truncate(3) * B.deriv(i)
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, coeff_arrays)
def test_truncation_is_a_ring_map(a, b):
    A, B = random_jet(a), random_jet(b)
    np.testing.assert_allclose((A * B).truncate(2).coeffs,
                               (A.truncate(2) * B.truncate(2)).coeffs, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, st.floats(0.5, 4.0))
def test_reciprocal_inverts(a, shift):
    a = a.copy()
    a[0] = shift
    A = random_jet(a)
    one = (A * A.reciprocal()).coeffs
    expected = np.zeros_like(one)
    expected[0] = 1.0
    np.testing.assert_allclose(one, expected, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(coeff_arrays)
def test_compose_with_identity(a):
    A = random_jet(a)
    ident = [Jet.variable(i, A.point, 4) for i in range(2)]
    np.testing.assert_allclose(A.compose(ident).coeffs, A.coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2, 2))
def test_elementary_identities(x0, y0):
    p = np.array([x0, y0])
    x = Jet.variable(0, p, 6)
    y = Jet.variable(1, p, 6)
    s, c = y.apply("sin"), y.apply("cos")
    pyth = (s * s + c * c).coeffs
    np.testing.assert_allclose(pyth[1:], 0, atol=1e-12)
    assert pyth[0] == pytest.approx(1.0)
    np.testing.assert_allclose(x.apply("log").apply("exp").coeffs, x.coeffs, atol=1e-10)
    r = x.apply("sqrt")
    np.testing.assert_allclose((r * r).coeffs, x.coeffs, atol=1e-10)
