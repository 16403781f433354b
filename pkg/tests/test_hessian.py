import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hessesphere.hessian import (PolyMatrix, _det_bareiss, _det_cofactor, det_exact, det_poly, hessian_det,
                                 hessian_det_at, inertia, twisted_det, u_of_f, u_of_f_at)
from hessesphere.polyring import Poly, parse_poly, substitute_affine
from conftest import unimodular

X = sympy.symbols("x1:10")


def sym(p: Poly):
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod(x ** e for x, e in zip(X, ex))
                            for ex, c in p.terms.items()))


@st.composite
def homogeneous(draw, nvars=3):
    k = draw(st.integers(2, 4))
    rng = random.Random(draw(st.integers(0, 10 ** 6)))
    terms = {}
    for _ in range(rng.randint(1, 5)):
        cut = sorted(rng.randint(0, k) for _ in range(nvars - 1))
        ex = tuple(b - a for a, b in zip([0] + cut, cut + [k]))
        terms[ex] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    P = Poly.from_terms(nvars, terms)
    return (P if not P.is_zero() else Poly.var(0, nvars) ** k), k


def test_u_of_f_examples():
    F = parse_poly("x1*x2*x3")
    assert u_of_f(F) == parse_poly("3*x1^2*x2^2*x3^2")
    G = parse_poly("x1^2 + x2^2")
    assert u_of_f(G) == parse_poly("8*x1^2 + 8*x2^2")


def test_hessian_det_matches_sympy():
    for text in ["x1*x2*x3 + x1^3", "x1^2*(x2^2 + x3^2)^2", "x1*x2^2 - x3^4 + x2*x3"]:
        F = parse_poly(text, 3)
        H = sympy.hessian(sym(F), X[:3]).det()
        assert sympy.expand(H - sym(hessian_det(F))) == 0


def test_point_evaluations_agree_with_symbolic():
    F = parse_poly("x1^2*x3 + x2^3 - x1*x2*x3 + 2")
    pt = [Fraction(1, 2), -3, Fraction(5, 3)]
    assert hessian_det_at(F, pt) == hessian_det(F).eval(pt)
    assert u_of_f_at(F, pt) == u_of_f(F).eval(pt)


def test_bareiss_and_cofactor_agree():
    rng = random.Random(5)
    n = 4
    xs = Poly.gens(n)
    rows = [[xs[rng.randrange(n)] * rng.randint(-2, 2) + Poly.const(rng.randint(-3, 3), n) for _ in range(5)]
            for _ in range(5)]
    assert _det_bareiss(rows, n) == _det_cofactor(rows, n)
    assert det_poly(PolyMatrix(rows)) == _det_cofactor(rows, n)


def test_det_exact_matches_fraction_sympy():
    rng = random.Random(1)
    for n in range(1, 7):
        M = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)] for _ in range(n)]
        assert det_exact(M) == Fraction(str(sympy.Matrix(M).det()))
    assert det_exact([]) == 1
    assert det_exact([[0, 1], [0, 2]]) == 0


def test_twisted_det_at_zero_twist_is_hessian():
    F = parse_poly("x1^2*x2 + x3^2")
    assert twisted_det(F, 0) == hessian_det(F)


def test_inertia_counts():
    assert inertia([[2, 0], [0, -3]]) == (1, 1, 0)
    assert inertia([[0, 0], [0, 1]]) == (1, 0, 1)


# -- properties -------------------------------------------------------------------------

@given(homogeneous())
def test_euler_identity(Pk):
    P, k = Pk
    euler = sum((Poly.var(i, 3) * P.diff(i) for i in range(3)), Poly.zero(3))
    assert euler == P.scale(k)


@given(homogeneous())
def test_u_identity_for_homogeneous(Pk):
    # (lam - 1) U(F) = lam F H(F)
    P, k = Pk
    assert u_of_f(P).scale(k - 1) == (P * hessian_det(P)).scale(k)


@given(homogeneous())
def test_hessian_euler_bookkeeping(Pk):
    # x^p d_p H(F) = (n+1)(lam - 2) H(F)
    P, k = Pk
    H = hessian_det(P)
    lhs = sum((Poly.var(i, 3) * H.diff(i) for i in range(3)), Poly.zero(3))
    assert lhs == H.scale(3 * (k - 2))


@given(st.integers(0, 10 ** 6), unimodular())
def test_affine_covariance(seed, g):
    rng = random.Random(seed)
    terms = {tuple(rng.randint(0, 2) for _ in range(3)): rng.randint(-3, 3) for _ in range(4)}
    F = Poly.from_terms(3, terms)
    shift = [Fraction(rng.randint(-2, 2)) for _ in range(3)]
    gF = substitute_affine(F, g, shift)
    assert hessian_det(gF) == substitute_affine(hessian_det(F), g, shift)
    assert u_of_f(gF) == substitute_affine(u_of_f(F), g, shift)


def test_affine_covariance_scales_by_det_squared():
    F = parse_poly("x1*x2*x3 + x1^2")
    L = [[2, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert hessian_det(substitute_affine(F, L)) == substitute_affine(hessian_det(F), L).scale(4)
