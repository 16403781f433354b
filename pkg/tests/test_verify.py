import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hessesphere.hessian import hessian_det, twisted_det, u_of_f
from hessesphere.polyring import Poly, RationalFn, parse_poly, substitute_affine
from hessesphere.verify import (CONSTANT, EXACT, EXPONENTIAL, PROBABILISTIC, HomogeneityClass, Relation,
                                check_level_constancy, classify_homogeneity, exponent_lemma_holds,
                                infer_kappa_pit, infer_power_relation, verify_exponential_relation,
                                verify_power_relation_pit, verify_rational_relation)
from conftest import unimodular


def test_infer_coordinate_product():
    r = infer_power_relation(parse_poly("x1*x2*x3"))
    assert (r.kind, r.kappa, r.m, r.mode) == ("power", 2, 1, EXACT)
    assert r.in_family


def test_infer_zero_hessian():
    r = infer_power_relation(parse_poly("x1 + x2"))
    assert r.kind == CONSTANT and r.kappa == 0


def test_cube_of_a_line_has_no_integer_exponent():
    # H(x1^3) = 6 x1 = 6 P^(1/3)
    assert infer_power_relation(parse_poly("x1^3")) is None


def test_relation_outside_integer_family_is_flagged():
    r = infer_power_relation(parse_poly("x1^2*x2"))
    assert r is None or not r.in_family or exponent_lemma_holds(3, 2, r.m)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        infer_power_relation(Poly.zero(2))


def test_exponent_lemma():
    assert exponent_lemma_holds(3, 3, 1)
    assert exponent_lemma_holds(4, 4, 2)
    assert not exponent_lemma_holds(3, 3, 2)


def test_pit_certificate_and_refutation():
    P = parse_poly("x1*(x2^2 + x3^2)")
    ok = verify_power_relation_pit(P, -8, 1, trials=12, seed=7)
    assert ok.holds and ok.mode == PROBABILISTIC and ok.failure_bound < Fraction(1, 10 ** 100)
    bad = verify_power_relation_pit(P, 8, 1, trials=12, seed=7)
    assert not bad.holds and bad.witness is not None
    pt = bad.witness
    from hessesphere.hessian import hessian_det_at
    assert hessian_det_at(P, pt) != 8 * P.eval(pt)


def test_pit_is_deterministic_per_seed():
    P = parse_poly("x1*x2*x3")
    a = verify_power_relation_pit(P, 3, 1, trials=5, seed=11)
    b = verify_power_relation_pit(P, 3, 1, trials=5, seed=11)
    assert a.to_json() == b.to_json()
    with pytest.raises(ValueError):
        verify_power_relation_pit(P, 2, 1, trials=0)


def test_infer_kappa_pit():
    assert infer_kappa_pit(parse_poly("x1*x2*x3*x4"), 2) == -3
    with pytest.raises(ArithmeticError):
        infer_kappa_pit(parse_poly("x1*x2*x3 + x1^2"), 1)


def test_exact_certificate_carries_no_trials():
    with pytest.raises(AssertionError):
        Relation("power", 1, 1, mode=EXACT, trials=3)


# -- exponential relation -----------------------------------------------------------

def test_exponential_paraboloid_constant_4():
    r = verify_exponential_relation(parse_poly("x3 - x1^2 - x2^2"), [0, 0, 1])
    assert (r.kind, r.kappa, r.m) == (EXPONENTIAL, 4, 3)


def test_exponential_cubic_constant_minus_1():
    r = verify_exponential_relation(parse_poly("1/3*x1^3 - x1*x2 + x3"), [0, 0, 1])
    assert r.kappa == -1


def test_exponential_requires_translation_direction():
    with pytest.raises(ValueError):
        verify_exponential_relation(parse_poly("x3^2 - x1"), [0, 0, 1])
    with pytest.raises(ValueError):
        verify_exponential_relation(parse_poly("x3 - x1"), [0, 1])


def test_exponential_nonconstant_twisted_det():
    assert verify_exponential_relation(parse_poly("x3 - x1^3 - x2^2"), [0, 0, 1]) is None


@pytest.mark.parametrize("seed", range(10))
def test_improper_graph_equivalence_on_random_quadratics(seed):
    # P = x_{n+1} - f(x) with f quadratic: det(hess P + dP dP) is the constant (-1)^n H(f)
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    N = n + 1
    f = Poly.zero(N)
    for i in range(n):
        for j in range(i, n):
            f = f + (Poly.var(i, N) * Poly.var(j, N)).scale(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        f = f + Poly.var(i, N).scale(rng.randint(-3, 3))
    P = Poly.var(n, N) - f
    Hf = hessian_det(Poly.from_terms(n, {ex[:n]: c for ex, c in f.terms.items()}))
    C = twisted_det(P, 1)
    assert C.is_constant()
    assert C.constant_value() * (-1) ** n == Hf.constant_value()
    if Hf.constant_value() != 0:
        r = verify_exponential_relation(P, [0] * n + [1])
        assert r.kappa == C.constant_value()
    else:
        assert verify_exponential_relation(P, [0] * n + [1]) is None


# -- level constancy / homogeneity --------------------------------------------------

def test_level_constancy():
    P = parse_poly("x2^2*x3^2 + 18*x1*x2*x3*x4 - 4*x1*x3^3 - 4*x2^3*x4 - 27*x1^2*x4^2")
    assert check_level_constancy(u_of_f(P), P)
    assert not check_level_constancy(parse_poly("x1", 4), P)
    u = RationalFn(P * P, parse_poly("1", 4))
    assert check_level_constancy(u, P)


def test_homogeneity_classes():
    F = parse_poly("x1*x2*x3")
    assert classify_homogeneity(F, HomogeneityClass(3, 0, 0, [0, 0, 0]))
    assert not classify_homogeneity(F, HomogeneityClass(2, 0, 0, [0, 0, 0]))
    G = parse_poly("x3 - x1^2 - x2^2")
    # G is translationally homogeneous, not in any of these dilation classes
    assert not classify_homogeneity(G, HomogeneityClass(0, 1, 0, [0, 0, 0]))
    assert not classify_homogeneity(G, HomogeneityClass(1, 0, 0, [0, 0, 0]))
    assert classify_homogeneity(parse_poly("(x1 - 1)*(x2 - 2)"), HomogeneityClass(2, 0, 0, [1, 2]))
    with pytest.raises(ValueError):
        HomogeneityClass(1, 1, 0)
    with pytest.raises(ValueError):
        HomogeneityClass(0, 0, 2)


def test_rational_relation_small():
    # u = x1^2/x2: H(u) = det [[2/x2, -2x1/x2^2], [-2x1/x2^2, 2x1^2/x2^3]] = 0
    u = RationalFn(parse_poly("x1^2", 2), parse_poly("x2", 2))
    assert verify_rational_relation(u, 0, 0).holds
    v = RationalFn(parse_poly("1", 2), parse_poly("x1*x2", 2))
    # H(1/(x1 x2)) = 3/(x1 x2)^4
    assert verify_rational_relation(v, 3, 4).holds
    assert not verify_rational_relation(v, 2, 4).holds


@given(st.sampled_from(["x1*x2*x3", "x1*(x2^2 + x3^2)", "x1^2*x2^2*x3^2", "x1^2*(x2^2 + x3^2)^2"]), unimodular())
def test_relation_is_affine_invariant(text, g):
    P = parse_poly(text)
    gP = substitute_affine(P, g, [1, -1, 0])
    assert infer_power_relation(gP).same_identity(infer_power_relation(P))
