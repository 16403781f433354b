from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hessesphere import catalog, construct
from hessesphere.construct import ConstructionError
from hessesphere.polyring import parse_poly, substitute_affine
from hessesphere.verify import Relation, infer_power_relation
from conftest import unimodular
from construct_cases import certify_independently, legal_cases


def rel(k, m):
    return Relation("power", k, m)


def test_power_of_quadric():
    P, r = construct.power(parse_poly("x1^2 + x2^2"), rel(4, 0), 2)
    assert P == parse_poly("(x1^2 + x2^2)^2") and (r.kappa, r.m) == (48, 1)


def test_power_rejects_illegal_exponent():
    with pytest.raises(ConstructionError):
        construct.power(parse_poly("x1*x2*x3"), rel(2, 1), 3)
    with pytest.raises(ConstructionError):
        construct.power(parse_poly("x1*x2"), rel(-1, 0), 0)


def test_compose_line_square_with_cubed_quadric():
    P, r = construct.tensor_compose(parse_poly("x1^2"), rel(2, 0), 1, parse_poly("x1^2 - x2^2 - x3^2"),
                                    rel(8, 0), 3)
    assert P == catalog.get("calabi_product_quadric").poly
    assert (r.kappa, r.m) == (-3024, 3)


def test_compose_checks_ratio_condition():
    with pytest.raises(ConstructionError):
        construct.tensor_compose(parse_poly("x1*x2"), rel(-1, 0), 2, parse_poly("x1*x2*x3"), rel(2, 1), 1)


def test_add_variable():
    P, r = construct.add_variable(parse_poly("x1*x2"), rel(-1, 0))
    assert P == parse_poly("x1*x2*x3") and (r.kappa, r.m) == (2, 1)
    with pytest.raises(ConstructionError):
        construct.add_variable(parse_poly("x1*x2"), rel(1, 0))
    with pytest.raises(ConstructionError):
        construct.add_variable(parse_poly("x1^2*x2"), rel(-1, 0))


def test_radial_graph():
    P, r = construct.radial_graph(parse_poly("x1*x2"), rel(-1, 0))
    assert r.holds and infer_power_relation(P).same_identity(r)
    with pytest.raises(ConstructionError):
        construct.radial_graph(parse_poly("x1*x2"), rel(0, 0))


def test_graph_power_matches_catalog_entry():
    P, r = construct.graph_power(parse_poly("x1^2 + x2^2"), 4)
    assert P == catalog.get("graph_power_paraboloid").poly and (r.kappa, r.m) == (768, 2)
    with pytest.raises(ConstructionError):
        construct.graph_power(parse_poly("x1^2 + x1*x2"), 3)
    with pytest.raises(ConstructionError):
        construct.graph_power(parse_poly("x1^2 + x2"), 2)


def test_graph_power_l_equals_n_plus_2():
    # l = n+2: kappa' = (-1)^n (n+2)^(n+1) (n+1) kappa, m = n
    _, r = construct.graph_power(parse_poly("x1*x2"), 4)
    assert (r.kappa, r.m) == (4 ** 3 * 3 * -1, 2)


def test_modulus_square_triple_product():
    re, im = construct.realify(parse_poly("x1*x2*x3"))
    P, r = construct.modulus_square(re, im, (2, 0), 3)
    assert (r.kappa, r.m) == (320, 4)
    assert P == catalog.get("modulus_square_triple_product").poly


def test_modulus_square_rejects_non_holomorphic_pair():
    with pytest.raises(ConstructionError):
        construct.modulus_square(parse_poly("x1^2", 2), parse_poly("x2^2", 2), (4, 0), 2)


def test_recertify_detects_wrong_prediction():
    with pytest.raises(ConstructionError):
        construct.recertify(parse_poly("x1*x2*x3"), rel(3, 1))


@pytest.mark.parametrize("label,build", legal_cases(), ids=[c[0] for c in legal_cases()])
def test_every_legal_instance_agrees(label, build):
    P, predicted = build()
    cert = certify_independently(P, predicted)
    assert cert is not None
    if cert.mode == "exact-symbolic":
        assert cert.same_identity(predicted), (label, cert.kappa, cert.m)
    else:
        assert cert.holds


ROOTS = [("x1^2 + x2^2", 2), ("x1*x2", 2), ("x1*x2*x3", 2), ("x1*(x2^2 + x3^2)", 2), ("x1^2 - x2^2", 2),
         ("x1^2*x2^2", 1), ("x1^2 + x2^2 + x3^2", 3)]


@given(st.sampled_from(ROOTS), st.data())
def test_power_roundtrip(case, data):
    text, s = case
    P = parse_poly(text)
    P = substitute_affine(P, data.draw(unimodular(P.nvars)))
    certified_power = infer_power_relation(P ** s)
    assert construct.root_relation(P, certified_power, s).same_identity(infer_power_relation(P))
