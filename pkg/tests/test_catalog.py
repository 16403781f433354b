from fractions import Fraction

import pytest
import sympy

from hessesphere import catalog
from hessesphere.hessian import hessian_det, u_of_f
from hessesphere.polyring import Poly, homogeneity
from hessesphere.verify import CONSTANT, EXACT, PROBABILISTIC, infer_kappa_pit

IDS = catalog.catalog_ids()


@pytest.mark.parametrize("entry_id", IDS)
def test_every_entry_certifies(entry_id):
    entry = catalog.get(entry_id)
    cert = catalog.certify(entry)
    assert cert.holds, cert.to_dict()
    if entry.exact_feasible():
        assert cert.mode == EXACT
    else:
        assert cert.mode == PROBABILISTIC and cert.trials >= 10


HOMOGENEOUS = [i for i in IDS if catalog.homogeneous_degree(catalog.get(i)) and catalog.get(i).nvars <= 6]


@pytest.mark.parametrize("entry_id", HOMOGENEOUS)
def test_homogeneous_entries_satisfy_euler_and_u_identities(entry_id):
    P = catalog.get(entry_id).poly
    k = homogeneity(P)
    n1 = P.nvars
    xs = Poly.gens(n1)
    assert sum((xs[i] * P.diff(i) for i in range(n1)), Poly.zero(n1)) == P.scale(k)
    H = hessian_det(P)
    assert u_of_f(P).scale(k - 1) == (P * H).scale(k)
    assert sum((xs[i] * H.diff(i) for i in range(n1)), Poly.zero(n1)) == H.scale(n1 * (k - 2))


def test_table_rows_kappa_pairs():
    got = sorted((e.expected.kappa, e.expected.m) for e in catalog.table_small(1))
    want = sorted([(4, 0), (-1, 0), (-12, 1), (48, 1), (2, 1), (-8, 1), (40, 2), (-160, 2)])
    assert got == want


def test_signed_rows_follow_sign_law():
    pos = {e.id: e for e in catalog.table_small(1)}
    for e in catalog.table_small(-1):
        if e.params["eps"] == -1:
            base = pos[e.id[:-len("_neg")]]
            n1, m = e.nvars, e.expected.m
            assert e.expected.kappa == base.expected.kappa * (-1) ** (n1 - m)
            assert catalog.certify(e).holds


def test_discriminant_against_sympy():
    x = sympy.symbols("x1:5")
    P = x[1]**2*x[2]**2 + 18*x[0]*x[1]*x[2]*x[3] - 4*x[0]*x[2]**3 - 4*x[1]**3*x[3] - 27*x[0]**2*x[3]**2
    H = sympy.hessian(P, x).det()
    assert sympy.expand(H - 2**4 * 3**5 * P**2) == 0


def test_pinned_constants_match_independent_ratio():
    fx = catalog.load_fixtures()["pinned_kappa"]
    for key in ("hyperdeterminant_223", "hermitian_det3_real", "hermitian_det3_quaternion"):
        entry = catalog.get(key)
        assert infer_kappa_pit(entry.poly, fx[key]["m"], points=4, seed=99) == Fraction(fx[key]["kappa"])


def test_r_pq_sign_formula():
    for p, q in [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]:
        e = catalog.r_pq(p, q)
        cert = catalog.certify(e)
        assert cert.holds and cert.kappa == (-1) ** (p + 1) * (2 * p + 2 * q - 1) * 2 ** (2 * p + 2 * q)
    # the stated sign (-1)^p disagrees at (1,1): +48 is certified
    assert catalog.get("r_1_1").params["stated_kappa"] == -48
    assert catalog.certify(catalog.get("r_1_1")).kappa == 48


def test_syzygetic_pencil_image():
    e = catalog.syzygetic(1, 2)
    assert hessian_det(e.poly) == e.params["hessian_image"]


def test_gordan_noether_has_zero_hessian():
    e = catalog.get("gordan_noether")
    assert e.expected.kind == CONSTANT and hessian_det(e.poly).is_zero()


def test_unknown_id():
    with pytest.raises(KeyError):
        catalog.get("no_such_entry")
    assert catalog.get("coordinate_product_7").nvars == 7
    assert catalog.get("r_2_1").nvars == 6
