"""Explicit polynomial and rational solutions of H(P) = kappa*P^m, each with its expected relation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from .polyring import Poly, RationalFn, homogeneity, parse_poly, product
from .verify import (CONSTANT, DEFAULT_SEED, DEFAULT_TRIALS, POWER, Relation, constant_ratio,
                     infer_power_relation, verify_power_relation_pit, verify_rational_relation)
from .hessian import hessian_det

FIXTURES = Path(__file__).with_name("fixtures.json")

# exact symbolic verification is used up to this many variables
EXACT_MAX_VARS = 9


@dataclass
class CatalogEntry:
    id: str
    poly: Union[Poly, RationalFn]
    expected: Relation
    citation: str
    params: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def is_rational(self) -> bool:
        return isinstance(self.poly, RationalFn)

    def exact_feasible(self) -> bool:
        return not self.is_rational() and self.nvars <= EXACT_MAX_VARS


def load_fixtures() -> dict:
    return json.loads(FIXTURES.read_text())


def pinned_kappa(key: str) -> Fraction:
    return Fraction(load_fixtures()["pinned_kappa"][key]["kappa"])


def rel(kappa, m, kind=POWER) -> Relation:
    return Relation(kind, Fraction(kappa), m)


def certify(entry: CatalogEntry, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> Relation:
    """Verify the expected relation: exact when feasible, PIT otherwise."""
    exp = entry.expected
    if entry.is_rational():
        return verify_rational_relation(entry.poly, exp.kappa, exp.m, trials=trials, seed=seed)
    if entry.exact_feasible():
        H = hessian_det(entry.poly)
        if exp.kind == CONSTANT:
            return Relation(CONSTANT, 0, 0, holds=H.is_zero(), note="zero Hessian")
        found = infer_power_relation(entry.poly, H)
        if found is None:
            return Relation(POWER, exp.kappa, exp.m, holds=False, note="no relation found")
        found.holds = found.same_identity(exp)
        return found
    return verify_power_relation_pit(entry.poly, exp.kappa, exp.m, trials=trials, seed=seed)


# ---------------------------------------------------------------------------
# basic families

def coordinate_product(n: int) -> CatalogEntry:
    if n < 2:
        raise ValueError("coordinate_product needs n >= 2")
    P = product(Poly.gens(n), n)
    return CatalogEntry(f"coordinate_product_{n}", P, rel((-1) ** (n - 1) * (n - 1), n - 2),
                        "product of coordinates: H(F) = (-1)^(n-1) (n-1) F^(n-2)", {"n": n})


TABLE_ROWS = [
    # id, text, kappa for eps=+1, m, scales with eps
    ("sum_of_squares_2", "x1^2 + x2^2", 4, 0, True),
    ("hyperbolic_2", "x1*x2", -1, 0, False),
    ("square_product_2", "x1^2*x2^2", -12, 1, True),
    ("sum_of_squares_2_squared", "(x1^2 + x2^2)^2", 48, 1, True),
    ("coordinate_product_3", "x1*x2*x3", 2, 1, False),
    ("line_times_sum_of_squares", "x1*(x2^2 + x3^2)", -8, 1, False),
    ("coordinate_product_3_squared", "x1^2*x2^2*x3^2", 40, 2, False),
    ("line_sq_times_sum_of_squares_sq", "x1^2*(x2^2 + x3^2)^2", -160, 2, False),
]


def table_small(eps: int = 1) -> List[CatalogEntry]:
    """The eight small solutions with n+1 <= 3 and k <= 6; eps multiplies the signed rows.

    The expected constant for eps*F is derived, not copied: H(eps*F) = eps^(n+1) H(F)
    gives kappa(eps*F) = eps^(n+1-m) kappa(F).
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    out = []
    for rid, text, kappa, m, signed in TABLE_ROWS:
        P = parse_poly(text)
        e = eps if signed else 1
        if e == -1:
            P = -P
        n1 = P.nvars
        k = kappa * e ** (n1 - m)
        tag = f"table_{rid}" + ("_neg" if e == -1 else "")
        out.append(CatalogEntry(tag, P, rel(k, m),
                                f"small solution with n+1={n1}, m={m}", {"eps": e, "table_kappa": kappa * e}))
    return out


def binary_cubic_discriminant() -> CatalogEntry:
    P = parse_poly("x2^2*x3^2 + 18*x1*x2*x3*x4 - 4*x1*x3^3 - 4*x2^3*x4 - 27*x1^2*x4^2")
    return CatalogEntry("binary_cubic_discriminant", P, rel(2 ** 4 * 3 ** 5, 2),
                        "discriminant of the binary cubic form: H(P) = 2^4 3^5 P^2")


def _cmul(p, q):
    return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])


def binary_cubic_discriminant_su11() -> CatalogEntry:
    """|z2|^4 + 18|z1|^2|z2|^2 - 27|z1|^4 - 8 Re(z1 conj(z2)^3), z1 = x1 + i x2, z2 = x3 + i x4.

    Built from the complex expression; expanding by hand is error prone.
    """
    x1, x2, x3, x4 = Poly.gens(4)
    a, b = x1 * x1 + x2 * x2, x3 * x3 + x4 * x4
    zb2 = (x3, -x4)
    cube = _cmul(zb2, _cmul(zb2, zb2))
    re = _cmul((x1, x2), cube)[0]
    P = b * b + (a * b).scale(18) - (a * a).scale(27) - re.scale(8)
    return CatalogEntry("binary_cubic_discriminant_su11", P, rel(2 ** 8 * 3 ** 5, 2),
                        "SU(1,1) real form of the cubic discriminant: H(P) = 2^8 3^5 P^2")


def cayley_hyperdeterminant_222() -> CatalogEntry:
    P = parse_poly(
        "x1^2*x8^2 + x2^2*x7^2 + x3^2*x6^2 + x4^2*x5^2"
        " + 4*(x1*x5*x6*x7 + x2*x3*x4*x8)"
        " - 2*(x1*x2*x7*x8 + x1*x3*x6*x8 + x1*x4*x5*x8 + x2*x3*x6*x7 + x2*x4*x5*x7 + x3*x4*x5*x6)")
    return CatalogEntry("cayley_hyperdeterminant_222", P, rel(2 ** 8 * 3, 4),
                        "hyperdeterminant of a 2x2x2 tensor: H(P) = 2^8 3 P^4")


def det3(rows: List[List[Poly]]) -> Poly:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def hyperdeterminant_223_poly() -> Poly:
    """Q = X123*X234 - X124*X134 in the 3x3 minors of the 4x3 matrix (x_abi), row 2a+b-2."""
    xs = Poly.gens(12)

    def x(a, b, i):
        # variable order: x111, x112, x113, x121, ..., x223
        return xs[((a - 1) * 2 + (b - 1)) * 3 + (i - 1)]

    rows = {}
    for a in (1, 2):
        for b in (1, 2):
            rows[2 * a + b - 2] = [x(a, b, i) for i in (1, 2, 3)]

    def minor(r1, r2, r3):
        return det3([rows[r1], rows[r2], rows[r3]])

    return minor(1, 2, 3) * minor(2, 3, 4) - minor(1, 2, 4) * minor(1, 3, 4)


def hyperdeterminant_223() -> CatalogEntry:
    Q = hyperdeterminant_223_poly()
    return CatalogEntry("hyperdeterminant_223", Q, rel(pinned_kappa("hyperdeterminant_223"), 8),
                        "hyperdeterminant of a 2x2x3 tensor; m = 12*(6-2)/6 = 8, kappa pinned")


def general_det3() -> CatalogEntry:
    xs = Poly.gens(9)
    P = det3([xs[0:3], xs[3:6], xs[6:9]])
    return CatalogEntry("matrix_det_3", P, rel(-2, 3), "determinant of a general 3x3 matrix: H(P) = -2 P^3")


def _quat_mul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


def _conj(p):
    return (p[0],) + tuple(-c for c in p[1:])


def hermitian_det3_poly(kind: str) -> Poly:
    """x1x2x3 - x1|z2|^2 - x2|z3|^2 - x3|z1|^2 + 2 Re(conj(z1)(conj(z2) z3)).

    z_i has 1, 2 or 4 real coordinates (real, complex, quaternion), listed after x1, x2, x3.
    """
    width = {"real": 1, "complex": 2, "quaternion": 4}[kind]
    n = 3 + 3 * width
    xs = Poly.gens(n)
    zero = Poly(n)

    def z(i):
        comps = xs[3 + i * width: 3 + (i + 1) * width]
        return tuple(comps) + (zero,) * (4 - width)

    def norm2(q):
        out = zero
        for c in q:
            out = out + c * c
        return out

    z1, z2, z3 = z(0), z(1), z(2)
    x1, x2, x3 = xs[:3]
    triple = _quat_mul(_conj(z1), _quat_mul(_conj(z2), z3))
    return (x1 * x2 * x3 - x1 * norm2(z2) - x2 * norm2(z3) - x3 * norm2(z1)
            + triple[0].scale(2))


def hermitian_det3(kind: str) -> CatalogEntry:
    P = hermitian_det3_poly(kind)
    if kind == "complex":
        expected = rel(128, 3)
        cite = "determinant of a 3x3 complex Hermitian matrix: H(P) = 128 P^3"
    elif kind == "real":
        expected = rel(pinned_kappa("hermitian_det3_real"), 2)
        cite = "determinant of a 3x3 real symmetric matrix; kappa pinned"
    elif kind == "quaternion":
        expected = rel(pinned_kappa("hermitian_det3_quaternion"), 5)
        cite = "determinant of a 3x3 quaternion Hermitian matrix; kappa pinned"
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return CatalogEntry(f"hermitian_det3_{kind}", P, expected, cite, {"kind": kind})


def pfaffian(X: List[List[Poly]], nvars: int) -> Poly:
    """Pfaffian by expansion along the first row."""
    n = len(X)
    if n == 0:
        return Poly.const(1, nvars)
    if n % 2:
        return Poly(nvars)
    total = Poly(nvars)
    for j in range(1, n):
        if X[0][j].is_zero():
            continue
        keep = [r for r in range(1, n) if r != j]
        sub = [[X[a][b] for b in keep] for a in keep]
        term = X[0][j] * pfaffian(sub, nvars)
        total = total + term if j % 2 == 1 else total - term
    return total


def e6_split_cubic_poly() -> Poly:
    """pfaff(X) + u^t X v for skew 6x6 X (15 vars, upper triangle row-major), u, v in R^6."""
    n = 27
    xs = Poly.gens(n)
    zero = Poly(n)
    X = [[zero] * 6 for _ in range(6)]
    idx = 0
    for i, j in combinations(range(6), 2):
        X[i][j] = xs[idx]
        X[j][i] = -xs[idx]
        idx += 1
    u = xs[15:21]
    v = xs[21:27]
    bil = zero
    for i in range(6):
        for j in range(6):
            if i != j:
                bil = bil + u[i] * X[i][j] * v[j]
    return pfaffian(X, n) + bil


def e6_split_cubic() -> CatalogEntry:
    return CatalogEntry("e6_split_cubic", e6_split_cubic_poly(), rel(2, 9),
                        "invariant cubic of the split E6 representation: H(P) = 2 P^9")


def syzygetic_poly(a, b) -> Poly:
    a, b = Fraction(a), Fraction(b)
    xs = Poly.gens(3)
    cubes = xs[0] ** 3 + xs[1] ** 3 + xs[2] ** 3
    return cubes.scale(a / 6) + (xs[0] * xs[1] * xs[2]).scale(b)


def syzygetic(a, b) -> CatalogEntry:
    """P_{a,b} = (a/6)(x1^3+x2^3+x3^3) + b x1x2x3.

    Direct expansion gives H(P_{a,b}) = P_{-6ab^2, a^3+2b^3}.
    """
    a, b = Fraction(a), Fraction(b)
    P = syzygetic_poly(a, b)
    Hp = syzygetic_poly(-6 * a * b * b, a ** 3 + 2 * b ** 3)
    c = constant_ratio(Hp, P) if not P.is_zero() else None
    expected = rel(c, 1) if c is not None else Relation(POWER, 0, 1, holds=False,
                                                        note="H(P) is not a multiple of P")
    return CatalogEntry(f"syzygetic_{a}_{b}".replace("/", "_"), P, expected,
                        "syzygetic pencil of ternary cubics", {"a": a, "b": b, "hessian_image": Hp})


def vinberg_cone_pair() -> Tuple[CatalogEntry, CatalogEntry]:
    d = parse_poly("x1*x3*x5 - x1*x4^2 - x2^2*x3", 5)
    u = RationalFn(d ** 4, parse_poly("x1*x3", 5))
    w = parse_poly("x1*x5 - x2^2", 5) * parse_poly("x3*x5 - x4^2", 5)
    v = RationalFn(w ** 3, parse_poly("x5^2", 5))
    return (CatalogEntry("vinberg_u", u, rel(3 ** 4 * 2 ** 8, 4),
                         "characteristic-function power on the Vinberg cone: H(u) = 3^4 2^8 u^4"),
            CatalogEntry("vinberg_v", v, rel(2 ** 4 * 3 ** 6, 4),
                         "dual-cone counterpart, normalised to constant 1: H(v) = 2^4 3^6 v^4"))


def r_pq(p: int, q: int) -> CatalogEntry:
    """prod (x_{2i-1}^2 + x_{2i}^2) * prod (x^2 - y^2) with p and q factors."""
    n = 2 * p + 2 * q
    if n < 2:
        raise ValueError("need p + q >= 1")
    xs = Poly.gens(n)
    P = Poly.const(1, n)
    for i in range(p):
        P = P * (xs[2 * i] ** 2 + xs[2 * i + 1] ** 2)
    for j in range(q):
        P = P * (xs[2 * p + 2 * j] ** 2 - xs[2 * p + 2 * j + 1] ** 2)
    size = (2 * p + 2 * q - 1) * 2 ** (2 * p + 2 * q)
    # the sign is (-1)^(p+1): R_{1,0} = x1^2 + x2^2 has H = +4
    kappa = (-1) ** (p + 1) * size
    return CatalogEntry(f"r_{p}_{q}", P, rel(kappa, 2 * p + 2 * q - 2),
                        "product of definite and split binary quadrics",
                        {"p": p, "q": q, "stated_kappa": (-1) ** p * size})


def misc_examples() -> List[CatalogEntry]:
    out = [
        CatalogEntry("dv_quadric_graph_power", parse_poly("x4^2*(2*x1 - x2^2 - x3^2)^4"), rel(-2 ** 11 * 5, 3),
                     "locally homogeneous convex example: H(F) = -2^11 5 F^3"),
        CatalogEntry("dv_two_parabolas", parse_poly("(2*x1 - x2^2)^3*(2*x3 - x4^2)^3"), rel(-2 ** 6 * 3 ** 4 * 5, 3),
                     "locally homogeneous convex example: H(F) = -2^6 3^4 5 F^3"),
        CatalogEntry("dv_parabola_planes", parse_poly("(2*x1 - x2^2)^3*x3^2*x4^2"), rel(-2 ** 6 * 3 ** 3, 3),
                     "locally homogeneous convex example: H(F) = -2^6 3^3 F^3"),
        CatalogEntry("line_sq_times_parabola_cubed", parse_poly("x1^2*(x3 - x2^2)^3"), rel(144, 2),
                     "nonhomogeneous solution whose levels are not affine spheres: H(F) = 144 F^2"),
        CatalogEntry("calabi_product_quadric", parse_poly("x1^2*(x2^2 - x3^2 - x4^2)^3"), rel(-3024, 3),
                     "x1^2 tensor (x2^2-x3^2-x4^2)^3: H(R) = -3024 R^3"),
        r_pq(1, 1),
        CatalogEntry("graph_power_paraboloid", parse_poly("(x3 - x1^2 - x2^2)^4"), rel(768, 2),
                     "(x3 - (x1^2+x2^2))^4, nonhomogeneous: H(Q) = 768 Q^2"),
        CatalogEntry("gordan_noether", parse_poly("x1^2*x3 + x1*x2*x4 + x2^2*x5"), Relation(CONSTANT, 0, 0),
                     "irreducible quintic-variable cubic with vanishing Hessian"),
        CatalogEntry("modulus_square_triple_product",
                     parse_poly("(x1^2 + x2^2)*(x3^2 + x4^2)*(x5^2 + x6^2)"), rel(320, 4),
                     "|z1 z2 z3|^2 in real coordinates: H = 320 |P|^8"),
    ]
    return out


BUILDERS: Dict[str, Callable[[], CatalogEntry]] = {}


def _register():
    for n in range(2, 7):
        BUILDERS[f"coordinate_product_{n}"] = (lambda n=n: coordinate_product(n))
    for eps in (1, -1):
        for e in table_small(eps):
            BUILDERS.setdefault(e.id, (lambda eid=e.id, eps=eps: next(x for x in table_small(eps) if x.id == eid)))
    for fn in (binary_cubic_discriminant, binary_cubic_discriminant_su11, cayley_hyperdeterminant_222,
               hyperdeterminant_223, general_det3, e6_split_cubic):
        BUILDERS[fn().id if fn is not hyperdeterminant_223 else "hyperdeterminant_223"] = fn
    for kind in ("real", "complex", "quaternion"):
        BUILDERS[f"hermitian_det3_{kind}"] = (lambda kind=kind: hermitian_det3(kind))
    BUILDERS["vinberg_u"] = lambda: vinberg_cone_pair()[0]
    BUILDERS["vinberg_v"] = lambda: vinberg_cone_pair()[1]
    BUILDERS["syzygetic_6_-3"] = lambda: syzygetic(6, -3)
    BUILDERS["syzygetic_0_1"] = lambda: syzygetic(0, 1)
    for e in misc_examples():
        BUILDERS.setdefault(e.id, (lambda eid=e.id: next(x for x in misc_examples() if x.id == eid)))


def catalog_ids() -> List[str]:
    if not BUILDERS:
        _register()
    return sorted(BUILDERS)


@lru_cache(maxsize=None)
def get(entry_id: str) -> CatalogEntry:
    if not BUILDERS:
        _register()
    if entry_id in BUILDERS:
        return BUILDERS[entry_id]()
    if entry_id.startswith("r_"):
        p, q = entry_id[2:].split("_")
        return r_pq(int(p), int(q))
    if entry_id.startswith("coordinate_product_"):
        return coordinate_product(int(entry_id.rsplit("_", 1)[1]))
    raise KeyError(f"unknown catalog id {entry_id!r}")


def homogeneous_degree(entry: CatalogEntry) -> Optional[int]:
    if entry.is_rational():
        return None
    k = homogeneity(entry.poly)
    return k if isinstance(k, int) else None
