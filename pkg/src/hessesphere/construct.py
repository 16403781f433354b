"""Build new solutions from old: powers, products in disjoint variables, extra variables,
radial graphs, modulus squares of holomorphic solutions and powers of graphs."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .hessian import det_exact, second_derivatives
from .polyring import Poly, homogeneity, to_fraction
from .verify import (DEFAULT_SEED, DEFAULT_TRIALS, POWER, Relation, infer_power_relation,
                     verify_power_relation_pit)

EXACT_MAX_VARS = 9


class ConstructionError(ValueError):
    pass


def _degree(P: Poly) -> int:
    k = homogeneity(P)
    if not isinstance(k, int):
        raise ConstructionError("polynomial must be homogeneous and nonzero")
    return k


def recertify(P: Poly, predicted: Relation, trials: int = DEFAULT_TRIALS,
              seed: int = DEFAULT_SEED) -> Relation:
    """Independent certificate for P, compared with the prediction."""
    if P.nvars <= EXACT_MAX_VARS:
        found = infer_power_relation(P)
        if found is None or not found.same_identity(predicted):
            raise ConstructionError(f"prediction {predicted.kappa}, m={predicted.m} "
                                    f"disagrees with certified {found}")
        found.note = "predicted and certified exactly"
        return found
    cert = verify_power_relation_pit(P, predicted.kappa, predicted.m, trials, seed)
    if not cert.holds:
        raise ConstructionError(f"prediction refuted at {cert.witness}")
    return cert


def _finish(P, kappa, m, check):
    predicted = Relation(POWER, Fraction(kappa), m)
    return P, (recertify(P, predicted) if check else predicted)


def power(P: Poly, relation: Relation, q: int, check: bool = True) -> Tuple[Poly, Relation]:
    """P^q with kappa' = kappa q^(n+1) (qk-1)/(k-1), valid when qk divides 2(n+1)."""
    if q < 1:
        raise ConstructionError("q must be a positive integer")
    k = _degree(P)
    n1 = P.nvars
    if k < 2:
        raise ConstructionError("degree must be at least 2")
    if (2 * n1) % (q * k):
        raise ConstructionError(f"q*k = {q * k} does not divide 2(n+1) = {2 * n1}")
    if q == 1:
        return P, relation
    kappa = relation.kappa * Fraction(q) ** n1 * Fraction(q * k - 1, k - 1)
    m = n1 * (q * k - 2) // (q * k)
    return _finish(P ** q, kappa, m, check)


def root_relation(P: Poly, power_relation: Relation, s: int) -> Relation:
    """Relation of P predicted from a certified relation of P^s (P homogeneous of degree k).

    Inverts power(): kappa = kappa_s s^-(n+1) (k-1)/(ks-1), m = s m_s - (s-1)(n+1).
    """
    k = _degree(P)
    if k < 2 or s < 1:
        raise ConstructionError("need degree >= 2 and s >= 1")
    n1 = P.nvars
    kappa = power_relation.kappa / Fraction(s) ** n1 * Fraction(k - 1, k * s - 1)
    return Relation(POWER, kappa, s * power_relation.m - (s - 1) * n1)


def tensor_compose(P: Poly, relP: Relation, a: int, Q: Poly, relQ: Relation, b: int,
                   check: bool = True) -> Tuple[Poly, Relation]:
    """P^a(x) Q^b(y) in disjoint variables."""
    k, l = _degree(P), _degree(Q)
    if k < 2 or l < 2:
        raise ConstructionError("degrees must be at least 2")
    if a < 1 or b < 1:
        raise ConstructionError("a and b must be positive")
    mp1, np1 = P.nvars, Q.nvars
    if (2 * mp1) % (a * k):
        raise ConstructionError(f"a*k = {a * k} does not divide 2(m+1) = {2 * mp1}")
    if (2 * np1) % (b * l):
        raise ConstructionError(f"b*l = {b * l} does not divide 2(n+1) = {2 * np1}")
    if 2 * mp1 // (a * k) != 2 * np1 // (b * l):
        raise ConstructionError(f"2(m+1)/ak = {2 * mp1 // (a * k)} differs from 2(n+1)/bl = {2 * np1 // (b * l)}")
    N = mp1 + np1
    R = (P ** a).embed(N, 0) * (Q ** b).embed(N, mp1)
    kappa = (-relP.kappa * relQ.kappa * Fraction(a) ** mp1 * Fraction(b) ** np1
             * Fraction(a * k + b * l - 1, (k - 1) * (l - 1)))
    m = N * (a * k + b * l - 2) // (a * k + b * l)
    return _finish(R, kappa, m, check)


def add_variable(Q: Poly, relation: Relation, check: bool = True) -> Tuple[Poly, Relation]:
    """x_{n+1} Q for Q of degree n in n variables with kappa = (-1)^(n-1)(n-1), m = n-2."""
    n = Q.nvars
    if n < 2:
        raise ConstructionError("need at least two variables")
    if _degree(Q) != n:
        raise ConstructionError(f"Q must have degree {n}")
    need = Fraction((-1) ** (n - 1) * (n - 1))
    if relation.kappa != need or relation.m != n - 2:
        raise ConstructionError(f"relation kappa={relation.kappa}, m={relation.m} "
                                f"but kappa={need}, m={n - 2} is required")
    P = Q.embed(n + 1) * Poly.var(n, n + 1)
    return _finish(P, (-1) ** n * n, n - 1, check)


def radial_graph(P: Poly, relation: Relation, check: bool = True) -> Tuple[Poly, Relation]:
    """x_{n+2}^2 P^l with l = 2(n+1)/k; H = -2 kappa (2n+3) l^(n+1)/(k-1) Q^(n+1)."""
    k = _degree(P)
    n1 = P.nvars
    if relation.kappa == 0:
        raise ConstructionError("kappa must be nonzero")
    if k < 2:
        raise ConstructionError("degree must be at least 2")
    if (2 * n1) % k:
        raise ConstructionError(f"k = {k} does not divide 2(n+1) = {2 * n1}")
    l = 2 * n1 // k
    n = n1 - 1
    Q = (P ** l).embed(n1 + 1) * Poly.var(n1, n1 + 1) ** 2
    kappa = -2 * relation.kappa * (2 * n + 3) * Fraction(l) ** n1 / (k - 1)
    return _finish(Q, kappa, n1, check)


def graph_power(P: Poly, l: int, check: bool = True) -> Tuple[Poly, Relation]:
    """(x_{n+1} - P)^l for a nondegenerate quadratic form P in n variables."""
    from .hessian import hessian_det
    n = P.nvars
    if homogeneity(P) != 2:
        raise ConstructionError("P must be a quadratic form")
    H = hessian_det(P)
    if H.is_zero():
        raise ConstructionError("quadratic form is degenerate")
    kappa = H.constant_value()
    if l < 2 or (n + 2) % l:
        raise ConstructionError(f"l = {l} must be at least 2 and divide n+2 = {n + 2}")
    Q = (Poly.var(n, n + 1) - P.embed(n + 1)) ** l
    kq = (-1) ** n * Fraction(l) ** (n + 1) * (l - 1) * kappa
    return _finish(Q, kq, n + 1 - (n + 2) // l, check)


# -- complex polynomials as real pairs -------------------------------------------

def realify(P: Poly) -> Tuple[Poly, Poly]:
    """Real and imaginary parts of P(z1..zN), z_j = x_j + i y_j, variables interleaved."""
    N = P.nvars
    xs = Poly.gens(2 * N)
    zero = Poly(2 * N)
    one = Poly.const(1, 2 * N)

    def cmul(p, q):
        return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])

    def cpow(p, e):
        out = (one, zero)
        for _ in range(e):
            out = cmul(out, p)
        return out

    re, im = zero, zero
    for exps, c in P.terms.items():
        t = (Poly.const(c, 2 * N), zero)
        for j, e in enumerate(exps):
            if e:
                t = cmul(t, cpow((xs[2 * j], xs[2 * j + 1]), e))
        re, im = re + t[0], im + t[1]
    return re, im


def cauchy_riemann_ok(reP: Poly, imP: Poly) -> bool:
    if reP.nvars != imP.nvars or reP.nvars % 2:
        return False
    for j in range(reP.nvars // 2):
        x, y = 2 * j, 2 * j + 1
        if not (reP.diff(x) - imP.diff(y)).is_zero():
            return False
        if not (reP.diff(y) + imP.diff(x)).is_zero():
            return False
    return True


class Gauss:
    """Gaussian rational a + b i."""
    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re, self.im = Fraction(re), Fraction(im)

    def __add__(self, o):
        return Gauss(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return Gauss(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        d = o.re * o.re + o.im * o.im
        return Gauss((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __eq__(self, o):
        return self.re == o.re and self.im == o.im

    def __pow__(self, e):
        out = Gauss(1)
        for _ in range(e):
            out = out * self
        return out


def gauss_det(rows: List[List[Gauss]]) -> Gauss:
    A = [list(r) for r in rows]
    n = len(A)
    det = Gauss(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if piv is None:
            return Gauss(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = Gauss(0) - det
        det = det * A[c][c]
        for r in range(c + 1, n):
            if not A[r][c].is_zero():
                f = A[r][c] / A[c][c]
                A[r] = [A[r][j] - f * A[c][j] for j in range(n)]
    return det


def check_complex_relation(reP: Poly, imP: Poly, kappa_c, m: int, points: int = 8,
                           seed: int = DEFAULT_SEED) -> bool:
    """H_C(P) = kappa P^m at Gaussian-rational sample points (P holomorphic)."""
    kre, kim = (to_fraction(v) for v in kappa_c)
    kap = Gauss(kre, kim)
    N = reP.nvars // 2
    _, hr = second_derivatives(reP)
    _, hi = second_derivatives(imP)
    rng = random.Random(seed)
    for _ in range(points):
        pt = [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(2 * N)]
        # d^2 P / dz_i dz_j = u_{x_i x_j} + i v_{x_i x_j}
        H = [[Gauss(hr[2 * i][2 * j].eval(pt), hi[2 * i][2 * j].eval(pt)) for j in range(N)]
             for i in range(N)]
        val = Gauss(reP.eval(pt), imP.eval(pt))
        if not gauss_det(H) == kap * val ** m:
            return False
    return True


def modulus_square(reP: Poly, imP: Poly, kappa_c, k: int, check: bool = True) -> Tuple[Poly, Relation]:
    """|P|^2 for holomorphic P of degree k on C^(n+1) with H_C(P) = kappa P^m."""
    if k < 2:
        raise ConstructionError("degree k must be at least 2")
    if not cauchy_riemann_ok(reP, imP):
        raise ConstructionError("(re, im) fail the Cauchy-Riemann equations")
    N = reP.nvars // 2
    if (N * (k - 2)) % k:
        raise ConstructionError("m = (n+1)(k-2)/k is not an integer")
    m = N * (k - 2) // k
    if not check_complex_relation(reP, imP, kappa_c, m):
        raise ConstructionError("complex relation H_C(P) = kappa P^m does not hold")
    kre, kim = (to_fraction(v) for v in kappa_c)
    abs2 = kre * kre + kim * kim
    kappa = Fraction(-4) ** N * abs2 * Fraction(1 - 2 * k, (k - 1) ** 2)
    return _finish(reP * reP + imP * imP, kappa, N + m, check)
