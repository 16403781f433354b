"""Left-symmetric algebras given by structure constants.

e_a o e_b = sum_k c[a][b][k] e_k.  L(x)y = x o y = R(y)x.  Indices are 0-based in code
and 1-based in the JSON file format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .hessian import PolyMatrix, det_poly, hessian_det, second_derivatives
from .polyring import Poly, to_fraction
from .verify import Relation, directional_derivative, fmt_rational, verify_exponential_relation

Vec = List[Fraction]
Mat = List[List[Fraction]]


# -- exact linear algebra over Q ---------------------------------------------------

def _zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def _ident(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _matmul(A: Mat, B: Mat) -> Mat:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def _matvec(A: Mat, v: Vec) -> Vec:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def _rref(M: Mat) -> Tuple[Mat, List[int]]:
    A = [list(r) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M: Mat) -> int:
    if not M:
        return 0
    return len(_rref(M)[1])


def nullspace(M: Mat, ncols: Optional[int] = None) -> List[Vec]:
    """Basis of {v : M v = 0}."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    n = len(M[0])
    R, piv = _rref(M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve(M: Mat, b: Vec) -> Vec:
    """Unique solution of M v = b; ValueError if M is singular."""
    n = len(M)
    R, piv = _rref([list(row) + [bi] for row, bi in zip(M, b)])
    if piv != list(range(n)):
        raise ValueError("singular matrix")
    return [R[i][n] for i in range(n)]


def det(M: Mat) -> Fraction:
    from .hessian import det_exact
    return det_exact(M)


def charpoly_coeffs(M: Mat) -> List[Fraction]:
    """Coefficients of det(tI - M), highest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    coeffs = [Fraction(1)]
    Mk = _zeros(n, n)
    I = _ident(n)
    for k in range(1, n + 1):
        Mk = _matmul(M, [[Mk[i][j] + coeffs[-1] * I[i][j] for j in range(n)] for i in range(n)])
        coeffs.append(-sum(Mk[i][i] for i in range(n)) / k)
    return coeffs


def _divisors(k: int) -> List[int]:
    k = abs(k)
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def rational_roots(coeffs: Sequence[Fraction]) -> Dict[Fraction, int]:
    """Rational roots with multiplicity of a polynomial given highest degree first."""
    c = [to_fraction(x) for x in coeffs]
    out: Dict[Fraction, int] = {}
    while len(c) > 1 and c[-1] == 0:
        out[Fraction(0)] = out.get(Fraction(0), 0) + 1
        c.pop()

    def deflate(poly, root):
        q = [poly[0]]
        for a in poly[1:]:
            q.append(a + q[-1] * root)
        return q[:-1], q[-1]

    while len(c) > 1:
        den = 1
        for x in c:
            den = den * x.denominator // __import__("math").gcd(den, x.denominator)
        ints = [int(x * den) for x in c]
        found = None
        for p in _divisors(ints[-1]):
            for q in _divisors(ints[0]):
                for s in (1, -1):
                    cand = Fraction(s * p, q)
                    if deflate(c, cand)[1] == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        c = deflate(c, found)[0]
        out[found] = out.get(found, 0) + 1
    return out


# -- the algebra --------------------------------------------------------------------

class LSA:
    """Finite-dimensional algebra by structure constants; left symmetry is checked, not assumed."""

    def __init__(self, dim: int, c: Optional[Dict[Tuple[int, int, int], Fraction]] = None, name: str = ""):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.name = name
        self.c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (a, b, k), v in (c or {}).items():
            self.c[a][b][k] = to_fraction(v)

    @classmethod
    def from_left_matrix(cls, rows: Sequence[Sequence[str]], name: str = "") -> "LSA":
        """Structure constants from the displayed matrix L(x): c_ab^k = coeff of x_a in L(x)[k][b]."""
        from .polyring import parse_poly
        n = len(rows)
        c = {}
        for k, row in enumerate(rows):
            for b, text in enumerate(row):
                p = parse_poly(str(text), n)
                if p.degree() > 1 or p.eval([0] * n) != 0:
                    raise ValueError(f"entry L[{k + 1}][{b + 1}] is not linear: {text}")
                for a in range(n):
                    v = p.diff(a).constant_value() if not p.diff(a).is_zero() else Fraction(0)
                    if v:
                        c[(a, b, k)] = v
        return cls(n, c, name)

    # products
    def mul(self, x: Sequence, y: Sequence) -> Vec:
        n = self.dim
        out = [Fraction(0)] * n
        for a in range(n):
            xa = x[a]
            if not xa:
                continue
            for b in range(n):
                yb = y[b]
                if not yb:
                    continue
                row = self.c[a][b]
                for k in range(n):
                    if row[k]:
                        out[k] += xa * yb * row[k]
        return out

    def basis(self, i: int) -> Vec:
        return [Fraction(int(j == i)) for j in range(self.dim)]

    def L(self, x: Sequence) -> Mat:
        n = self.dim
        return [[sum((x[a] * self.c[a][b][k] for a in range(n) if x[a]), Fraction(0))
                 for b in range(n)] for k in range(n)]

    def R(self, y: Sequence) -> Mat:
        n = self.dim
        return [[sum((y[b] * self.c[a][b][k] for b in range(n) if y[b]), Fraction(0))
                 for a in range(n)] for k in range(n)]

    def bracket(self, x, y) -> Vec:
        return [p - q for p, q in zip(self.mul(x, y), self.mul(y, x))]

    def trace_R(self) -> Vec:
        """Covector a -> tr R(e_a)."""
        n = self.dim
        return [sum(self.c[a][b][a] for a in range(n)) for b in range(n)]

    def trace_L(self) -> Vec:
        n = self.dim
        return [sum(self.c[a][b][b] for b in range(n)) for a in range(n)]

    def R_poly(self) -> List[List[Poly]]:
        """R(x) with symbolic x."""
        n = self.dim
        xs = Poly.gens(n)
        return [[sum((xs[b].scale(self.c[a][b][k]) for b in range(n) if self.c[a][b][k]), Poly(n))
                 for a in range(n)] for k in range(n)]

    # serialization
    def to_dict(self) -> dict:
        n = self.dim
        entries = [[a + 1, b + 1, k + 1, fmt_rational(self.c[a][b][k])]
                   for a in range(n) for b in range(n) for k in range(n) if self.c[a][b][k]]
        return {"dim": n, "c": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, name: str = "") -> "LSA":
        n = int(d["dim"])
        c = {}
        for entry in d.get("c", []):
            i, j, k, v = entry
            if not all(1 <= int(t) <= n for t in (i, j, k)):
                raise ValueError(f"structure constant index out of range: {entry}")
            c[(int(i) - 1, int(j) - 1, int(k) - 1)] = to_fraction(v)
        return cls(n, c, name)

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "LSA":
        return cls.from_dict(json.loads(text), name)

    def perturbed(self, a: int, b: int, k: int, delta=1) -> "LSA":
        out = LSA(self.dim, name=self.name + "-perturbed")
        out.c = [[list(row) for row in plane] for plane in self.c]
        out.c[a][b][k] += to_fraction(delta)
        return out

    def __repr__(self):
        return f"LSA(dim={self.dim}, name={self.name!r})"


# -- axioms --------------------------------------------------------------------------

def check_lsa(A: LSA) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """Associator symmetric in its first two slots on every basis triple.

    This is R(x o y) - R(y)R(x) = [L(x), R(y)] evaluated on basis vectors.
    Returns (ok, first failing (x, y, z) as 1-based indices).
    """
    n = A.dim
    e = [A.basis(i) for i in range(n)]
    prod = [[A.mul(e[a], e[b]) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            for z in range(n):
                lhs = [p - q for p, q in zip(A.mul(prod[a][b], e[z]), A.mul(e[a], prod[b][z]))]
                rhs = [p - q for p, q in zip(A.mul(prod[b][a], e[z]), A.mul(e[b], prod[a][z]))]
                if lhs != rhs:
                    return False, (a + 1, b + 1, z + 1)
    return True, None


def check_jacobi(A: LSA) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    n = A.dim
    e = [A.basis(i) for i in range(n)]
    for a, b, z in iproduct(range(n), repeat=3):
        if not (a < b < z):
            continue
        t1 = A.bracket(e[a], A.bracket(e[b], e[z]))
        t2 = A.bracket(e[b], A.bracket(e[z], e[a]))
        t3 = A.bracket(e[z], A.bracket(e[a], e[b]))
        if any(p + q + s for p, q, s in zip(t1, t2, t3)):
            return False, (a + 1, b + 1, z + 1)
    return True, None


def characteristic_polynomial(A: LSA) -> Poly:
    """det(I + R(x))."""
    n = A.dim
    M = A.R_poly()
    for i in range(n):
        M[i][i] = M[i][i] + 1
    return det_poly(PolyMatrix(M))


@dataclass
class TraceForm:
    matrix: Mat

    def __post_init__(self):
        n = len(self.matrix)
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ArithmeticError(f"trace-form not symmetric at ({i + 1},{j + 1})")

    def __call__(self, x, y) -> Fraction:
        return sum((xi * tij * yj for xi, row in zip(x, self.matrix) if xi
                    for tij, yj in zip(row, y) if tij and yj), Fraction(0))

    def nondegenerate(self) -> bool:
        return det(self.matrix) != 0

    def as_poly(self) -> Poly:
        """tau(x, y) as a bilinear polynomial in (x1..xn, y1..yn)."""
        n = len(self.matrix)
        xs = Poly.gens(2 * n)
        out = Poly(2 * n)
        for i in range(n):
            for j in range(n):
                if self.matrix[i][j]:
                    out = out + (xs[i] * xs[n + j]).scale(self.matrix[i][j])
        return out


def trace_form(A: LSA) -> TraceForm:
    """tau(a, b) = tr R(a)R(b), cross-checked against tr R(a o b)."""
    n = A.dim
    Rs = [A.R(A.basis(i)) for i in range(n)]
    trR = A.trace_R()
    T = _zeros(n, n)
    for a in range(n):
        for b in range(n):
            T[a][b] = sum(_matmul(Rs[a], Rs[b])[i][i] for i in range(n))
            ab = A.mul(A.basis(a), A.basis(b))
            alt = sum((t * v for t, v in zip(trR, ab)), Fraction(0))
            if alt != T[a][b]:
                raise ArithmeticError(f"tr R(a)R(b) != tr R(a o b) at ({a + 1},{b + 1})")
    return TraceForm(T)


def is_complete(A: LSA) -> bool:
    return not any(A.trace_R())


def right_principal_idempotent(A: LSA, tau: Optional[TraceForm] = None) -> Optional[Vec]:
    """r with tau(r, x) = tr R(x); None for a complete algebra, ValueError for degenerate tau."""
    trR = A.trace_R()
    if not any(trR):
        return None
    tau = tau or trace_form(A)
    try:
        r = solve(tau.matrix, trR)
    except ValueError:
        raise ValueError("trace-form is degenerate") from None
    if A.mul(r, r) != r:
        raise ArithmeticError("solution of tau r = tr R is not idempotent")
    return r


# -- identities satisfied by the characteristic polynomial ---------------------------

def relative_invariance_holds(A: LSA, P: Optional[Poly] = None) -> Tuple[bool, Optional[int]]:
    """dP_x((I + R(x))a) = P(x) tr R(a) for each basis a, as polynomial identities."""
    P = P if P is not None else characteristic_polynomial(A)
    n = A.dim
    g = second_derivatives(P)[0]
    xs = Poly.gens(n)
    trR = A.trace_R()
    for a in range(n):
        lhs = g[a]
        for k in range(n):
            coef = sum((xs[b].scale(A.c[a][b][k]) for b in range(n) if A.c[a][b][k]), Poly(n))
            if not coef.is_zero():
                lhs = lhs + g[k] * coef
        if lhs != P.scale(trR[a]):
            return False, a + 1
    return True, None


def trace_form_from_charpoly(P: Poly) -> Mat:
    """(P_a P_b - P_ab)(0), which is -(hess log P)(0) when P(0) = 1."""
    n = P.nvars
    g, h = second_derivatives(P)
    zero = [0] * n
    gv = [gi.eval(zero) for gi in g]
    return [[gv[a] * gv[b] - h[a][b].eval(zero) for b in range(n)] for a in range(n)]


def hess_log_identity_holds(A: LSA, P: Optional[Poly] = None) -> bool:
    P = P if P is not None else characteristic_polynomial(A)
    return trace_form_from_charpoly(P) == trace_form(A).matrix


def _kernel_frame(A: LSA, r: Vec) -> Tuple[List[Vec], Mat]:
    """Basis of ker tr R and the inverse of [basis | r] for coordinates."""
    trR = A.trace_R()
    B = nullspace([trR])
    M = [[B[j][i] for j in range(len(B))] + [r[i]] for i in range(A.dim)]
    from .polyring import _mat_inverse
    return B, _mat_inverse(M)


def closed_form_value(A: LSA, r: Vec, xbar_coords: Sequence, t, printed: bool = False) -> Fraction:
    """P(xbar + t r) from the block form of I + R(x) over ker tr R (+) <r>.

    Default: det(I + Rbar)(1 - tau(xbar, (I + Rbar)^{-1} L(r) xbar)) + t, where
    Rbar(xbar)y = y o xbar - tau(y, xbar) r.  With printed=True the alternative
    1 + tau(xbar, (I - Rbar)^{-1} L(r) xbar) + t is returned instead (for comparison).
    """
    tau = trace_form(A)
    B, Minv = _kernel_frame(A, r)
    m = len(B)
    xbar = [sum((to_fraction(c) * b[i] for c, b in zip(xbar_coords, B)), Fraction(0))
            for i in range(A.dim)]

    def coords(w):
        c = _matvec(Minv, w)
        if c[m]:
            raise ArithmeticError("vector expected in ker tr R")
        return c[:m]

    Rbar = _zeros(m, m)
    for j, bj in enumerate(B):
        w = A.mul(bj, xbar)
        s = tau(bj, xbar)
        col = coords([wi - s * ri for wi, ri in zip(w, r)])
        for i in range(m):
            Rbar[i][j] = col[i]
    v = coords(A.mul(r, xbar))
    sgn = -1 if printed else 1
    lhs = [[Fraction(int(i == j)) + sgn * Rbar[i][j] for j in range(m)] for i in range(m)]
    z = solve(lhs, v)
    zfull = [sum((zc * b[i] for zc, b in zip(z, B)), Fraction(0)) for i in range(A.dim)]
    if printed:
        return 1 + tau(xbar, zfull) + to_fraction(t)
    return det(lhs) * (1 - tau(xbar, zfull)) + to_fraction(t)


def closed_form_point(A: LSA, r: Vec, xbar_coords: Sequence, t) -> Vec:
    B, _ = _kernel_frame(A, r)
    return [sum((to_fraction(c) * b[i] for c, b in zip(xbar_coords, B)), Fraction(0))
            + to_fraction(t) * r[i] for i in range(A.dim)]


# -- completely solvable pipeline ----------------------------------------------------

def triangular_order(A: LSA) -> Optional[List[int]]:
    """A basis ordering making every L(e_i) lower-triangular, or None.

    An off-diagonal entry L(e_i)[k][j] != 0 forces j before k, so this is a topological sort.
    The identity order is returned when it already works.
    """
    n = A.dim
    succ = [set() for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for k in range(n):
                if k != b and A.c[a][b][k]:
                    succ[b].add(k)
    if all(k > b for b in range(n) for k in succ[b]):
        return list(range(n))
    indeg = [0] * n
    for b in range(n):
        for k in succ[b]:
            indeg[k] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order = []
    while ready:
        b = ready.pop(0)
        order.append(b)
        for k in sorted(succ[b]):
            indeg[k] -= 1
            if indeg[k] == 0:
                ready.append(k)
        ready.sort()
    return order if len(order) == n else None


def derived_dimension(A: LSA) -> int:
    n = A.dim
    rows = [A.bracket(A.basis(a), A.basis(b)) for a in range(n) for b in range(a + 1, n)]
    return rank(rows) if rows else 0


def _restrict(A_op: Mat, B: List[Vec], Minv: Mat) -> Mat:
    """Matrix of an operator preserving span(B), in the basis B."""
    m = len(B)
    out = _zeros(m, m)
    for j, bj in enumerate(B):
        w = _matvec(A_op, bj)
        c = _matvec(Minv, w)
        if any(c[m:]):
            raise ArithmeticError("operator does not preserve the subspace")
        for i in range(m):
            out[i][j] = c[i]
    return out


def _power(M: Mat, p: int) -> Mat:
    out = _ident(len(M))
    for _ in range(p):
        out = _matmul(out, M)
    return out


def generalized_eigenspace(M: Mat, alpha: Fraction) -> List[Vec]:
    n = len(M)
    shifted = [[M[i][j] - (alpha if i == j else 0) for j in range(n)] for i in range(n)]
    return nullspace(_power(shifted, n), n)


@dataclass
class LsaReport:
    complete: bool
    completely_solvable_in_basis: bool
    tau_nondegenerate: bool
    derived_codim: int
    charpoly: Poly
    r: Optional[Vec] = None
    relation: Optional[Relation] = None
    weights: List[Tuple[Fraction, int]] = field(default_factory=list)
    basis_order: Optional[List[int]] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return (self.relation is not None and self.relation.kappa != 0 and not self.failures)

    def to_dict(self) -> dict:
        from .polyring import to_text
        return {
            "complete": self.complete,
            "completely_solvable_in_basis": self.completely_solvable_in_basis,
            "triangular_check": "triangular-in-given-basis",
            "basis_order": None if self.basis_order is None else [i + 1 for i in self.basis_order],
            "tau_nondegenerate": self.tau_nondegenerate,
            "derived_codim": self.derived_codim,
            "charpoly": to_text(self.charpoly),
            "r": None if self.r is None else [fmt_rational(x) for x in self.r],
            "relation": None if self.relation is None else self.relation.to_dict(),
            "weights": [[fmt_rational(a), d] for a, d in self.weights],
            "checks": dict(sorted(self.checks.items())),
            "failures": list(self.failures),
            "certified": self.certified,
        }


def weight_decomposition(A: LSA, r: Vec) -> Tuple[Optional[List[Tuple[Fraction, List[Vec]]]], Mat, List[Vec], Mat]:
    """Generalized eigenspaces of L(r) on ker tr R over Q; None if some weight is irrational."""
    B, Minv = _kernel_frame(A, r)
    Lr = A.L(r)
    M = _restrict(Lr, B, Minv)
    roots = rational_roots(charpoly_coeffs(M))
    if sum(roots.values()) != len(B):
        return None, M, B, Minv
    spaces = []
    for alpha in sorted(roots):
        coords = generalized_eigenspace(M, alpha)
        vecs = [[sum((cj * b[i] for cj, b in zip(c, B)), Fraction(0)) for i in range(A.dim)]
                for c in coords]
        spaces.append((alpha, vecs))
    return spaces, M, B, Minv


def _weight_checks(A: LSA, r: Vec, tau: TraceForm, spaces) -> Dict[str, bool]:
    n = A.dim
    Lr = A.L(r)
    checks = {}
    one_space = generalized_eigenspace(Lr, Fraction(1))
    checks["a1_is_span_r"] = len(one_space) == 1 and rank([one_space[0], r]) == 1
    alphas = {a: v for a, v in spaces}
    checks["b_is_sum_of_weight_spaces"] = sum(len(v) for v in alphas.values()) == n - 1
    checks["weights_avoid_0_1"] = all(a not in (0, 1) for a in alphas)
    checks["weights_pair"] = all((1 - a) in alphas and len(alphas[1 - a]) == len(v)
                                 for a, v in alphas.items())

    def in_weight_space(w, beta):
        shifted = [[Lr[i][j] - (beta if i == j else 0) for j in range(n)] for i in range(n)]
        return not any(_matvec(_power(shifted, n), w))

    graded = True
    for (a, va), (b, vb) in iproduct(spaces, repeat=2):
        for x in va:
            for y in vb:
                if not in_weight_space(A.mul(x, y), a + b):
                    graded = False
    checks["products_graded"] = graded
    pairing = True
    for (a, va), (b, vb) in iproduct(spaces, repeat=2):
        block = [[tau(x, y) for y in vb] for x in va]
        if a + b == 1:
            pairing &= len(va) == len(vb) and det(block) != 0
        else:
            pairing &= not any(any(row) for row in block)
    checks["tau_pairs_complementary"] = pairing
    return checks


def completely_solvable_pipeline(A: LSA) -> LsaReport:
    """Check the hypotheses, then certify H(e^P) = kappa e^{nP} and the weight structure."""
    n = A.dim
    P = characteristic_polynomial(A)
    complete = is_complete(A)
    order = triangular_order(A) if n <= 8 else (list(range(n)) if triangular_order(A) == list(range(n)) else None)
    tau = trace_form(A)
    nondeg = tau.nondegenerate()
    codim = n - derived_dimension(A)
    rep = LsaReport(complete=complete, completely_solvable_in_basis=order is not None,
                    tau_nondegenerate=nondeg, derived_codim=codim, charpoly=P, basis_order=order)
    rep.checks["left_symmetric"] = check_lsa(A)[0]
    rep.checks["jacobi"] = check_jacobi(A)[0]
    rep.checks["deg_P_le_dim"] = P.degree() <= n
    if not rep.checks["left_symmetric"]:
        rep.failures.append("not left-symmetric")
    if order is None:
        rep.failures.append("L-operators are not simultaneously lower-triangular in any basis ordering")
    if not nondeg:
        rep.failures.append("trace-form is degenerate")
    if codim != 1:
        rep.failures.append(f"derived algebra has codimension {codim}, not 1")
    if complete:
        rep.failures.append("algebra is complete (tr R = 0)")
    if rep.failures:
        return rep
    r = right_principal_idempotent(A, tau)
    rep.r = r
    trR = A.trace_R()
    rep.checks["trR_r_is_1"] = sum(a * b for a, b in zip(trR, r)) == 1
    rep.checks["tau_r_is_trR"] = all(tau(A.basis(a), r) == trR[a] for a in range(n))
    dv = directional_derivative(P, r)
    rep.checks["translation_P_plus_t"] = dv.is_constant() and dv.constant_value() == 1
    trL = A.trace_L()
    rep.checks["two_trL_eq_n1_trR"] = all(2 * a == (n + 1) * b for a, b in zip(trL, trR))
    rep.checks["relative_invariance"] = relative_invariance_holds(A, P)[0]
    rep.checks["trace_form_from_P"] = trace_form_from_charpoly(P) == tau.matrix
    try:
        rel = verify_exponential_relation(P, r)
    except ValueError as exc:
        rel = None
        rep.failures.append(str(exc))
    rep.relation = rel
    if rel is None or rel.kappa == 0:
        rep.failures.append("exponential relation not certified")
    spaces, _, _, _ = weight_decomposition(A, r)
    if spaces is None:
        rep.failures.append("L(r) has irrational weights on ker tr R")
    else:
        rep.weights = [(a, len(v)) for a, v in spaces]
        rep.checks.update(_weight_checks(A, r, tau, spaces))
    for name, ok in rep.checks.items():
        if not ok:
            rep.failures.append(f"check failed: {name}")
    return rep


# -- Koszul forms --------------------------------------------------------------------

def koszul_checks(A: LSA, lam: Sequence) -> Dict[str, object]:
    """Evaluate h(x, y) = lam(x o y), its idempotent u and the conditions on u."""
    n = A.dim
    lam = [to_fraction(x) for x in lam]
    e = [A.basis(i) for i in range(n)]
    h = [[sum((l * v for l, v in zip(lam, A.mul(e[a], e[b]))), Fraction(0)) for b in range(n)]
         for a in range(n)]
    if any(h[a][b] != h[b][a] for a in range(n) for b in range(a)):
        raise ValueError("lam(x o y) is not symmetric: not a Koszul form")
    if det(h) == 0:
        raise ValueError("lam(x o y) is degenerate: not a Koszul form")

    def H(x, y):
        return sum((x[a] * h[a][b] * y[b] for a in range(n) for b in range(n) if x[a] and y[b]),
                   Fraction(0))

    hessian_metric = all(
        H(A.bracket(e[a], e[b]), e[c]) == H(e[a], A.mul(e[b], e[c])) - H(e[b], A.mul(e[a], e[c]))
        for a, b, c in iproduct(range(n), repeat=3))
    u = solve(h, lam)
    lam_u = sum(l * x for l, x in zip(lam, u))
    huu = H(u, u)
    Ru, Lu = A.R(u), A.L(u)
    hinv = solve_inverse(h)

    def adjoint(M):
        # h(Mx, y) = h(x, M* y)  =>  M* = h^{-1} M^T h
        Mt = [list(col) for col in zip(*M)]
        return _matmul(hinv, _matmul(Mt, h))

    ker_lam = nullspace([lam])
    ker_Ru = nullspace(Ru, n)
    same_kernel = (len(ker_lam) == len(ker_Ru)
                   and all(not any(_matvec(Ru, v)) for v in ker_lam))
    rc1 = huu != 0 and _kernel_product_is_lsa(A, lam, lam_u, H, u, ker_lam)
    Ru2 = _matmul(Ru, Ru)
    rc3 = Ru2 == Ru and huu == 1 and lam_u == 1
    rc4 = lam_u != 0 and all(rank([A.mul(x, u), u]) <= 1 for x in e)
    trRu = sum(Ru[i][i] for i in range(n))
    ident = _ident(n)
    Lu_star = adjoint(Lu)
    out = {
        "symmetric_nondegenerate": True,
        "hessian_metric": hessian_metric,
        "u": u,
        "idempotent": A.mul(u, u) == u,
        "lam_a_eq_lam_a_u": all(sum(l * v for l, v in zip(lam, A.mul(x, u))) == sum(l * v for l, v in zip(lam, x)) for x in e),
        "rclsa1": rc1,
        "rclsa2": same_kernel,
        "rclsa3": rc3,
        "rclsa4": rc4,
        "Ru_self_adjoint": adjoint(Ru) == Ru,
        "Lu_plus_adjoint": [[Lu[i][j] + Lu_star[i][j] for j in range(n)] for i in range(n)]
                           == [[Ru[i][j] + ident[i][j] for j in range(n)] for i in range(n)],
        "trRu_integer": trRu.denominator == 1 and 1 <= trRu <= n,
        "trRu": trRu,
        "positive_definite": _positive_definite(h),
    }
    return out


def solve_inverse(M: Mat) -> Mat:
    from .polyring import _mat_inverse
    return _mat_inverse(M)


def _positive_definite(h: Mat) -> bool:
    # Sylvester: all leading principal minors positive
    return all(det([row[:k] for row in h[:k]]) > 0 for k in range(1, len(h) + 1))


def _kernel_product_is_lsa(A, lam, lam_u, H, u, ker) -> bool:
    """x o' y = x o y - lam(u)^{-1} h(x, y) u restricted to ker lam is left-symmetric."""
    m = len(ker)
    if m == 0:
        return True
    n = A.dim
    frame = [[ker[j][i] for j in range(m)] + [u[i]] for i in range(n)]
    try:
        Minv = solve_inverse(frame)
    except ValueError:
        return False
    c = {}
    for a in range(m):
        for b in range(m):
            w = A.mul(ker[a], ker[b])
            s = H(ker[a], ker[b]) / lam_u
            w = [wi - s * ui for wi, ui in zip(w, u)]
            coords = _matvec(Minv, w)
            if coords[m]:
                return False
            for k in range(m):
                if coords[k]:
                    c[(a, b, k)] = coords[k]
    return check_lsa(LSA(m, c))[0]


# -- Cayley algebra ------------------------------------------------------------------

def cayley_algebra(n: int) -> LSA:
    """x o y = sum_i (i x_n y_i + sum_{j<i} x_{i-j} y_j) e_i."""
    if n < 2:
        raise ValueError("n must be at least 2")
    c = {}
    for b in range(1, n + 1):
        c[(n - 1, b - 1, b - 1)] = Fraction(b)
    for a in range(1, n):
        for b in range(1, n + 1 - a):
            c[(a - 1, b - 1, a + b - 1)] = Fraction(1)
    return LSA(n, c, name=f"cayley_{n}")


def _partitions(n: int, largest: Optional[int] = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def cayley_phi_partitions(n: int, nvars: Optional[int] = None) -> Poly:
    """sum over partitions of n of (-1)^len * (#compositions) / len * x_(partition)."""
    nv = nvars or n
    out = Poly(nv)
    for part in _partitions(n):
        length = len(part)
        mult: Dict[int, int] = {}
        for p in part:
            mult[p] = mult.get(p, 0) + 1
        comps = factorial(length)
        for m in mult.values():
            comps //= factorial(m)
        exps = [0] * nv
        for p, m in mult.items():
            exps[p - 1] = m
        out = out + Poly.from_terms(nv, {tuple(exps): Fraction((-1) ** length * comps, length)})
    return out


def cayley_recursion_poly(n: int) -> Poly:
    """P_n from P_n - 1 = sum_{i<n} x_i (1 - P_{n-i}) + n x_n, P_1 = 1 + x_1."""
    if n < 1:
        raise ValueError("n must be positive")
    xs = Poly.gens(n)
    P = {1: Poly.const(1, n) + xs[0]}
    for k in range(2, n + 1):
        acc = Poly.const(1, n) + xs[k - 1].scale(k)
        for i in range(1, k):
            acc = acc + xs[i - 1] * (1 - P[k - i])
        P[k] = acc
    return P[n]


def cayley_phi(n: int) -> Poly:
    """The Cayley hypersurface polynomial, computed two ways that must agree."""
    if n < 2:
        raise ValueError("n must be at least 2")
    by_partitions = cayley_phi_partitions(n)
    P = characteristic_polynomial(cayley_algebra(n))
    # the sign is -1 for every n; (-1)^n only matches for odd n
    from_charpoly = (P - 1).scale(Fraction(-1, n))
    if by_partitions != from_charpoly:
        raise ArithmeticError(f"partition formula and characteristic polynomial disagree at n={n}")
    return by_partitions


def phi_recursion_holds(n: int, sign=None) -> bool:
    """s_n n Phi_n + sum_{i<n} s_{n-i} (n-i) x_i Phi_{n-i} = n x_n.

    s_k = -1 by default (the sign that holds); pass sign=lambda k: (-1)**k to test the alternative.
    """
    sign = sign or (lambda k: -1)
    xs = Poly.gens(n)
    lhs = cayley_phi_partitions(n).scale(sign(n) * n)
    for i in range(1, n):
        lhs = lhs + xs[i - 1] * cayley_phi_partitions(n - i, n).scale(sign(n - i) * (n - i))
    return lhs == xs[n - 1].scale(n)


# -- fixtures ------------------------------------------------------------------------

def example_6dim() -> LSA:
    rows = [
        ["3/2*x6", "0", "0", "0", "0", "0"],
        ["0", "3/2*x6", "0", "0", "0", "0"],
        ["0", "0", "3*x6", "0", "0", "0"],
        ["0", "0", "x2", "9/2*x6", "0", "0"],
        ["x3", "x3", "x1 + 2*x2", "0", "9/2*x6", "0"],
        ["x4", "x5", "x3", "x1", "x2", "6*x6"],
    ]
    return LSA.from_left_matrix(rows, "example_6dim")


def example_6dim_right() -> List[List[str]]:
    """The displayed right multiplication matrix, used to cross-check the transcription."""
    return [
        ["0", "0", "0", "0", "0", "3/2*x1"],
        ["0", "0", "0", "0", "0", "3/2*x2"],
        ["0", "0", "0", "0", "0", "3*x3"],
        ["0", "x3", "0", "0", "0", "9/2*x4"],
        ["x3", "2*x3", "x1 + x2", "0", "0", "9/2*x5"],
        ["x4", "x5", "x3", "x1", "x2", "6*x6"],
    ]


def example_4dim() -> LSA:
    rows = [
        ["-x4", "0", "0", "0"],
        ["0", "1/2*x4", "0", "0"],
        ["0", "0", "2*x4", "0"],
        ["x3", "x2", "x1", "x4"],
    ]
    return LSA.from_left_matrix(rows, "example_4dim")


def example_4dim_right() -> List[List[str]]:
    return [
        ["0", "0", "0", "-x1"],
        ["0", "0", "0", "1/2*x2"],
        ["0", "0", "0", "2*x3"],
        ["x3", "x2", "x1", "x4"],
    ]


def parabolic_algebra(n: int, g: Optional[Sequence[Sequence]] = None) -> LSA:
    """Basis (v_1..v_{n-1}, u): v o w = g(v, w) u, v o u = 0, u o v = v/2, u o u = u."""
    if n < 2:
        raise ValueError("n must be at least 2")
    m = n - 1
    g = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)] if g is None else \
        [[to_fraction(x) for x in row] for row in g]
    c = {}
    for i in range(m):
        for j in range(m):
            if g[i][j]:
                c[(i, j, m)] = g[i][j]
        c[(m, i, i)] = Fraction(1, 2)
    c[(m, m, m)] = Fraction(1)
    return LSA(n, c, name=f"parabolic_{n}")


def right_matrix_text_to_poly(rows: Sequence[Sequence[str]]) -> List[List[Poly]]:
    from .polyring import parse_poly
    n = len(rows)
    return [[parse_poly(t, n) for t in row] for row in rows]


def reduced_polynomial(P: Poly, index: int) -> Poly:
    """For P = 1 + alpha x_index + q(other variables), return q / alpha without x_index."""
    n = P.nvars
    alpha = P.diff(index)
    if not alpha.is_constant() or alpha.is_zero():
        raise ValueError("P is not affine with constant slope in the given variable")
    a = alpha.constant_value()
    rest = P - Poly.var(index, n).scale(a) - P.eval([0] * n)
    images = [Poly.var(i if i < index else i - 1, n - 1) if i != index else Poly(n - 1)
              for i in range(n)]
    return rest.compose(images).scale(1 / a)


FIXTURES = {
    "cayley_3": lambda: cayley_algebra(3),
    "cayley_4": lambda: cayley_algebra(4),
    "example_6dim": example_6dim,
    "example_4dim": example_4dim,
    "parabolic_3": lambda: parabolic_algebra(3),
}


def fixture(name: str) -> LSA:
    if name.startswith("cayley_"):
        return cayley_algebra(int(name.split("_")[1]))
    if name.startswith("parabolic_"):
        return parabolic_algebra(int(name.split("_")[1]))
    if name not in FIXTURES:
        raise KeyError(f"unknown LSA fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return FIXTURES[name]()
