"""Certify H(P) = kappa*P^m, exponential relations and level-constancy conditions."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .hessian import det_exact, hessian_at, hessian_det, second_derivatives, twisted_det
from .polyring import Poly, RationalFn, homogeneity, to_fraction

EXACT = "exact-symbolic"
PROBABILISTIC = "probabilistic"

POWER = "power"
EXPONENTIAL = "exponential"
CONSTANT = "constant"

DEFAULT_SEED = 20240917
DEFAULT_TRIALS = 12
PIT_LO, PIT_HI = -(1 << 63), 1 << 63
# symbolic expansion is attempted when the cross-multiplied identity has at most this degree
RATIONAL_DEGREE_CAP = 24


def fmt_rational(q) -> str:
    q = to_fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass
class Relation:
    """An identity H(P) = kappa*P^m (kind=power), H(e^P) = kappa*e^{mP} (kind=exponential),
    or the zero-Hessian certificate (kind=constant, kappa=0)."""
    kind: str
    kappa: Fraction
    m: int
    mode: str = EXACT
    trials: int = 0
    seed: Optional[int] = None
    degree_bound: int = 0
    holds: bool = True
    witness: Optional[List[int]] = None
    failure_bound: Optional[Fraction] = None
    in_family: bool = True
    note: str = ""

    def __post_init__(self):
        self.kappa = to_fraction(self.kappa)
        if self.mode == EXACT:
            assert self.trials == 0, "exact certificates carry no trials"

    def same_identity(self, other: "Relation") -> bool:
        return (self.kind, self.kappa, self.m) == (other.kind, other.kappa, other.m)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "kappa": fmt_rational(self.kappa),
            "m": self.m,
            "mode": self.mode,
            "trials": self.trials,
            "seed": self.seed,
            "degree_bound": self.degree_bound,
            "holds": self.holds,
        }
        if self.witness is not None:
            d["witness"] = [str(v) for v in self.witness]
        if self.failure_bound is not None:
            d["failure_bound"] = f"{float(self.failure_bound):.3e}"
        if not self.in_family:
            d["in_family"] = False
        if self.note:
            d["note"] = self.note
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class HomogeneityClass:
    lam: Fraction
    alpha: Fraction
    epsilon: int
    center: Sequence = field(default_factory=list)

    def __post_init__(self):
        self.lam = to_fraction(self.lam)
        self.alpha = to_fraction(self.alpha)
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon must be 0 or 1")
        if self.lam * self.alpha != 0 or self.epsilon * self.alpha != 0:
            raise ValueError("need lambda*alpha = 0 and epsilon*alpha = 0")
        self.center = [to_fraction(c) for c in self.center]


# ---------------------------------------------------------------------------

def constant_ratio(a: Poly, b: Poly) -> Optional[Fraction]:
    """c with a = c*b, if such a constant exists (b nonzero)."""
    if b.is_zero():
        raise ZeroDivisionError("zero divisor")
    if a.is_zero():
        return Fraction(0)
    if len(a) != len(b):
        return None
    (ea, ca), (eb, cb) = a.leading(), b.leading()
    if ea != eb:
        return None
    c = ca / cb
    return c if (a - b.scale(c)).is_zero() else None


def exponent_lemma_holds(k: int, nvars: int, m: int) -> bool:
    """k*m = (n+1)(k-2) with n+1 = nvars."""
    return k * m == nvars * (k - 2)


def infer_power_relation(P: Poly, H: Optional[Poly] = None) -> Optional[Relation]:
    """Find (kappa, m) with H(P) = kappa*P^m by exact symbolic computation."""
    if P.is_zero():
        raise ValueError("P must be nonzero")
    if H is None:
        H = hessian_det(P)
    if H.is_zero():
        return Relation(CONSTANT, Fraction(0), 0, note="zero Hessian")
    dP, dH = P.degree(), H.degree()
    if dP <= 0:
        return None
    k = homogeneity(P)
    for m in range(dH // dP, -1, -1):
        if m * dP != dH:
            continue
        c = constant_ratio(H, P ** m)
        if c is not None:
            rel = Relation(POWER, c, m)
            if isinstance(k, int):
                if not exponent_lemma_holds(k, P.nvars, m):
                    rel.in_family = False
                    rel.note = "relation holds outside the (ma) integer family"
            return rel
    return None


def _draw_point(rng: random.Random, n: int) -> List[int]:
    return [rng.randrange(PIT_LO, PIT_HI) for _ in range(n)]


def _failure_bound(degree_bound: int, trials: int) -> Fraction:
    return Fraction(degree_bound, 1 << 64) ** trials


def pit_degree_bound(P: Poly, m: int) -> int:
    n, d = P.nvars, P.degree()
    return max(n * max(d - 2, 0), m * d, 0)


def verify_power_relation_pit(P: Poly, kappa, m: int, trials: int = DEFAULT_TRIALS,
                              seed: int = DEFAULT_SEED) -> Relation:
    """Test H(P) - kappa*P^m at random integer points with exact arithmetic."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    kappa = to_fraction(kappa)
    rng = random.Random(seed)
    bound = pit_degree_bound(P, m)
    second_derivatives(P)
    for _ in range(trials):
        pt = _draw_point(rng, P.nvars)
        lhs = det_exact(hessian_at(P, pt))
        rhs = kappa * P.eval(pt) ** m
        if lhs != rhs:
            return Relation(POWER, kappa, m, mode=PROBABILISTIC, trials=trials, seed=seed,
                            degree_bound=bound, holds=False, witness=pt,
                            note="refuted: H(P) differs from kappa*P^m at witness")
    return Relation(POWER, kappa, m, mode=PROBABILISTIC, trials=trials, seed=seed,
                    degree_bound=bound, failure_bound=_failure_bound(bound, trials))


def infer_kappa_pit(P: Poly, m: int, points: int = 10, seed: int = DEFAULT_SEED) -> Fraction:
    """kappa = H(P)(p)/P(p)^m at one random point, confirmed at ``points`` others."""
    rng = random.Random(seed)
    values = []
    while len(values) < points + 1:
        pt = _draw_point(rng, P.nvars)
        pv = P.eval(pt)
        if pv == 0:
            continue
        values.append(det_exact(hessian_at(P, pt)) / pv ** m)
    if len(set(values)) != 1:
        raise ArithmeticError(f"no single kappa: H(P)/P^{m} varies between points")
    return values[0]


def directional_derivative(P: Poly, v: Sequence) -> Poly:
    out = Poly(P.nvars)
    for i, vi in enumerate(v):
        vi = to_fraction(vi)
        if vi:
            out = out + P.diff(i).scale(vi)
    return out


def verify_exponential_relation(P: Poly, direction: Sequence) -> Optional[Relation]:
    """If P(x+tv) = P(x)+alpha*t, certify H(e^P) = C*e^{(n+1)P} with C = det(hess P + dP dP).

    n+1 is the number of variables.  Returns None when C is not constant.
    """
    v = [to_fraction(x) for x in direction]
    if len(v) != P.nvars:
        raise ValueError("direction length must equal nvars")
    dv = directional_derivative(P, v)
    if not dv.is_constant() or dv.is_zero():
        raise ValueError(f"P is not translationally homogeneous along v: dP(v) = {dv}")
    _, h = second_derivatives(P)
    for i in range(P.nvars):
        row = Poly(P.nvars)
        for j in range(P.nvars):
            if v[j]:
                row = row + h[i][j].scale(v[j])
        if not row.is_zero():
            raise ValueError(f"Hessian does not annihilate v: row {i + 1} gives {row}")
    C = twisted_det(P, 1)
    if not C.is_constant() or C.is_zero():
        return None
    n = P.nvars - 1
    return Relation(EXPONENTIAL, C.constant_value(), P.nvars,
                    note=f"alpha={fmt_rational(dv.constant_value())}; "
                         f"graph form (-1)^n*kappa = {fmt_rational((-1) ** n * C.constant_value())}")


def _grad_pair(G: Union[Poly, RationalFn]):
    """Numerators of dG (over a common denominator) as polynomials."""
    if isinstance(G, Poly):
        return G.grad()
    N, D = G.num, G.den
    return [D * N.diff(i) - N * D.diff(i) for i in range(N.nvars)]


def check_level_constancy(G: Union[Poly, RationalFn], F: Poly) -> bool:
    """dG wedge dF == 0, i.e. G_i F_j - G_j F_i vanishes for all i<j."""
    if G.nvars != F.nvars:
        raise ValueError("arity mismatch")
    dG = _grad_pair(G)
    dF = F.grad()
    n = F.nvars
    for i in range(n):
        for j in range(i + 1, n):
            if not (dG[i] * dF[j] - dG[j] * dF[i]).is_zero():
                return False
    return True


# -- rational functions -----------------------------------------------------

def _rational_hessian_numerators(N: Poly, D: Poly):
    """M with u_ij = M_ij / D^3 for u = N/D."""
    n = N.nvars
    Ng, Dg = N.grad(), D.grad()
    D2 = D * D
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            Nij, Dij = Ng[i].diff(j), Dg[i].diff(j)
            row.append(Nij * D2 - (Ng[i] * Dg[j] + Ng[j] * Dg[i]) * D
                       - N * Dij * D + (N * Dg[i] * Dg[j]).scale(2))
        rows.append(row)
    return rows


def _rational_hessian_at(u: RationalFn, pt) -> Fraction:
    N, D = u.num, u.den
    n = N.nvars
    Nv, Dv = N.eval(pt), D.eval(pt)
    Ng = [g.eval(pt) for g in N.grad()]
    Dg = [g.eval(pt) for g in D.grad()]
    _, Nh = second_derivatives(N)
    _, Dh = second_derivatives(D)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            Nij, Dij = Nh[i][j].eval(pt), Dh[i][j].eval(pt)
            row.append((Nij * Dv * Dv - (Ng[i] * Dg[j] + Ng[j] * Dg[i]) * Dv
                        - Nv * Dij * Dv + 2 * Nv * Dg[i] * Dg[j]) / Dv ** 3)
        rows.append(row)
    return det_exact(rows)


def verify_rational_relation(u: RationalFn, kappa, m: int, trials: int = DEFAULT_TRIALS,
                             seed: int = DEFAULT_SEED, degree_cap: int = RATIONAL_DEGREE_CAP,
                             resample_budget: int = 100) -> Relation:
    """Certify H(u) = kappa*u^m for u = num/den."""
    kappa = to_fraction(kappa)
    N, D = u.num, u.den
    n = N.nvars
    dN, dD = max(N.degree(), 0), max(D.degree(), 0)
    # det(M) * D^m  ==  kappa * N^m * D^(3n)
    lhs_deg = n * max(dN + 2 * dD - 2, 0) + m * dD
    rhs_deg = m * dN + 3 * n * dD
    bound = max(lhs_deg, rhs_deg)
    if bound <= degree_cap:
        from .hessian import PolyMatrix, det_poly
        M = det_poly(PolyMatrix(_rational_hessian_numerators(N, D)))
        ok = (M * D ** m - (N ** m * D ** (3 * n)).scale(kappa)).is_zero()
        return Relation(POWER, kappa, m, degree_bound=bound, holds=ok,
                        note="" if ok else "refuted symbolically")
    rng = random.Random(seed)
    done = 0
    misses = 0
    while done < trials:
        pt = _draw_point(rng, n)
        if D.eval(pt) == 0:
            misses += 1
            if misses > resample_budget:
                raise ZeroDivisionError("denominator vanished at every resampled point")
            continue
        lhs = _rational_hessian_at(u, pt)
        rhs = kappa * u.eval(pt) ** m
        done += 1
        if lhs != rhs:
            return Relation(POWER, kappa, m, mode=PROBABILISTIC, trials=trials, seed=seed,
                            degree_bound=bound, holds=False, witness=pt)
    return Relation(POWER, kappa, m, mode=PROBABILISTIC, trials=trials, seed=seed,
                    degree_bound=bound, failure_bound=_failure_bound(bound, trials))


# -- homogeneity --------------------------------------------------------------

def homogeneity_field(F: Poly, cls: HomogeneityClass) -> List[Poly]:
    """Components of X = (1-eps)*x + (2*eps-1)*v."""
    n = F.nvars
    v = list(cls.center) or [Fraction(0)] * n
    if len(v) != n:
        raise ValueError("center has wrong length")
    xs = Poly.gens(n)
    return [xs[i].scale(1 - cls.epsilon) + Poly.const((2 * cls.epsilon - 1) * v[i], n)
            for i in range(n)]


def classify_homogeneity(F: Poly, candidate: HomogeneityClass) -> bool:
    """Exact check of X(F) = lambda*F + alpha for the candidate class."""
    X = homogeneity_field(F, candidate)
    lhs = Poly(F.nvars)
    for Xi, Fi in zip(X, F.grad()):
        lhs = lhs + Xi * Fi
    rhs = F.scale(candidate.lam) + Poly.const(candidate.alpha, F.nvars)
    return (lhs - rhs).is_zero()
