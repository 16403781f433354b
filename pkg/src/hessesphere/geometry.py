"""Float evaluation of the equiaffine geometry of level sets.

Exact symbolic derivatives (up to third order of F and second order of U(F)) are
evaluated in float64 at sample points.  Two kinds of surfaces are supported: level sets
of a polynomial F, and level sets of e^P for a polynomial P (the improper case, where
hess P itself is degenerate).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from .hessian import second_derivatives, u_of_f
from .polyring import Poly
from .verify import check_level_constancy

PROPER = "proper"
IMPROPER = "improper"
NOT_A_SPHERE = "not-a-sphere"

DEFAULT_TOL = 1e-8
CENTER_TOL = 1e-6


class LevelSetEmpty(ValueError):
    pass


class DegeneratePoint(ValueError):
    pass


class PolyBank:
    """Many polynomials in the same ring evaluated together at many points.

    With ``exact=True`` real points are evaluated exactly (a float is a dyadic rational)
    and each value is rounded once, which avoids cancellation in expanded high-degree
    polynomials.  Complex points always use float arithmetic.
    """

    def __init__(self, polys: Sequence[Poly], exact: bool = False):
        self.nvars = polys[0].nvars
        self.exact = exact
        index: Dict[tuple, int] = {}
        entries = []
        for j, p in enumerate(polys):
            for exps, c in p.terms.items():
                i = index.setdefault(exps, len(index))
                entries.append((i, j, c))
        self.exps = np.array(list(index) or [(0,) * self.nvars], dtype=np.int64).reshape(-1, self.nvars)
        self.coef = np.zeros((max(len(index), 1), len(polys)))
        for i, j, c in entries:
            self.coef[i, j] += float(c)
        if exact:
            self._degs = [sum(e) for e in index]
            self._maxdeg = max(self._degs, default=0)
            self._rows = []
            for j, p in enumerate(polys):
                den = math.lcm(*(c.denominator for c in p.terms.values())) if len(p) else 1
                self._rows.append((den, [(index[e], int(c * den)) for e, c in p.terms.items()]))

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if self.exact and not np.iscomplexobj(pts):
            return np.array([self._exact_row(p) for p in pts]).reshape(len(pts), len(self._rows))
        mono = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coef

    def _exact_row(self, p) -> List[float]:
        fr = [Fraction(float(x)) for x in p]
        D = math.lcm(*(f.denominator for f in fr))
        a = [int(f * D) for f in fr]
        top = self._maxdeg
        dpow = [D ** k for k in range(top + 1)]
        pw = [[1] for _ in a]
        for i, e in enumerate(self.exps.max(axis=0)):
            for _ in range(int(e)):
                pw[i].append(pw[i][-1] * a[i])
        mono = []
        for row, deg in zip(self.exps.tolist(), self._degs):
            v = dpow[top - deg]
            for i, e in enumerate(row):
                if e:
                    v *= pw[i][e]
            mono.append(v)
        scale = dpow[top]
        return [float(Fraction(sum(c * mono[i] for i, c in terms), den * scale)) for den, terms in self._rows]


class _Jets:
    """Derivative data of F and U(F) at points: F, F_i, F_ij, F_ijk, U, U_i, U_ij."""

    def __init__(self, F: Poly):
        n = F.nvars
        self.F = F
        self.N = n
        g, h = second_derivatives(F)
        self.U = u_of_f(F)
        third = [[[h[i][j].diff(k) for k in range(n)] for j in range(n)] for i in range(n)]
        Ug = self.U.grad()
        Uh = [[Ug[i].diff(j) for j in range(n)] for i in range(n)]
        polys = [F] + list(g) + [h[i][j] for i in range(n) for j in range(n)]
        polys += [third[i][j][k] for i in range(n) for j in range(n) for k in range(n)]
        polys += [self.U] + Ug + [Uh[i][j] for i in range(n) for j in range(n)]
        self.bank = PolyBank(polys, exact=True)

    def __call__(self, pts):
        n = self.N
        v = self.bank(np.asarray(pts, dtype=float))
        m = v.shape[0]
        o = 0
        F = v[:, o]; o += 1
        g = v[:, o:o + n]; o += n
        h = v[:, o:o + n * n].reshape(m, n, n); o += n * n
        t = v[:, o:o + n ** 3].reshape(m, n, n, n); o += n ** 3
        U = v[:, o]; o += 1
        Ug = v[:, o:o + n]; o += n
        Uh = v[:, o:o + n * n].reshape(m, n, n)
        return F, g, h, t, U, Ug, Uh

    def level(self, pts):
        return self.bank(np.asarray(pts, dtype=float))[:, 0]


class _ExpJets(_Jets):
    """Jets of G = e^(P - P(p)) at p; the constant shift is an increasing reparameterization."""

    def __call__(self, pts):
        P, Pg, Ph, Pt, UP, UPg, UPh = super().__call__(pts)
        N = self.N
        m = len(P)
        G = np.ones(m)
        Gg = Pg
        Gh = Ph + Pg[:, :, None] * Pg[:, None, :]
        Gt = (Pt + Ph[:, :, :, None] * Pg[:, None, None, :] + Ph[:, :, None, :] * Pg[:, None, :, None]
              + Ph[:, None, :, :] * Pg[:, :, None, None]
              + Pg[:, :, None, None] * Pg[:, None, :, None] * Pg[:, None, None, :])
        # U(e^P) = e^{(N+1)P} U(P)
        c = N + 1
        UG = UP
        UGg = c * Pg * UP[:, None] + UPg
        UGh = (c * c * Pg[:, :, None] * Pg[:, None, :] * UP[:, None, None] + c * Ph * UP[:, None, None]
               + c * (Pg[:, :, None] * UPg[:, None, :] + Pg[:, None, :] * UPg[:, :, None]) + UPh)
        return G, Gg, Gh, Gt, UG, UGg, UGh


@dataclass
class LevelSample:
    point: np.ndarray
    F: float
    H: float
    U: float
    grad: np.ndarray
    hess: np.ndarray
    mu: np.ndarray
    A: float
    xi: np.ndarray
    nu: np.ndarray
    S: np.ndarray
    amc: float
    dxi: np.ndarray = field(repr=False, default=None)
    level: float = 0.0

    @property
    def nu_xi(self) -> float:
        return float(self.nu @ self.xi)

    @property
    def shape_grad_residual(self) -> float:
        """|S_i^j F_j| relative to |dF| max(1, |S|)."""
        scale = max(np.linalg.norm(self.grad) * max(1.0, np.linalg.norm(self.S)), 1e-300)
        return float(np.linalg.norm(self.S @ self.grad) / scale)

    def to_dict(self) -> dict:
        def fl(a):
            return [float(x) for x in np.ravel(a)]
        return {"point": fl(self.point), "level": float(self.level), "F": float(self.F),
                "H": float(self.H), "U": float(self.U), "grad": fl(self.grad), "mu": fl(self.mu),
                "A": float(self.A), "xi": fl(self.xi), "nu": fl(self.nu),
                "S": [fl(r) for r in self.S], "amc": float(self.amc), "nu_xi": self.nu_xi}


def _geometry(jets, pts, levels, rel_tol=1e-12) -> List[LevelSample]:
    F, g, h, t, U, Ug, Uh = jets(pts)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    m, N = g.shape
    n = N - 1
    H = np.linalg.det(h)
    Hscale = np.prod(np.maximum(np.abs(h).max(axis=2), 1e-300), axis=1)
    bad = (np.abs(H) <= rel_tol * Hscale) | (U == 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise DegeneratePoint(f"H(F) or U(F) vanishes at {pts[i].tolist()}")
    ginv = np.linalg.inv(h)
    Fs = np.einsum("mij,mj->mi", ginv, g)               # F^i
    mu = Ug / ((n + 2) * U[:, None])
    A = 1 - np.einsum("mi,mi->m", Fs, mu)
    s = np.abs(U) ** (1.0 / (n + 2))
    c = H * A / U
    mus = np.einsum("mij,mj->mi", ginv, mu)              # mu^i
    w = c[:, None] * Fs + mus
    xi = -s[:, None] * w
    nu = -(np.abs(U) ** (-1.0 / (n + 2)))[:, None] * g
    # derivatives, index order [m, k, i] = d_k (.)^i
    eye = np.eye(N)[None]
    T_F = np.einsum("mabk,mb->mak", t, Fs)                # F_abk F^b
    dFs = -np.einsum("mia,mak->mki", ginv, T_F) + eye     # d_k F^i
    dmu = (Uh / U[:, None, None] - Ug[:, :, None] * Ug[:, None, :] / (U ** 2)[:, None, None]) / (n + 2)
    T_mu = np.einsum("mabk,mb->mak", t, mus)
    dmus = -np.einsum("mia,mak->mki", ginv, T_mu) + np.einsum("mij,mjk->mki", ginv, dmu)
    dA = -np.einsum("mkp,mp->mk", dFs, mu) - np.einsum("mp,mpk->mk", Fs, dmu)
    dH = H[:, None] * np.einsum("mab,mabk->mk", ginv, t)
    dc = (dH * A[:, None] + H[:, None] * dA) / U[:, None] - (H * A / U ** 2)[:, None] * Ug
    dw = dc[:, :, None] * Fs[:, None, :] + c[:, None, None] * dFs + dmus
    dxi = -s[:, None, None] * (mu[:, :, None] * w[:, None, :] + dw)
    tau = np.einsum("mki,mi->mk", dxi, nu)
    S = -dxi + tau[:, :, None] * xi[:, None, :]
    amc = np.trace(S, axis1=1, axis2=2) / n
    out = []
    for i in range(m):
        out.append(LevelSample(point=pts[i], F=float(F[i]), H=float(H[i]), U=float(U[i]), grad=g[i],
                               hess=h[i], mu=mu[i], A=float(A[i]), xi=xi[i], nu=nu[i], S=S[i],
                               amc=float(amc[i]), dxi=dxi[i], level=float(levels[i])))
    return out


class Surface:
    """Level sets of F (mode 'poly') or of e^P (mode 'exp', level r of P)."""

    def __init__(self, F: Poly, mode: str = "poly"):
        if mode not in ("poly", "exp"):
            raise ValueError("mode must be 'poly' or 'exp'")
        self.poly = F
        self.mode = mode
        self.jets = _ExpJets(F) if mode == "exp" else _Jets(F)
        self._grad = PolyBank([F] + F.grad())
        self._grad_exact = PolyBank([F] + F.grad(), exact=True)

    @property
    def nvars(self):
        return self.poly.nvars

    def value_grad(self, pts, exact: bool = False):
        v = (self._grad_exact if exact else self._grad)(np.asarray(pts, dtype=float))
        return v[:, 0], v[:, 1:]

    def samples_at(self, pts) -> List[LevelSample]:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        levels = self.value_grad(pts, exact=True)[0]
        return _geometry(self.jets, pts, levels)


def level_sample_at(F: Poly, p: Sequence[float], mode: str = "poly") -> LevelSample:
    return Surface(F, mode).samples_at([p])[0]


# -- sampling ---------------------------------------------------------------------

def _unit(v):
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("zero direction")
    return v / nrm


def find_anchor(F: Poly, r: float, seed: int = 0, tries: int = 2000, origin=None) -> np.ndarray:
    """A point of the level set found along random rays from the origin."""
    surf = Surface(F) if not isinstance(F, Surface) else F
    n = surf.nvars
    o = np.zeros(n) if origin is None else np.asarray(origin, dtype=float)
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        d = _unit(rng.normal(size=n))
        p = _ray_hit(surf, o, d, r, 20.0)
        if p is not None:
            return p
    raise LevelSetEmpty(f"no point with F = {r} found near the origin")


def _ray_hit(surf: Surface, o, d, r, tmax, steps=400, tol=1e-12):
    ts = np.concatenate([[0.0], np.geomspace(1e-4, tmax, steps)])
    vals = surf.value_grad(o[None, :] + ts[:, None] * d[None, :])[0] - r
    sgn = np.sign(vals)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    exact = np.nonzero(vals[1:] == 0)[0]
    if len(exact) and (not len(idx) or exact[0] < idx[0]):
        return o + ts[exact[0] + 1] * d
    if not len(idx):
        return None
    a, b = ts[idx[0]], ts[idx[0] + 1]
    fa = vals[idx[0]]
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = surf.value_grad((o + mid * d)[None, :])[0][0] - r
        if fm == 0:
            a = b = mid
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
        if b - a <= 1e-15 * max(1.0, abs(b)):
            break
    t = 0.5 * (a + b)
    lo, hi = a, b
    scale = tol * max(1.0, abs(r))
    for _ in range(50):
        val, grad = surf.value_grad((o + t * d)[None, :], exact=True)
        f = val[0] - r
        if abs(f) <= scale:
            return o + t * d
        fp = float(grad[0] @ d)
        if fp == 0:
            break
        t_new = t - f / fp
        if not (lo - (hi - lo) <= t_new <= hi + (hi - lo)):
            break
        t = t_new
    val = surf.value_grad((o + t * d)[None, :], exact=True)[0][0] - r
    return o + t * d if abs(val) <= scale else None


def sample_level_set(F, r: float, count: int, seed: int = 0, anchor=None, origin=None,
                     cone: float = 0.35, mode: str = "poly", budget: int = 50) -> np.ndarray:
    """Points with |F(p) - r| <= 1e-12 max(1,|r|) on the sheet indicated by the anchor.

    Rays start at ``origin`` (default 0) and point into a cone of half-width ``cone``
    around the direction of the anchor, so samples stay on one sheet.
    """
    surf = F if isinstance(F, Surface) else Surface(F, mode)
    n = surf.nvars
    o = np.zeros(n) if origin is None else np.asarray(origin, dtype=float)
    if anchor is None:
        anchor = find_anchor(surf, r, seed, origin=o)
    a = np.asarray(anchor, dtype=float)
    axis = _unit(a - o)
    reach = 4.0 * max(np.linalg.norm(a - o), 1e-3)
    rng = np.random.default_rng(seed)
    pts = []
    attempts = 0
    while len(pts) < count and attempts < budget * max(count, 1):
        attempts += 1
        d = _unit(axis + cone * rng.normal(size=n))
        p = _ray_hit(surf, o, d, r, reach)
        if p is not None:
            pts.append(p)
    if not pts:
        raise LevelSetEmpty(f"no sign change of F - {r} on any ray within budget")
    if len(pts) < count:
        raise LevelSetEmpty(f"only {len(pts)} of {count} points found within budget")
    return np.array(pts)


# -- affine sphere tests --------------------------------------------------------------

@dataclass
class SphereVerdict:
    kind: str
    center: Optional[List[float]]
    residual: float
    amc_spread: float
    samples: int = 0
    amc_median: float = 0.0
    proper_residual: float = float("inf")
    improper_residual: float = float("inf")
    nu_xi_max: float = 0.0
    shape_grad_max: float = 0.0
    inertia: Optional[tuple] = None

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None or (isinstance(x, float) and math.isinf(x)) else x
        return {"kind": self.kind, "center": self.center, "residual": f(self.residual),
                "amc_spread": self.amc_spread, "amc_median": self.amc_median, "samples": self.samples,
                "proper_residual": f(self.proper_residual), "improper_residual": f(self.improper_residual),
                "nu_xi_max": self.nu_xi_max, "shape_grad_max": self.shape_grad_max,
                "inertia": None if self.inertia is None else list(self.inertia)}


def classify_samples(samples: List[LevelSample], tol: float = CENTER_TOL) -> SphereVerdict:
    amc = np.array([s.amc for s in samples])
    med = float(np.median(amc))
    spread = float(np.max(np.abs(amc - med)))
    scale = max(1.0, float(np.max([np.linalg.norm(s.point) for s in samples])))
    nu_xi = max(abs(s.nu_xi - 1) for s in samples)
    sg = max(s.shape_grad_residual for s in samples)
    from .hessian import inertia
    inert = inertia(samples[0].hess)
    # improper candidate: one common direction for all normals
    dirs = np.array([_unit(s.xi) for s in samples])
    _, _, vt = np.linalg.svd(dirs)
    axis = vt[0]
    if axis @ dirs.sum(axis=0) < 0:
        axis = -axis
    improper_res = float(np.max(np.linalg.norm(dirs - np.outer(dirs @ axis, axis), axis=1)))
    # proper candidate: the points p + xi/H1 coincide
    proper_res = float("inf")
    center = None
    if np.all(np.abs(amc) > tol):
        cands = np.array([s.point + s.xi / s.amc for s in samples])
        center = cands.mean(axis=0)
        proper_res = float(np.max(np.linalg.norm(cands - center, axis=1))) / scale
    verdict = SphereVerdict(NOT_A_SPHERE, None, min(proper_res, improper_res), spread, len(samples), med,
                            proper_res, improper_res, nu_xi, sg, inert)
    if improper_res <= tol and float(np.max(np.abs(amc))) <= tol:
        verdict.kind, verdict.center, verdict.residual = IMPROPER, [float(x) for x in axis], improper_res
    elif proper_res <= tol and spread <= tol:
        verdict.kind, verdict.center, verdict.residual = PROPER, [float(x) for x in center], proper_res
    return verdict


def sphere_test(F: Poly, r: float, samples: int = 100, seed: int = 0, anchor=None, origin=None,
                mode: str = "poly", tol: float = CENTER_TOL, cone: float = 0.35) -> SphereVerdict:
    surf = Surface(F, mode)
    pts = sample_level_set(surf, r, samples, seed, anchor, origin, cone)
    return classify_samples(surf.samples_at(pts), tol)


# -- closed forms for homogeneous solutions -----------------------------------------

def homogeneous_normal(F: Poly, p: Sequence[float], lam: float, alpha: float = 0.0, eps: int = 0,
                       v: Optional[Sequence[float]] = None) -> np.ndarray:
    """Equiaffine normal from the homogeneity field X = (1-eps)x + (2eps-1)v with X(F) = lam F + alpha."""
    s = level_sample_at(F, p)
    N = F.nvars
    n = N - 1
    if lam == 1 - eps:
        raise ValueError("formula needs lam != 1 - eps")
    x = np.asarray(p, dtype=float)
    vv = np.zeros(N) if v is None else np.asarray(v, dtype=float)
    X = (1 - eps) * x + (2 * eps - 1) * vv
    d = lam - 1 + eps
    lf = lam * s.F + alpha
    jets = _Jets(F)
    _, _, h, t, _, _, _ = jets([x])
    ginv = np.linalg.inv(h[0])
    dlogH = np.einsum("ab,abk->k", ginv, t[0])          # d log H
    sharp = ginv @ dlogH
    return (-1.0 / ((n + 2) * d) * abs(lf * s.H / d) ** (1.0 / (n + 2))
            * ((n * (1 - eps) + lam) / lf * X + d * sharp))


def homogeneous_amc(kappa: float, m: int, nvars: int, k: int, r: float) -> float:
    """Affine mean curvature of the level r of a degree-k solution of H(F) = kappa F^m."""
    n = nvars - 1
    B = kappa * (np.sign(r) ** m)
    lam = float(k)
    return float(np.sign(lam * r) * abs(lam - 1) ** (-1.0 / (n + 2)) * abs(lam) ** (-(n + 1) / (n + 2))
                 * abs(B) ** (1.0 / (n + 2)) * abs(r) ** ((lam - 2) / lam - (n + 1) / (n + 2)))


# -- isoparametric checks ---------------------------------------------------------------

def euclidean_gauss_curvature(F: Poly, p: Sequence[float], h: float = 1e-20) -> float:
    """Gauss curvature of the level set through p for the normal -grad F/|grad F|.

    Computed from the derivative of the unit normal in an orthonormal tangent frame, with
    complex-step differentiation (independent of U(F)).
    """
    grad = PolyBank(F.grad())
    x = np.asarray(p, dtype=float)
    N = len(x)

    def unit_normal(z):
        gz = grad(z[None, :].astype(complex))[0]
        return -gz / np.sqrt(np.sum(gz * gz))

    n0 = unit_normal(x.astype(complex)).real
    q, _ = np.linalg.qr(np.column_stack([n0, np.eye(N)]))
    frame = q[:, 1:N]
    dN = np.array([unit_normal(x + 1j * h * e).imag / h for e in frame.T])
    shape = dN @ frame
    return float(np.linalg.det(shape))


@dataclass
class IsoReport:
    level_constancy_symbolic: bool
    mu_wedge_dF_max: float
    mu_wedge_ok: Optional[bool]
    straight_normals_max: float
    straight_normals_ok: bool
    euclid_rel_max: float
    euclid_ok: bool
    samples: int

    def to_dict(self):
        return dict(self.__dict__)


def isoparametric_checks(F: Poly, points, tol: float = DEFAULT_TOL) -> IsoReport:
    surf = Surface(F)
    samples = surf.samples_at(points)
    n = F.nvars - 1
    const = check_level_constancy(u_of_f(F), F)
    wedge = 0.0
    straight = 0.0
    euclid = 0.0
    for s in samples:
        mu, g = s.mu, s.grad
        W = np.outer(mu, g) - np.outer(g, mu)
        wedge = max(wedge, float(np.max(np.abs(W))) / max(np.linalg.norm(mu) * np.linalg.norm(g), 1e-300))
        acc = s.xi @ s.dxi                                   # derivative of xi along xi
        W2 = np.outer(s.xi, acc) - np.outer(acc, s.xi)
        straight = max(straight, float(np.max(np.abs(W2)))
                       / max(np.linalg.norm(s.xi) * max(np.linalg.norm(acc), np.linalg.norm(s.xi) ** 2), 1e-300))
        K = euclidean_gauss_curvature(F, s.point)
        predicted = (-1) ** n * K * np.linalg.norm(g) ** (n + 2)
        euclid = max(euclid, abs(predicted - s.U) / max(abs(s.U), 1e-300))
    return IsoReport(const, wedge, (wedge <= tol) if const else None, straight, straight <= tol,
                     euclid, euclid <= 1e-6, len(samples))


# -- output ---------------------------------------------------------------------------

def samples_to_json(samples: List[LevelSample]) -> str:
    return json.dumps([s.to_dict() for s in samples], sort_keys=True)


def samples_to_csv(samples: List[LevelSample]) -> str:
    if not samples:
        return ""
    N = len(samples[0].point)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(N)] + ["F", "H", "U", "A", "amc", "nu_xi"]
               + [f"xi{i + 1}" for i in range(N)] + [f"nu{i + 1}" for i in range(N)])
    for s in samples:
        w.writerow([repr(float(x)) for x in s.point] + [repr(s.F), repr(s.H), repr(s.U), repr(s.A),
                                                         repr(s.amc), repr(s.nu_xi)]
                   + [repr(float(x)) for x in s.xi] + [repr(float(x)) for x in s.nu])
    return buf.getvalue()
