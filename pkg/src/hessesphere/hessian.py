"""Hessian matrix, Hessian determinant H(F), bordered determinant U(F)."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import List, Optional, Sequence

from .polyring import Poly, divide_exact, to_fraction

# Laplace expansion is used up to this size or when the matrix is sparse.
COFACTOR_MAX_DIM = 9
SPARSE_FRACTION = 0.5


class PolyMatrix:
    """Square matrix of polynomials sharing one ring."""

    def __init__(self, entries: Sequence[Sequence[Poly]], symmetric: bool = False):
        self.entries: List[List[Poly]] = [list(r) for r in entries]
        self.dim = len(self.entries)
        if any(len(r) != self.dim for r in self.entries):
            raise ValueError("matrix must be square")
        if self.dim == 0:
            raise ValueError("empty matrix")
        self.nvars = self.entries[0][0].nvars
        if symmetric:
            for i in range(self.dim):
                for j in range(i):
                    assert self.entries[i][j] == self.entries[j][i], "Hessian not symmetric"

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def eval(self, point) -> List[List[Fraction]]:
        return [[e.eval(point) for e in row] for row in self.entries]

    def nonzero_fraction(self) -> float:
        nz = sum(1 for r in self.entries for e in r if not e.is_zero())
        return nz / (self.dim * self.dim)


@lru_cache(maxsize=256)
def second_derivatives(F: Poly):
    """Tuple of tuples F_ij (symmetric, computed once per i<=j)."""
    n = F.nvars
    g = [F.diff(i) for i in range(n)]
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = g[i].diff(j)
    return tuple(g), tuple(tuple(r) for r in rows)


def hessian_matrix(F: Poly) -> PolyMatrix:
    return PolyMatrix(second_derivatives(F)[1], symmetric=True)


def _det_cofactor(M: List[List[Poly]], nvars: int) -> Poly:
    """Laplace expansion along the sparsest remaining row, memoised on the minor."""
    n = len(M)
    nz = [[not M[i][j].is_zero() for j in range(n)] for i in range(n)]
    memo = {}

    def rec(rows: int, cols: int) -> Poly:
        if rows == 0:
            return Poly.const(1, nvars)
        key = (rows, cols)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best, best_cnt = -1, n + 1
        r = rows
        while r:
            i = (r & -r).bit_length() - 1
            r &= r - 1
            cnt = 0
            c = cols
            while c:
                j = (c & -c).bit_length() - 1
                c &= c - 1
                cnt += nz[i][j]
            if cnt < best_cnt:
                best, best_cnt = i, cnt
                if cnt == 0:
                    break
        total = Poly(nvars)
        if best_cnt:
            i = best
            # sign of a cofactor is determined by positions inside the current minor
            row_pos = bin(rows & ((1 << i) - 1)).count("1")
            col_pos = 0
            c = cols
            while c:
                j = (c & -c).bit_length() - 1
                c &= c - 1
                if nz[i][j]:
                    sub = rec(rows & ~(1 << i), cols & ~(1 << j))
                    if not sub.is_zero():
                        term = M[i][j] * sub
                        total = total - term if (row_pos + col_pos) & 1 else total + term
                col_pos += 1
        memo[key] = total
        return total

    full = (1 << n) - 1
    return rec(full, full)


def _det_bareiss(M: List[List[Poly]], nvars: int) -> Poly:
    """Fraction-free elimination over Q[x]; every division is exact."""
    A = [list(r) for r in M]
    n = len(A)
    sign = 1
    prev = Poly.const(1, nvars)
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not A[r][k].is_zero()), None)
            if swap is None:
                return Poly(nvars)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = piv * A[i][j] - A[i][k] * A[k][j]
                q = divide_exact(num, prev)
                if q is None:
                    raise ArithmeticError("Bareiss step was not exact")
                A[i][j] = q
            A[i][k] = Poly(nvars)
        prev = piv
    d = A[n - 1][n - 1]
    return d if sign > 0 else -d


def det_poly(M: PolyMatrix) -> Poly:
    """Exact determinant of a polynomial matrix."""
    rows = M.entries
    if M.dim <= COFACTOR_MAX_DIM or M.nonzero_fraction() <= SPARSE_FRACTION:
        return _det_cofactor(rows, M.nvars)
    return _det_bareiss(rows, M.nvars)


def det_exact(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a rational matrix by integer Bareiss after clearing denominators."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    fr = [[to_fraction(x) for x in r] for r in rows]
    den = 1
    for r in fr:
        for x in r:
            den = lcm(den, x.denominator)
    A = [[int(x * den) for x in r] for r in fr]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        piv = A[k][k]
        rk = A[k]
        for i in range(k + 1, n):
            ri = A[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (piv * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = piv
    return Fraction(sign * A[n - 1][n - 1], den ** n)


def hessian_det(F: Poly) -> Poly:
    return det_poly(hessian_matrix(F))


def bordered_matrix(F: Poly) -> PolyMatrix:
    g, h = second_derivatives(F)
    n = F.nvars
    rows = [list(h[i]) + [g[i]] for i in range(n)]
    rows.append(list(g) + [Poly(n)])
    return PolyMatrix(rows)


def u_of_f(F: Poly) -> Poly:
    """U(F) = -det [[F_ij, F_i], [F_j, 0]]."""
    return -det_poly(bordered_matrix(F))


def twisted_matrix(F: Poly, c) -> PolyMatrix:
    g, h = second_derivatives(F)
    c = to_fraction(c)
    n = F.nvars
    rows = [[h[i][j] + (g[i] * g[j]).scale(c) if c else h[i][j] for j in range(n)]
            for i in range(n)]
    return PolyMatrix(rows, symmetric=True)


def twisted_det(F: Poly, c) -> Poly:
    """det(hess F + c dF (x) dF)."""
    return det_poly(twisted_matrix(F, c))


def hessian_at(F: Poly, point) -> List[List[Fraction]]:
    """Exact Hessian matrix of F at a rational point."""
    h = second_derivatives(F)[1]
    n = F.nvars
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            out[i][j] = out[j][i] = h[i][j].eval(point)
    return out


def hessian_det_at(F: Poly, point) -> Fraction:
    """H(F)(p) without expanding H(F) symbolically."""
    return det_exact(hessian_at(F, point))


def u_of_f_at(F: Poly, point) -> Fraction:
    g = second_derivatives(F)[0]
    hp = hessian_at(F, point)
    gp = [gi.eval(point) for gi in g]
    rows = [r + [gp[i]] for i, r in enumerate(hp)] + [gp + [Fraction(0)]]
    return -det_exact(rows)


def inertia(matrix) -> Optional[tuple]:
    """(positive, negative, zero) eigenvalue counts of a symmetric float matrix."""
    import numpy as np
    w = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    scale = max(1.0, float(np.max(np.abs(w))))
    tol = 1e-10 * scale
    return int((w > tol).sum()), int((w < -tol).sum()), int((abs(w) <= tol).sum())
