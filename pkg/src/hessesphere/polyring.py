"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is packed into one Python int: the total degree sits in the top
field and the exponents of x1..xN follow in fixed-width fields, x1 most
significant.  Integer order on packed keys is then graded-lex order, and
multiplying monomials is integer addition.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

BITS = 20
MASK = (1 << BITS) - 1
MAX_EXP = MASK

Number = Union[int, Fraction]


def _norm(c) -> Number:
    """Canonical coefficient: int when integral, else Fraction."""
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def to_fraction(c) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables over Q."""

    __slots__ = ("nvars", "_t", "_hash")

    def __init__(self, nvars: int, packed: Optional[Dict[int, Number]] = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        self._t: Dict[int, Number] = packed if packed is not None else {}
        self._hash = None

    # -- packing -----------------------------------------------------------
    def _shift(self, i: int) -> int:
        return BITS * (self.nvars - 1 - i)

    def _degshift(self) -> int:
        return BITS * self.nvars

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"monomial length {len(exps)} != nvars {self.nvars}")
        key = 0
        deg = 0
        for e in exps:
            if e < 0 or e > MAX_EXP:
                raise ValueError(f"exponent out of range: {e}")
            key = (key << BITS) | e
            deg += e
        return key | (deg << self._degshift())

    def unpack(self, key: int) -> Tuple[int, ...]:
        out = []
        for i in range(self.nvars):
            out.append((key >> self._shift(i)) & MASK)
        return tuple(out)

    def _kdeg(self, key: int) -> int:
        return key >> self._degshift()

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_terms(cls, nvars: int, terms) -> "Poly":
        """Build from a mapping (or iterable of pairs) exponent-tuple -> coefficient."""
        p = cls(nvars)
        items = terms.items() if hasattr(terms, "items") else terms
        t: Dict[int, Number] = {}
        for exps, c in items:
            c = _norm(c)
            if c == 0:
                continue
            k = p.pack(tuple(exps))
            v = t.get(k, 0) + c
            if v == 0:
                t.pop(k, None)
            else:
                t[k] = _norm(v)
        p._t = t
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        c = _norm(c)
        return cls(nvars, {0: c} if c != 0 else {})

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        """The coordinate x_{i+1} (0-based index i)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} vars")
        p = cls(nvars)
        p._t = {(1 << p._shift(i)) | (1 << p._degshift()): 1}
        return p

    @classmethod
    def gens(cls, nvars: int) -> List["Poly"]:
        return [cls.var(i, nvars) for i in range(nvars)]

    # -- inspection --------------------------------------------------------
    @property
    def terms(self) -> Dict[Tuple[int, ...], Fraction]:
        """Exponent tuple -> Fraction, in descending graded-lex order."""
        return {self.unpack(k): Fraction(self._t[k]) for k in sorted(self._t, reverse=True)}

    def items(self) -> Iterator[Tuple[Tuple[int, ...], Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> Fraction:
        return Fraction(self._t.get(0, 0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._t:
            return -1
        return self._kdeg(max(self._t))

    def leading(self) -> Tuple[Tuple[int, ...], Fraction]:
        k = max(self._t)
        return self.unpack(k), Fraction(self._t[k])

    def vars_used(self) -> List[int]:
        used = set()
        for k in self._t:
            for i in range(self.nvars):
                if (k >> self._shift(i)) & MASK:
                    used.add(i)
        return sorted(used)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._t) > len(self._t):
            a, b = other._t, self._t
        else:
            a, b = self._t, other._t
        t = dict(a)
        for k, c in b.items():
            v = t.get(k, 0) + c
            if v == 0:
                t.pop(k, None)
            else:
                t[k] = _norm(v)
        return Poly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = _norm(c)
        if c == 0:
            return Poly(self.nvars)
        return Poly(self.nvars, {k: _norm(v * c) for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: Dict[int, Number] = {}
        get = t.get
        a, b = self._t.items(), list(other._t.items())
        for ka, ca in a:
            for kb, cb in b:
                k = ka + kb
                t[k] = get(k, 0) + ca * cb
        return Poly(self.nvars, {k: _norm(v) for k, v in t.items() if v != 0})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero constant")
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, q: int):
        if not isinstance(q, int) or q < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1, self.nvars)
        base = self
        while q:
            if q & 1:
                result = result * base
            q >>= 1
            if q:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._t.items())))
        return self._hash

    # -- calculus and evaluation -------------------------------------------
    def diff(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} vars")
        sh = self._shift(i)
        dec = (1 << sh) + (1 << self._degshift())
        t = {}
        for k, c in self._t.items():
            e = (k >> sh) & MASK
            if e:
                t[k - dec] = _norm(c * e)
        return Poly(self.nvars, t)

    def grad(self) -> List["Poly"]:
        return [self.diff(i) for i in range(self.nvars)]

    def eval(self, point: Sequence) -> Fraction:
        """Exact value at a point of rationals (ints, Fractions or 'p/q')."""
        if len(point) != self.nvars:
            raise ValueError(f"point length {len(point)} != nvars {self.nvars}")
        pt = [_norm(to_fraction(v)) for v in point]
        return Fraction(self._eval_raw(pt))

    def _eval_raw(self, pt):
        # pt entries may be any ring elements supporting * and +, e.g. ints or floats
        cache: List[Dict[int, object]] = [dict() for _ in range(self.nvars)]
        total = 0
        for k, c in self._t.items():
            term = c
            for i in range(self.nvars):
                e = (k >> self._shift(i)) & MASK
                if e:
                    pw = cache[i].get(e)
                    if pw is None:
                        pw = pt[i] ** e
                        cache[i][e] = pw
                    term = term * pw
            total = total + term
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        return float(self._eval_raw([float(v) for v in point]))

    def exponent_matrix(self):
        """(exponents as list of tuples, coefficients as floats) for vectorised evaluation."""
        keys = sorted(self._t, reverse=True)
        return [self.unpack(k) for k in keys], [float(self._t[k]) for k in keys]

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute x_i -> images[i]; the images may live in a different ring."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not images:
            raise ValueError("no images")
        target = images[0].nvars
        cache: List[Dict[int, Poly]] = [dict() for _ in range(self.nvars)]

        def pw(i, e):
            r = cache[i].get(e)
            if r is None:
                r = images[i] ** e
                cache[i][e] = r
            return r

        total = Poly(target)
        for k, c in self._t.items():
            term = Poly.const(c, target)
            for i in range(self.nvars):
                e = (k >> self._shift(i)) & MASK
                if e:
                    term = term * pw(i, e)
            total = total + term
        return total

    def embed(self, nvars: int, offset: int = 0) -> "Poly":
        """Same polynomial viewed in a larger ring, variables shifted by ``offset``."""
        if offset + self.nvars > nvars:
            raise ValueError("target ring too small")
        pad = nvars - offset - self.nvars
        return Poly.from_terms(
            nvars, [((0,) * offset + e + (0,) * pad, c) for e, c in self.terms.items()])

    # -- text --------------------------------------------------------------
    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Poly({self.nvars}, {to_text(self)!r})"


# ---------------------------------------------------------------------------
# ring operations as plain functions

def add(a: Poly, b: Poly) -> Poly:
    return a + b


def mul(a: Poly, b: Poly) -> Poly:
    return a * b


def pow(a: Poly, q: int) -> Poly:  # noqa: A001 - mirrors the ring operation name
    return a ** q


def diff(a: Poly, var: int) -> Poly:
    return a.diff(var)


def eval_poly(a: Poly, point: Sequence) -> Fraction:
    return a.eval(point)


def homogeneity(a: Poly) -> Optional[Union[int, str]]:
    """Common total degree of all terms, None if mixed, ZERO for the zero polynomial."""
    if a.is_zero():
        return ZERO
    degs = {a._kdeg(k) for k in a._t}
    return degs.pop() if len(degs) == 1 else None


ZERO = "zero polynomial"


def divide_exact(a: Poly, b: Poly) -> Optional[Poly]:
    """Quotient q with a = q*b, or None when b does not divide a."""
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return Poly(a.nvars)
    lb = max(b._t)
    lcb = b._t[lb]
    nv = a.nvars
    fields = [(BITS * (nv - 1 - i)) for i in range(nv)]
    lb_exps = [(lb >> s) & MASK for s in fields]
    rem = dict(a._t)
    q: Dict[int, Number] = {}
    bt = list(b._t.items())
    while rem:
        lr = max(rem)
        # leading monomial of b must divide leading monomial of the remainder
        for s, e in zip(fields, lb_exps):
            if ((lr >> s) & MASK) < e:
                return None
        mk = lr - lb
        mc = _norm(Fraction(rem[lr]) / lcb)
        q[mk] = mc
        for kb, cb in bt:
            k = kb + mk
            v = rem.get(k, 0) - mc * cb
            if v == 0:
                rem.pop(k, None)
            else:
                rem[k] = _norm(v)
    return Poly(nv, q)


def _mat_inverse(m: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    aug = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def substitute_affine(a: Poly, linear: Sequence[Sequence], shift: Optional[Sequence] = None) -> Poly:
    """P(Lx + s): precompose with the affine map x -> linear @ x + shift.

    The matrix must be invertible over Q.
    """
    n = a.nvars
    L = [[to_fraction(x) for x in row] for row in linear]
    if len(L) != n or any(len(row) != n for row in L):
        raise ValueError("linear part must be n x n")
    _mat_inverse(L)  # raises on singular input
    s = [to_fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    xs = Poly.gens(n)
    images = []
    for i in range(n):
        img = Poly.const(s[i], n)
        for j in range(n):
            if L[i][j] != 0:
                img = img + xs[j].scale(L[i][j])
        images.append(img)
    return a.compose(images)


def inverse_affine(linear, shift=None):
    """Linear part and shift of the inverse affine map."""
    Li = _mat_inverse(linear)
    n = len(Li)
    s = [to_fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    si = [-sum(Li[i][j] * s[j] for j in range(n)) for i in range(n)]
    return Li, si


class RationalFn:
    """A quotient num/den of polynomials.  Not reduced to lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        lc = den.leading()[1]
        # content-normalise so the denominator's leading coefficient is 1
        self.num = num.scale(1 / lc)
        self.den = den.scale(1 / lc)

    @property
    def nvars(self):
        return self.num.nvars

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        raise TypeError("RationalFn is unhashable: equality is by cross-multiplication")

    def eval(self, point) -> Fraction:
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        return self.num.eval(point) / d

    def degree(self) -> int:
        return self.num.degree() - self.den.degree()

    def __repr__(self):
        return f"RationalFn(({to_text(self.num)}) / ({to_text(self.den)}))"


# ---------------------------------------------------------------------------
# text grammar

def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_text(p: Poly) -> str:
    """Canonical rendering: graded-lex descending, e.g. ``x1^2*x2 - 1/2*x3 + 4``."""
    if p.is_zero():
        return "0"
    parts = []
    for exps, c in p.terms.items():
        mono = "*".join(
            f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
        elif ch == "x":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("variable name needs an index", i)
            toks.append(("var", int(text[i + 1:j]), i))
            i = j
        elif ch in "+-*/^()":
            toks.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(("end", None, len(text)))
    return toks


def parse_poly(text: str, nvars: Optional[int] = None) -> Poly:
    """Parse the polynomial grammar: x1..xN, integers, p/q, + - * ^ and parentheses.

    ``nvars`` defaults to the largest variable index present (at least 1).
    Division is accepted only by a nonzero constant.
    """
    toks = _tokenize(text)
    maxvar = max((v for kind, v, _ in toks if kind == "var"), default=1)
    if any(kind == "var" and v < 1 for kind, v, _ in toks):
        pos = next(p for kind, v, p in toks if kind == "var" and v < 1)
        raise ParseError("variables are numbered from x1", pos)
    n = nvars if nvars is not None else maxvar
    if maxvar > n:
        pos = next(p for kind, v, p in toks if kind == "var" and v > n)
        raise ParseError(f"unknown variable x{maxvar} (ring has {n} variables)", pos)
    pos = 0

    def peek():
        return toks[pos]

    def take(kind=None):
        nonlocal pos
        t = toks[pos]
        if kind is not None and t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2])
        pos += 1
        return t

    def expr():
        node = term()
        while peek()[0] in "+-":
            op = take()[0]
            rhs = term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term():
        node = unary()
        while peek()[0] in ("*", "/"):
            op, _, where = take()
            rhs = unary()
            if op == "*":
                node = node * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by a nonzero constant", where)
                node = node / rhs.constant_value()
        return node

    def unary():
        if peek()[0] == "-":
            take()
            return -unary()
        if peek()[0] == "+":
            take()
            return unary()
        return power()

    def power():
        base = primary()
        if peek()[0] == "^":
            take()
            e = take("int")[1]
            return base ** e
        return base

    def primary():
        kind, val, where = peek()
        if kind == "int":
            take()
            return Poly.const(val, n)
        if kind == "var":
            take()
            return Poly.var(val - 1, n)
        if kind == "(":
            take()
            node = expr()
            take(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", where)
        raise ParseError(f"unexpected token {val!r}", where)

    result = expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input {peek()[1]!r}", peek()[2])
    return result


def from_text(text: str, nvars: Optional[int] = None) -> Poly:
    return parse_poly(text, nvars)


def product(polys: Iterable[Poly], nvars: int) -> Poly:
    out = Poly.const(1, nvars)
    for p in polys:
        out = out * p
    return out
