"""Exact scalars: the field Q(i)(q), symbolic parameter polynomials over it,
q-numbers, evaluation at q = 1, and a small expression grammar.

A :class:`Scalar` is stored as ``a + i*b`` with ``a, b`` in Q(q); each part is a
reduced fraction of ``flint.fmpq_poly`` values with monic denominator.  Since
``{1, i}`` is a basis of Q(i)(q) over Q(q), this representation is canonical
and equality is structural.  The canonical numerator/denominator pair over
Q(i) is available through :meth:`Scalar.num_den`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from flint import fmpq, fmpq_poly

from .errors import DivisionByZero, NoSquareRootInField, ParseError, PoleAtOne

__all__ = [
    "GaussRat",
    "Scalar",
    "ParamPoly",
    "Coeff",
    "ZERO",
    "ONE",
    "Q",
    "I_UNIT",
    "qpow",
    "q_int",
    "q_factorial",
    "q_binomial",
    "eval_at_one",
    "field_ops",
    "parse_scalar",
    "parse_coeff",
    "as_coeff",
    "format_coeff",
]

_P0 = fmpq_poly([])
_P1 = fmpq_poly([1])
_X = fmpq_poly([0, 1])


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


class GaussRat:
    """An element ``re + i*im`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _of(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    def __add__(self, other):
        try:
            o = GaussRat._of(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRat._of(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussRat._of(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        try:
            o = GaussRat._of(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise DivisionByZero("division by zero in Q(i)")
        p = self * o.conj()
        return GaussRat(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        return GaussRat._of(other) / self

    def inverse(self) -> "GaussRat":
        return GaussRat(1) / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussRat(1) / (self ** (-k))
        out = GaussRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussRat._of(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({self})"

    def __str__(self):
        return str(Scalar.from_gauss(self))


# ---------------------------------------------------------------------------
# Q(q) helpers on (numerator, denominator) pairs of fmpq_poly
# ---------------------------------------------------------------------------


def _reduce(n: fmpq_poly, d: fmpq_poly):
    if n.is_zero():
        return _P0, _P1
    if d.degree() == 0:
        c = d[0]
        return (n if c == 1 else n / c), _P1
    g = n.gcd(d)
    if g.degree() > 0:
        n = n // g
        d = d // g
    lc = d[d.degree()]
    if lc != 1:
        n = n / lc
        d = d / lc
    return n, d


def _qf_add(an, ad, bn, bd):
    if bn.is_zero():
        return an, ad
    if an.is_zero():
        return bn, bd
    if ad == _P1:
        if bd == _P1:
            return an + bn, _P1
        return an * bd + bn, bd
    if bd == _P1:
        return an + bn * ad, ad
    if ad == bd:
        return _reduce(an + bn, ad)
    return _reduce(an * bd + bn * ad, ad * bd)


def _qf_mul(an, ad, bn, bd):
    if an.is_zero() or bn.is_zero():
        return _P0, _P1
    if ad == _P1 and bd == _P1:
        return an * bn, _P1
    return _reduce(an * bn, ad * bd)


def _xpow(k: int) -> fmpq_poly:
    got = _XPOW.get(k)
    if got is None:
        got = _XPOW[k] = _X ** k
    return got


_XPOW: dict = {}


def _shift(n: fmpq_poly, d: fmpq_poly, k: int):
    """(n/d) * q**k for a reduced fraction n/d."""
    if n.is_zero():
        return n, d
    if k > 0:
        # cancel powers of q shared with the denominator
        m = 0
        dd = d.degree()
        while m < k and m < dd and d[m] == 0:
            m += 1
        if m:
            return n * _xpow(k - m), _reduce_shift_den(d, m)
        return n * _xpow(k), d
    k = -k
    m = 0
    nd = n.degree()
    while m < k and m < nd and n[m] == 0:
        m += 1
    nn = _reduce_shift_den(n, m) if m else n
    if m == k:
        return nn, d
    return nn, d * _xpow(k - m)


def _reduce_shift_den(p: fmpq_poly, m: int) -> fmpq_poly:
    """p / q**m for p divisible by q**m."""
    return fmpq_poly(p.coeffs()[m:])


def _is_monomial_den(d: fmpq_poly) -> bool:
    k = d.degree()
    return d == _X ** k if k > 0 else True


def _frac(c: fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _fmt_poly_terms(n: fmpq_poly, shift: int = 0) -> list[tuple[Fraction, int]]:
    coeffs = n.coeffs()
    return [(_frac(c), e + shift) for e, c in reversed(list(enumerate(coeffs))) if c != 0]


def _fmt_terms(terms: list[tuple[Fraction, int]]) -> str:
    if not terms:
        return "0"
    out = []
    for idx, (c, e) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = str(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _fmt_qf(n: fmpq_poly, d: fmpq_poly) -> str:
    if n.is_zero():
        return "0"
    if d == _P1:
        return _fmt_terms(_fmt_poly_terms(n))
    if _is_monomial_den(d):
        return _fmt_terms(_fmt_poly_terms(n, -d.degree()))
    ns = _fmt_terms(_fmt_poly_terms(n))
    ds = _fmt_terms(_fmt_poly_terms(d))
    if len(_fmt_poly_terms(n)) > 1 or "/" in ns:
        ns = f"({ns})"
    return f"{ns}/({ds})"


def _qf_sqrt(n: fmpq_poly, d: fmpq_poly):
    """Square root inside Q(q), or None."""
    if n.is_zero():
        return _P0, _P1
    try:
        rn = n.sqrt()
        rd = d.sqrt()
    except Exception:
        return None
    return _reduce(rn, rd)


# ---------------------------------------------------------------------------
# Scalar
# ---------------------------------------------------------------------------


class Scalar:
    """Element of Q(i)(q), immutable.

    >>> str(parse_scalar("(q^2-1)/(q-1)"))
    'q + 1'
    """

    __slots__ = ("rn", "rd", "jn", "jd", "_hash")

    def __init__(self, rn=_P0, rd=_P1, jn=_P0, jd=_P1):
        # parts are assumed reduced; use the classmethods for raw input
        self.rn = rn
        self.rd = rd
        self.jn = jn
        self.jd = jd
        self._hash = None

    # -- construction ------------------------------------------------------
    @classmethod
    def from_int(cls, n: int) -> "Scalar":
        return cls(fmpq_poly([n]) if n else _P0)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "Scalar":
        return cls(fmpq_poly([fmpq(f.numerator, f.denominator)]) if f else _P0)

    @classmethod
    def from_gauss(cls, g: GaussRat) -> "Scalar":
        rn = fmpq_poly([fmpq(g.re.numerator, g.re.denominator)]) if g.re else _P0
        jn = fmpq_poly([fmpq(g.im.numerator, g.im.denominator)]) if g.im else _P0
        return cls(rn, _P1, jn, _P1)

    @classmethod
    def from_parts(cls, re_num: Iterable, re_den: Iterable = (1,), im_num: Iterable = (), im_den: Iterable = (1,)) -> "Scalar":
        """Build from ascending rational coefficient lists of the real and
        imaginary numerators and denominators."""

        def poly(cs):
            return fmpq_poly([fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in cs])

        rd, jd = poly(re_den), poly(im_den)
        if rd.is_zero() or jd.is_zero():
            raise DivisionByZero("zero denominator")
        rn, rd = _reduce(poly(re_num), rd)
        jn, jd = _reduce(poly(im_num), jd)
        return cls(rn, rd, jn, jd)

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a scalar")
        if isinstance(x, int):
            return Scalar.from_int(x)
        if isinstance(x, Fraction):
            return Scalar.from_fraction(x)
        if isinstance(x, GaussRat):
            return Scalar.from_gauss(x)
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    # -- predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.rn.is_zero() and self.jn.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_real(self) -> bool:
        return self.jn.is_zero()

    def is_one(self) -> bool:
        return self.jn.is_zero() and self.rd == _P1 and self.rn == _P1

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int) and not isinstance(other, bool):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        rn, rd = _qf_add(self.rn, self.rd, other.rn, other.rd)
        if self.jn.is_zero() and other.jn.is_zero():
            return Scalar(rn, rd)
        jn, jd = _qf_add(self.jn, self.jd, other.jn, other.jd)
        return Scalar(rn, rd, jn, jd)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.rn, self.rd, -self.jn, self.jd)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int) and not isinstance(other, bool):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if other is ONE:
            return self
        if self is ONE and isinstance(other, Scalar):
            return other
        if not isinstance(other, Scalar):
            if isinstance(other, int) and not isinstance(other, bool):
                if other == 1:
                    return self
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        if self.jn.is_zero() and other.jn.is_zero():
            rn, rd = _qf_mul(self.rn, self.rd, other.rn, other.rd)
            return Scalar(rn, rd)
        a = _qf_mul(self.rn, self.rd, other.rn, other.rd)
        b = _qf_mul(self.jn, self.jd, other.jn, other.jd)
        c = _qf_mul(self.rn, self.rd, other.jn, other.jd)
        d = _qf_mul(self.jn, self.jd, other.rn, other.rd)
        rn, rd = _qf_add(a[0], a[1], -b[0], b[1])
        jn, jd = _qf_add(c[0], c[1], d[0], d[1])
        return Scalar(rn, rd, jn, jd)

    __rmul__ = __mul__

    def mul_qpow(self, k: int) -> "Scalar":
        """Multiply by q**k without a general gcd."""
        if not k or self.is_zero():
            return self
        rn, rd = _shift(self.rn, self.rd, k)
        if self.jn.is_zero():
            return Scalar(rn, rd)
        jn, jd = _shift(self.jn, self.jd, k)
        return Scalar(rn, rd, jn, jd)

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("division by zero scalar")
        if self.jn.is_zero():
            n, d = self.rn, self.rd
            lc = n[n.degree()]
            return Scalar(d / lc, n / lc)
        # 1/(a+ib) = (a - ib)/(a^2+b^2)
        a2 = _qf_mul(self.rn, self.rd, self.rn, self.rd)
        b2 = _qf_mul(self.jn, self.jd, self.jn, self.jd)
        nn, nd = _qf_add(a2[0], a2[1], b2[0], b2[1])
        lc = nn[nn.degree()]
        inv_n, inv_d = nd / lc, nn / lc
        rn, rd = _qf_mul(self.rn, self.rd, inv_n, inv_d)
        jn, jd = _qf_mul(-self.jn, self.jd, inv_n, inv_d)
        return Scalar(rn, rd, jn, jd)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int) and not isinstance(other, bool):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj_i(self) -> "Scalar":
        """Apply the field automorphism i -> -i."""
        return Scalar(self.rn, self.rd, -self.jn, self.jd)

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction, GaussRat)) and not isinstance(other, bool):
                other = Scalar.coerce(other)
            else:
                return NotImplemented
        return self.rn == other.rn and self.rd == other.rd and self.jn == other.jn and self.jd == other.jd

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(str(p) for p in (self.rn, self.rd, self.jn, self.jd)))
        return self._hash

    # -- evaluation -------------------------------------------------------------
    def eval_at_one(self) -> GaussRat:
        """Value at q = 1; raises :class:`PoleAtOne` off the local ring at q = 1."""
        rd1 = self.rd(1)
        jd1 = self.jd(1)
        if rd1 == 0 or jd1 == 0:
            raise PoleAtOne(f"{self} has a pole at q = 1")
        return GaussRat(_frac(self.rn(1) / rd1), _frac(self.jn(1) / jd1))

    def eval_at(self, x: Fraction) -> GaussRat:
        """Value at a rational q = x; raises :class:`DivisionByZero` at a pole."""
        v = fmpq(x.numerator, x.denominator)
        rd, jd = self.rd(v), self.jd(v)
        if rd == 0 or jd == 0:
            raise DivisionByZero(f"{self} has a pole at q = {x}")
        return GaussRat(_frac(self.rn(v) / rd), _frac(self.jn(v) / jd))

    def is_laurent(self) -> bool:
        return _is_monomial_den(self.rd) and _is_monomial_den(self.jd)

    def laurent_terms(self) -> dict[int, GaussRat]:
        """Exponent -> coefficient, for Laurent polynomials only."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        out: dict[int, GaussRat] = {}
        for c, e in _fmt_poly_terms(self.rn, -self.rd.degree()):
            out[e] = out.get(e, GaussRat()) + GaussRat(c)
        for c, e in _fmt_poly_terms(self.jn, -self.jd.degree()):
            out[e] = out.get(e, GaussRat()) + GaussRat(0, c)
        return {e: c for e, c in out.items() if c}

    def sqrt(self) -> "Scalar":
        """Exact square root in Q(i)(q); raises :class:`NoSquareRootInField`."""
        if self.is_zero():
            return ZERO
        if self.jn.is_zero():
            r = _qf_sqrt(self.rn, self.rd)
            if r is not None:
                return Scalar(*r)
            r = _qf_sqrt(-self.rn, self.rd)
            if r is not None:
                return Scalar(_P0, _P1, *r)
            raise NoSquareRootInField(f"{self} is not a square in Q(i)(q)")
        # z = a + ib = (x + iy)^2 forces a^2 + b^2 = N^2 and x^2 = (a + N)/2
        a = Scalar(self.rn, self.rd)
        b = Scalar(self.jn, self.jd)
        norm = a * a + b * b
        r = _qf_sqrt(norm.rn, norm.rd)
        if r is not None:
            n_ = Scalar(*r)
            for cand in (n_, -n_):
                t = (a + cand) / 2
                x = _qf_sqrt(t.rn, t.rd) if not t.is_zero() else None
                if x is None:
                    continue
                xs = Scalar(*x)
                ys = b / (xs * 2)
                w = xs + ys * I_UNIT
                if w * w == self:
                    return w
        raise NoSquareRootInField(f"{self} is not a square in Q(i)(q)")

    # -- canonical Q(i) form ---------------------------------------------------
    def num_den(self) -> tuple[tuple[GaussRat, ...], tuple[GaussRat, ...]]:
        """Reduced numerator and monic denominator over Q(i), as ascending
        coefficient tuples."""
        from sympy import Poly, QQ_I, Symbol

        if self.jn.is_zero():
            return (tuple(GaussRat(_frac(c)) for c in self.rn.coeffs()) or (GaussRat(),),
                    tuple(GaussRat(_frac(c)) for c in self.rd.coeffs()))
        g = self.rd.gcd(self.jd)
        den = (self.rd * self.jd) // g
        nre = self.rn * (den // self.rd)
        nim = self.jn * (den // self.jd)
        x = Symbol("q")
        deg = max(nre.degree(), nim.degree())
        I = QQ_I.from_sympy(__import__("sympy").I)
        coeffs = []
        for k in range(deg, -1, -1):
            re_ = _frac(nre[k])
            im_ = _frac(nim[k])
            coeffs.append(QQ_I.convert(re_) + QQ_I.convert(im_) * I)
        N = Poly(coeffs, x, domain=QQ_I)
        D = Poly([QQ_I.convert(_frac(c)) for c in reversed(den.coeffs())], x, domain=QQ_I)
        G = N.gcd(D)
        N = N.exquo(G)
        D = D.exquo(G)
        lc = D.LC()
        N = N.quo_ground(lc)
        D = D.quo_ground(lc)

        def conv(P):
            out = []
            for c in reversed(P.rep.to_list()):
                out.append(GaussRat(Fraction(int(c.x.numerator), int(c.x.denominator)),
                                    Fraction(int(c.y.numerator), int(c.y.denominator))))
            return tuple(out)

        return conv(N), conv(D)

    # -- printing -----------------------------------------------------------------
    def __str__(self):
        re_s = _fmt_qf(self.rn, self.rd)
        if self.jn.is_zero():
            return re_s
        im_s = _fmt_qf(self.jn, self.jd)
        if im_s == "1":
            t = "i"
        elif im_s == "-1":
            t = "-i"
        elif " " not in im_s:
            t = ("-i*" + im_s[1:]) if im_s.startswith("-") else ("i*" + im_s)
        else:
            t = f"i*({im_s})"
        if self.rn.is_zero():
            return t
        if t.startswith("-"):
            return f"{re_s} - {t[1:]}"
        return f"{re_s} + {t}"

    def __repr__(self):
        return f"Scalar({self})"


ZERO = Scalar()
ONE = Scalar(_P1)
Q = Scalar(_X)
I_UNIT = Scalar(_P0, _P1, _P1, _P1)


@lru_cache(maxsize=None)
def qpow(k: int) -> Scalar:
    """q**k as a Scalar (cached)."""
    if k == 0:
        return ONE
    if k > 0:
        return Scalar(_X ** k)
    return Scalar(_P1, _X ** (-k))


@lru_cache(maxsize=None)
def q_int(n: int, d: int = 1) -> Scalar:
    """Balanced q-integer [n] at base q**d."""
    if n == 0:
        return ZERO
    if n < 0:
        return -q_int(-n, d)
    out = ZERO
    for k in range(n):
        out = out + qpow(d * (n - 1 - 2 * k))
    return out


@lru_cache(maxsize=None)
def q_factorial(n: int, d: int = 1) -> Scalar:
    out = ONE
    for k in range(1, n + 1):
        out = out * q_int(k, d)
    return out


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int, d: int = 1) -> Scalar:
    """Balanced q-binomial [n choose k] at base q**d; zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("q_binomial requires n >= 0")
    if k < 0 or k > n:
        return ZERO
    return q_factorial(n, d) / (q_factorial(k, d) * q_factorial(n - k, d))


def eval_at_one(a: Scalar) -> GaussRat:
    return a.eval_at_one()


def field_ops(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Parameter polynomials: K(q)[c0, s1, ...]
# ---------------------------------------------------------------------------

Mono = tuple  # tuple[tuple[str, int], ...], sorted by name


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in d.items() if e))


class ParamPoly:
    """Polynomial in named parameters with :class:`Scalar` coefficients.

    Used for symbolic structure constants such as ``c0`` and ``s1``.  Only
    ring operations and division by scalars are supported.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, Scalar] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, name: str) -> "ParamPoly":
        return cls({((name, 1),): ONE})

    @classmethod
    def const(cls, c) -> "ParamPoly":
        return cls({(): Scalar.coerce(c)})

    @staticmethod
    def _of(x) -> "ParamPoly | None":
        if isinstance(x, ParamPoly):
            return x
        if isinstance(x, Scalar):
            return ParamPoly({(): x})
        if isinstance(x, int) and not isinstance(x, bool):
            return ParamPoly({(): Scalar.from_int(x)})
        return None

    def variables(self) -> set[str]:
        return {k for m in self.terms for k, _ in m}

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant(self) -> Scalar:
        return self.terms.get((), ZERO)

    def simplify(self) -> "Coeff":
        """Collapse to a Scalar when no parameter occurs."""
        return self.constant() if self.is_constant() else self

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        o = ParamPoly._of(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return ParamPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = ParamPoly._of(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if not other:
                return ParamPoly()
            return ParamPoly({m: c * other for m, c in self.terms.items()})
        o = ParamPoly._of(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                v = c1 * c2
                w = out.get(m)
                out[m] = v if w is None else w + v
        return ParamPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ParamPoly):
            if not other.is_constant():
                raise TypeError("division by a non-constant parameter polynomial")
            other = other.constant()
        inv = Scalar.coerce(other).inverse()
        return ParamPoly({m: c * inv for m, c in self.terms.items()})

    def inverse(self) -> Scalar:
        if not self.is_constant():
            raise TypeError("inverse of a non-constant parameter polynomial")
        return self.constant().inverse()

    def __pow__(self, k: int):
        if k < 0:
            raise TypeError("negative power of a parameter polynomial")
        out = ParamPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = ParamPoly._of(other)
        if o is None:
            return NotImplemented
        return self.terms.keys() == o.terms.keys() and all(c == o.terms[m] for m, c in self.terms.items())

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def subs(self, values: Mapping[str, "Coeff"]) -> "Coeff":
        out: Coeff = ZERO
        for m, c in self.terms.items():
            t: Coeff = c
            for k, e in m:
                if k in values:
                    t = t * (as_coeff(values[k]) ** e)
                else:
                    t = t * ParamPoly({((k, e),): ONE})
            out = out + t
        return out.simplify() if isinstance(out, ParamPoly) else out

    def eval_at_one(self) -> GaussRat:
        if not self.is_constant():
            raise PoleAtOne(f"symbolic parameters {sorted(self.variables())} have no value at q = 1")
        return self.constant().eval_at_one()

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            cs = str(c)
            ms = "*".join(k if e == 1 else f"{k}^{e}" for k, e in m)
            if not m:
                body = cs
            elif cs == "1":
                body = ms
            elif cs == "-1":
                body = "-" + ms
            elif " " in cs:
                body = f"({cs})*{ms}"
            else:
                body = f"{cs}*{ms}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"ParamPoly({self})"


Coeff = Union[Scalar, ParamPoly]


def as_coeff(x) -> Coeff:
    if isinstance(x, (Scalar, ParamPoly)):
        return x
    if isinstance(x, str):
        return parse_coeff(x)
    return Scalar.coerce(x)


def format_coeff(c: Coeff) -> str:
    return str(c)


# ---------------------------------------------------------------------------
# Expression grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        if m.group(1) is not None:
            out.append(("int", m.group(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2)))
        else:
            tok = m.group(3)
            out.append(("op", "^" if tok == "**" else tok))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text: str, allow_params: bool):
        self.toks = _tokenize(text)
        self.pos = 0
        self.allow_params = allow_params
        self.text = text

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        v = self.expr()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            w = self.unary()
            if op == "*":
                v = v * w
            else:
                if isinstance(w, ParamPoly):
                    w = w.simplify()
                    if isinstance(w, ParamPoly):
                        raise ParseError("division by a parameter is not supported")
                v = v / w
        return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        if self.peek() == ("op", "("):
            self.take()
            e = self.exponent()
            self.take("op", ")")
            return e
        sign = 1
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.take()[1] == "-":
                sign = -sign
        return sign * int(self.take("int")[1])

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.exponent()
            if e < 0:
                if isinstance(base, ParamPoly):
                    base = base.simplify()
                    if isinstance(base, ParamPoly):
                        raise ParseError("negative power of a parameter")
                if not base:
                    raise DivisionByZero("zero to a negative power")
            return base ** e
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "int":
            self.take()
            return Scalar.from_int(int(val))
        if kind == "name":
            self.take()
            if val == "q":
                return Q
            if val == "i":
                return I_UNIT
            if not self.allow_params:
                raise ParseError(f"unknown symbol {val!r}")
            return ParamPoly.var(val)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_scalar(text: str) -> Scalar:
    """Parse an element of Q(i)(q): integers, ``q``, ``i``, ``+ - * / ^``, parentheses."""
    return _Parser(text, allow_params=False).parse()


def parse_coeff(text: str) -> Coeff:
    """Like :func:`parse_scalar` but identifiers other than ``q``/``i`` become parameters."""
    v = _Parser(text, allow_params=True).parse()
    if isinstance(v, ParamPoly):
        return v.simplify()
    return v
