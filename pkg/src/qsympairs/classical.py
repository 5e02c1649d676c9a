"""The q = 1 side: U(g') in e-h-f normal form, specialization and the involution theta(X, tau).

Normal monomials are ``e_w h^a f_v`` with ``w``, ``v`` canonical words for
the classical Serre relations and ``h^a = prod_i h_i^{a_i}``. The
specialization map is implemented on the slice of elements whose normal
form coefficients are regular at q = 1, sending K_beta to 1; elements that
would need (K_i; 0)_q style terms are rejected with :class:`PoleAtOne`.
"""

from __future__ import annotations

import re
import threading
from fractions import Fraction
from math import comb
from typing import Iterator, Mapping, Sequence

from .algebra import DEFAULT_CAP, Elem, WordBasis, _add_into
from .cartan import CartanDatum
from .errors import DivisionByZero, ParseError, PoleAtOne
from .maps import theta_q
from .scalar import GaussRat
from .weyl import AdmissiblePair

__all__ = [
    "ClassicalAlgebra",
    "ClassicalElement",
    "classical_algebra",
    "classical_normal_form",
    "specialize",
    "specializable",
    "ClassicalMorphism",
    "classical_theta",
    "involution_check",
    "specialize_B_check",
]

_G1 = GaussRat(1)
_ALGS: dict = {}
_ALG_LOCK = threading.Lock()


class ClassicalAlgebra(WordBasis):
    """U(g') for a Cartan datum, with [h_i, e_j] = a_ij e_j, [e_i, f_j] = delta_ij h_i."""

    _unit = _G1

    def __init__(self, d: CartanDatum, cap: int = DEFAULT_CAP):
        self._init_words(d, cap)
        self.zero_h = (0,) * d.n
        self._straight_memo: dict = {}
        self._mul_memo: dict = {}

    def serre(self, i: int, j: int) -> dict:
        """ad(x_i)^{1 - a_ij}(x_j) as {word: coef}."""
        m = 1 - self.d.a[i][j]
        out: dict = {}
        for k in range(m + 1):
            c = GaussRat(-comb(m, k) if k % 2 else comb(m, k))
            _add_into(out, (i,) * (m - k) + (j,) + (i,) * k, c)
        return out

    def _value(self, lam: Sequence[int], i: int) -> int:
        """lam(h_i) = sum_j lam_j a_ij."""
        return self.d.pair(i, lam)

    def _shift(self, hexp: tuple, lam: Sequence[int]) -> dict:
        """prod_i (h_i + lam(h_i))^{a_i} as {exponent vector: coef}."""
        out = {self.zero_h: _G1}
        for i, a in enumerate(hexp):
            if not a:
                continue
            s = self._value(lam, i)
            factor = {}
            for k in range(a + 1):
                c = comb(a, k) * s ** (a - k)
                if c:
                    factor[k] = GaussRat(c)
            nxt: dict = {}
            for h, c in out.items():
                for k, ck in factor.items():
                    h2 = h[:i] + (h[i] + k,) + h[i + 1:]
                    _add_into(nxt, h2, c * ck)
            out = nxt
        return out

    @staticmethod
    def _hmul(a: dict, b: dict) -> dict:
        out: dict = {}
        for h1, c1 in a.items():
            for h2, c2 in b.items():
                _add_into(out, tuple(x + y for x, y in zip(h1, h2)), c1 * c2)
        return out

    def _straighten(self, f: tuple, e: tuple) -> dict:
        """f_f e_e as {(e', h', f'): coef} with raw words."""
        if not f or not e:
            return {(e, self.zero_h, f): _G1}
        key = (f, e)
        got = self._straight_memo.get(key)
        if got is not None:
            return got
        j = f[-1]
        # f_j e_w = e_w f_j - sum_{p: w_p = j} e_{<p} e_{>p} (h_j + wt(e_{>p})(h_j))
        first: dict = {(e, self.zero_h, (j,)): _G1}
        hj = tuple(1 if t == j else 0 for t in range(self.n))
        for p, ep in enumerate(e):
            if ep != j:
                continue
            rest = e[:p] + e[p + 1:]
            _add_into(first, (rest, hj, ()), -_G1)
            s = self._value(self.wt(e[p + 1:]), j)
            if s:
                _add_into(first, (rest, self.zero_h, ()), GaussRat(-s))
        out: dict = {}
        for (e1, h1, f1), c1 in first.items():
            for (e2, h2, f2), c2 in self._straighten(f[:-1], e1).items():
                # e2 h2 f2 h1 f1 = e2 h2 shift(h1, wt f2) f2 f1
                for h, c in self._hmul({h2: c1 * c2}, self._shift(h1, self.wt(f2))).items():
                    _add_into(out, (e2, h, f2 + f1), c)
        self._straight_memo[key] = out
        return out

    def _canon_terms(self, e: tuple, h: tuple, f: tuple, c) -> Iterator[tuple]:
        for we, ce in self._reduce_word(e).items():
            for wf, cf in self._reduce_word(f).items():
                yield (we, h, wf), c * ce * cf

    def mono_mul(self, a: tuple, b: tuple) -> dict:
        key = (a, b)
        got = self._mul_memo.get(key)
        if got is not None:
            return got
        e1, h1, f1 = a
        e2, h2, f2 = b
        out: dict = {}
        for (e, h, f), c in self._straighten(f1, e2).items():
            # e1 h1 e h f h2 f2 = e1 e shift(h1, wt e) h shift(h2, wt f) f f2
            poly = self._hmul(self._hmul(self._shift(h1, self.wt(e)), {h: c}), self._shift(h2, self.wt(f)))
            for hh, cc in poly.items():
                for m, c3 in self._canon_terms(e1 + e, hh, f + f2, cc):
                    _add_into(out, m, c3)
        self._mul_memo[key] = out
        return out

    # -- constructors ---------------------------------------------------------------
    def elem(self, terms: Mapping | None = None) -> "ClassicalElement":
        return ClassicalElement(self, terms or {})

    def one(self) -> "ClassicalElement":
        return self.elem({((), self.zero_h, ()): _G1})

    def zero(self) -> "ClassicalElement":
        return self.elem({})

    def scalar(self, c) -> "ClassicalElement":
        c = GaussRat._of(c) if not isinstance(c, GaussRat) else c
        return self.elem({((), self.zero_h, ()): c} if c else {})

    def e(self, i: int) -> "ClassicalElement":
        return self.elem({((i,), self.zero_h, ()): _G1})

    def f(self, i: int) -> "ClassicalElement":
        return self.elem({((), self.zero_h, (i,)): _G1})

    def h(self, i: int) -> "ClassicalElement":
        return self.elem({((), tuple(1 if t == i else 0 for t in range(self.n)), ()): _G1})

    def h_vec(self, v: Sequence[int]) -> "ClassicalElement":
        out = self.zero()
        for i, x in enumerate(v):
            if x:
                out = out + self.h(i).scale(GaussRat(x))
        return out

    def e_word(self, word: Sequence[int]) -> "ClassicalElement":
        return self.elem(dict(self._canon_terms(tuple(word), self.zero_h, (), _G1)))

    def f_word(self, word: Sequence[int]) -> "ClassicalElement":
        return self.elem(dict(self._canon_terms((), self.zero_h, tuple(word), _G1)))

    def label(self, i: int) -> str:
        return str(self.d.labels[i])

    def format_mono(self, m: tuple) -> str:
        e, h, f = m
        toks = [f"e{self.label(i)}" for i in e]
        for i, a in enumerate(h):
            if a:
                toks.append(f"h{self.label(i)}" + (f"^{a}" if a > 1 else ""))
        toks += [f"f{self.label(i)}" for i in f]
        return " ".join(toks) if toks else "1"

    def parse(self, text: str) -> "ClassicalElement":
        return _ClassicalParser(self, text).parse()


def classical_algebra(d: CartanDatum, cap: int = DEFAULT_CAP) -> ClassicalAlgebra:
    key = (d, cap)
    with _ALG_LOCK:
        A = _ALGS.get(key)
        if A is None:
            A = _ALGS[key] = ClassicalAlgebra(d, cap)
    return A


def _mono_key(m):
    e, h, f = m
    return (len(e) + sum(h) + len(f), e, f, h)


class ClassicalElement:
    """An element of U(g') in e-h-f normal form with Q(i) coefficients."""

    __slots__ = ("A", "terms")

    def __init__(self, A: ClassicalAlgebra, terms: Mapping):
        self.A = A
        self.terms = {m: c for m, c in terms.items() if c}

    def __add__(self, other):
        if not isinstance(other, ClassicalElement):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return ClassicalElement(self.A, out)

    def __neg__(self):
        return ClassicalElement(self.A, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ClassicalElement):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ClassicalElement":
        c = GaussRat._of(c)
        return ClassicalElement(self.A, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (GaussRat, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ClassicalElement):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                cc = c1 * c2
                for m, c in self.A.mono_mul(m1, m2).items():
                    _add_into(out, m, c * cc)
        return ClassicalElement(self.A, out)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = self.A.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ClassicalElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __bool__(self):
        return bool(self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            ms = self.A.format_mono(m)
            cs = str(c)
            neg = False
            if " " in cs.strip("-") or "+" in cs[1:]:
                cs = f"({cs})"
            elif cs.startswith("-"):
                neg, cs = True, cs[1:]
            body = cs if ms == "1" else (ms if cs == "1" else f"{cs}*{ms}")
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, b in parts[1:]:
            out += (" - " if neg else " + ") + b
        return out

    def __repr__(self):
        return f"ClassicalElement({self})"

    def to_json(self) -> list:
        lab = self.A.d.labels
        return [{"e": [lab[i] for i in e], "h": list(h), "f": [lab[i] for i in f], "coef": str(c)}
                for (e, h, f), c in self.sorted_terms()]


_CTOK = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))")


class _ClassicalParser:
    """Same grammar as the quantum element syntax with atoms e<i>, f<i>, h<i>, integers and i."""

    def __init__(self, A: ClassicalAlgebra, text: str):
        self.A, self.text = A, text
        self.toks = []
        s = text.strip()
        pos = 0
        while pos < len(s):
            m = _CTOK.match(s, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos} in {text!r}")
            kind = m.lastgroup
            val = "^" if m.group(kind) == "**" else m.group(kind)
            self.toks.append((kind, val))
            pos = m.end()
        self.pos = 0
        self.labels = {str(l): k for k, l in enumerate(A.d.labels)}

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        if t[0] is None:
            raise ParseError(f"unexpected end of {self.text!r}")
        self.pos += 1
        return t

    def parse(self) -> ClassicalElement:
        if not self.toks:
            raise ParseError("empty element")
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
        while True:
            t = self.peek()
            if t == ("op", "*"):
                self.take()
                v = v * self.unary()
            elif t == ("op", "/"):
                self.take()
                w = self.unary()
                if any(m != ((), self.A.zero_h, ()) for m in w.terms) or not w:
                    raise ParseError("division by a non-scalar or zero element")
                v = v.scale(_G1 / w.terms[((), self.A.zero_h, ())])
            elif self.peek()[0] in ("int", "name") or self.peek() == ("op", "("):
                v = v * self.power()
            else:
                return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            k, v = self.take()
            if k != "int":
                raise ParseError("expected a nonnegative integer exponent")
            return base ** int(v)
        return base

    def atom(self):
        A = self.A
        k, v = self.take()
        if k == "int":
            return A.scalar(GaussRat(int(v)))
        if k == "name":
            if v == "i":
                return A.scalar(GaussRat(0, 1))
            if v[0] in "efh" and v[1:] in self.labels:
                idx = self.labels[v[1:]]
                return {"e": A.e, "f": A.f, "h": A.h}[v[0]](idx)
            raise ParseError(f"unknown symbol {v!r}")
        if (k, v) == ("op", "("):
            e = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("expected ')'")
            return e
        raise ParseError(f"unexpected token {v!r} in {self.text!r}")


def classical_normal_form(d: CartanDatum, expr: str, cap: int = DEFAULT_CAP) -> ClassicalElement:
    return classical_algebra(d, cap).parse(expr)


# ---------------------------------------------------------------------------
# Specialization
# ---------------------------------------------------------------------------


def specialize(a: Elem) -> ClassicalElement:
    """E-word -> e-word, F-word -> f-word, K_beta -> 1, coefficient -> value at q = 1."""
    A = classical_algebra(a.U.d, a.U.cap)
    out = A.zero()
    for (e, _, f), c in a.sorted_terms():
        v = c.eval_at_one()
        if not v:
            continue
        out = out + (A.e_word(e) * A.f_word(f)).scale(v)
    return out


def specializable(c) -> bool:
    """c lies in A (regular at q = 1) and has value 1 there."""
    try:
        return c.eval_at_one() == _G1
    except (PoleAtOne, DivisionByZero):
        return False


class ClassicalMorphism:
    """Algebra endomorphism of U(g') given on the Chevalley generators."""

    def __init__(self, A: ClassicalAlgebra, eimg: Sequence, fimg: Sequence, himg: Sequence):
        self.A = A
        self.eimg, self.fimg, self.himg = tuple(eimg), tuple(fimg), tuple(himg)

    def apply_mono(self, m: tuple) -> ClassicalElement:
        e, h, f = m
        out = self.A.one()
        for i in e:
            out = out * self.eimg[i]
        for i, a in enumerate(h):
            for _ in range(a):
                out = out * self.himg[i]
        for i in f:
            out = out * self.fimg[i]
        return out

    def __call__(self, x: ClassicalElement) -> ClassicalElement:
        out = self.A.zero()
        for m, c in x.sorted_terms():
            out = out + self.apply_mono(m).scale(c)
        return out

    def to_json(self) -> dict:
        lab = self.A.d.labels
        return {
            **{f"e{lab[i]}": str(v) for i, v in enumerate(self.eimg)},
            **{f"f{lab[i]}": str(v) for i, v in enumerate(self.fimg)},
            **{f"h{lab[i]}": str(v) for i, v in enumerate(self.himg)},
        }


def classical_theta(pair: AdmissiblePair, cap: int = DEFAULT_CAP) -> ClassicalMorphism:
    """theta(X, tau) obtained by specializing theta_q(X, tau)."""
    from .qsp import algebra_for

    U = algebra_for(pair.d, cap)
    A = classical_algebra(pair.d, cap)
    th = theta_q(U, pair)
    eimg = [specialize(th(U.E(i))) for i in range(U.n)]
    fimg = [specialize(th(U.F(i) * U.Ki(i)) * U.Ki(i, -1)) for i in range(U.n)]
    himg = [A.h_vec(pair.theta_coroot(pair.d.simple(i))) for i in range(U.n)]
    return ClassicalMorphism(A, eimg, fimg, himg)


def involution_check(pair: AdmissiblePair, cap: int = DEFAULT_CAP) -> dict:
    """theta(theta(g)) = g for every Chevalley generator g."""
    th = classical_theta(pair, cap)
    A = th.A
    bad = []
    for i in range(A.n):
        for name, g in (("e", A.e(i)), ("f", A.f(i)), ("h", A.h(i))):
            if th(th(g)) != g:
                bad.append(f"{name}{A.label(i)}")
    return {"ok": not bad, "failures": bad, "theta": th.to_json()}


def specialize_B_check(params, cap: int = DEFAULT_CAP) -> dict:
    """specialize(B_i) = f_i + theta(f_i) + s_i(1) for specializable parameters."""
    from .qsp import make_B

    pair = params.pair
    for i, c in params.c.items():
        if not specializable(c):
            raise PoleAtOne(f"c_{pair.d.labels[i]} is not specializable (needs a value 1 at q = 1)")
    th = classical_theta(pair, cap)
    A = th.A
    bad = []
    out = {}
    for i in range(A.n):
        got = specialize(make_B(params, i))
        want = A.f(i) if i in pair.X else A.f(i) + th.fimg[i]
        s = params.s.get(i)
        if s:
            want = want + A.scalar(s.eval_at_one())
        out[A.label(i)] = str(got)
        if got != want:
            bad.append(A.label(i))
    return {"ok": not bad, "failures": bad, "specialized": out}
