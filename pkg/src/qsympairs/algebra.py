"""Normal-form engine for U_q(g').

Elements are finite linear combinations of normal monomials
``E_{w} K_beta F_{v}`` where ``w`` and ``v`` are canonical words for their
weight space (shared by U^+ and U^-, since both satisfy the same Serre
relations).  Canonical words are the words that are not the leading (largest
in lexicographic order) word of any element of the Serre ideal; they are
computed weight by weight through exact Gaussian elimination and cached.
"""

from __future__ import annotations

import re
import threading
from itertools import product as iproduct
from typing import Callable, Iterator, Mapping, Sequence

from .cartan import CartanDatum
from .errors import DivisionByZero, HeightCapExceeded, ParseError
from .scalar import ONE, ZERO, Coeff, ParamPoly, Scalar, as_coeff, parse_coeff, q_binomial, q_factorial, qpow

__all__ = ["Uq", "Elem", "TElem", "WordBasis", "DEFAULT_CAP"]

DEFAULT_CAP = 20

Word = tuple
Mono = tuple  # (eword, kvec, fword)


def _add_into(d: dict, key, c) -> None:
    v = d.get(key)
    if v is None:
        d[key] = c
        return
    v = v + c
    if v:
        d[key] = v
    else:
        del d[key]


def _clean(c):
    if isinstance(c, ParamPoly):
        return c.simplify()
    return c


class WordBasis:
    """Canonical words per weight for the algebra on generators x_i modulo Serre relations.

    Subclasses provide ``d``, ``n``, ``cap``, ``serre(i, j)`` and the unit
    coefficient ``_unit``; coefficients need ring operations and ``inverse``.
    """

    def _init_words(self, d: CartanDatum, cap: int) -> None:
        self.d = d
        self.n = d.n
        self.cap = cap
        self._lock = threading.RLock()
        # weight -> (standard words, {pivot word: {standard word: coef}})
        self._basis: dict = {}
        self._reduce_memo: dict = {}

    # -- lattice helpers -----------------------------------------------------
    def wt(self, word: Word) -> tuple:
        v = [0] * self.n
        for i in word:
            v[i] += 1
        return tuple(v)

    def form(self, a: Sequence[int], b: Sequence[int]) -> int:
        return self.d.bilinear(a, b)

    def simple(self, i: int) -> tuple:
        return self.d.simple(i)

    # -- weight bases ------------------------------------------------------------
    def _check_height(self, word: Word) -> None:
        if len(word) > self.cap:
            raise HeightCapExceeded(f"word of height {len(word)} exceeds the cap {self.cap}")

    def _basis_for(self, mu: tuple):
        got = self._basis.get(mu)
        if got is not None:
            return got
        with self._lock:
            got = self._basis.get(mu)
            if got is None:
                got = self._build_basis(mu)
                self._basis[mu] = got
        return got

    def _build_basis(self, mu: tuple):
        h = sum(mu)
        if h > self.cap:
            raise HeightCapExceeded(f"weight of height {h} exceeds the cap {self.cap}")
        if h == 0:
            return ((),), {}
        if h == 1:
            return ((mu.index(1),),), {}
        # candidate words x_k c with c standard at mu - alpha_k
        cands = []
        for k in range(self.n):
            if mu[k] == 0:
                continue
            sub = tuple(m - (1 if t == k else 0) for t, m in enumerate(mu))
            for c in self._basis_for(sub)[0]:
                cands.append((k,) + c)
        cands.sort()
        pivots: dict = {}
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                m = 1 - self.d.a[i][j]
                rest = list(mu)
                rest[i] -= m
                rest[j] -= 1
                if min(rest) < 0:
                    continue
                rel = self.serre(i, j)
                for c2 in self._basis_for(tuple(rest))[0]:
                    row: dict = {}
                    for w, c in rel.items():
                        full = w + c2
                        first = full[0]
                        for tail, ct in self._reduce_word(full[1:]).items():
                            _add_into(row, (first,) + tail, c * ct)
                    self._eliminate(row, pivots)
        std = tuple(w for w in cands if w not in pivots)
        table = {p: {w: -c for w, c in row.items() if w != p} for p, row in pivots.items()}
        return std, table

    @staticmethod
    def _eliminate(row: dict, pivots: dict) -> None:
        for p in [w for w in row if w in pivots]:
            c = row.get(p)
            if c:
                for w, pc in pivots[p].items():
                    _add_into(row, w, -c * pc)
        if not row:
            return
        lead = max(row)
        inv = row[lead].inverse()
        row = {w: c * inv for w, c in row.items()}
        for p, prow in pivots.items():
            c = prow.get(lead)
            if c:
                for w, rc in row.items():
                    _add_into(prow, w, -c * rc)
        pivots[lead] = row

    def weight_basis(self, mu: Sequence[int], sign: str = "+") -> tuple:
        """Canonical words of weight mu (identical for U^+ and U^-)."""
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        mu = tuple(mu)
        if len(mu) != self.n or min(mu) < 0:
            raise ValueError("mu must be a vector in Q^+")
        return self._basis_for(mu)[0]

    def _reduce_word(self, word: Word) -> dict:
        """Express a word as a combination of canonical words of its weight."""
        if len(word) <= 1:
            return {word: self._unit}
        got = self._reduce_memo.get(word)
        if got is not None:
            return got
        self._check_height(word)
        table = self._basis_for(self.wt(word))[1]
        out = self._reduce_via_tail(word, self._reduce_word(word[1:]), table)
        self._reduce_memo[word] = out
        return out

    def _reduce_via_tail(self, word: Word, tail: dict, table: dict) -> dict:
        out: dict = {}
        first = word[0]
        for t, c in tail.items():
            w = (first,) + t
            rep = table.get(w)
            if rep is None:
                _add_into(out, w, c)
            else:
                for w2, c2 in rep.items():
                    _add_into(out, w2, c * c2)
        return out

    def reduce_word(self, word: Sequence[int]) -> dict:
        return dict(self._reduce_word(tuple(word)))

class Uq(WordBasis):
    """The algebra U_q(g') for a Cartan datum, with its caches."""

    _unit = ONE

    def __init__(self, d: CartanDatum, cap: int = DEFAULT_CAP):
        self._init_words(d, cap)
        self.zero_k = (0,) * d.n
        self._straight_memo: dict = {}
        self._mul_memo: dict = {}
        self._cop_memo: dict = {}
        self.qi = tuple(qpow(e) for e in d.eps)
        self.qi_diff_inv = tuple((qpow(e) - qpow(-e)).inverse() for e in d.eps)

    # -- Serre relations -------------------------------------------------------
    def serre(self, i: int, j: int) -> dict:
        """F_ij(x_i, x_j) as {word: coef} in the free algebra."""
        m = 1 - self.d.a[i][j]
        out: dict = {}
        for k in range(m + 1):
            c = q_binomial(m, k, self.d.eps[i])
            if k % 2:
                c = -c
            _add_into(out, (i,) * (m - k) + (j,) + (i,) * k, c)
        return out

    # -- straightening F-words past E-words ---------------------------------------
    def _straighten(self, f: Word, e: Word) -> dict:
        """F_f E_e as {(e', k', f'): coef} with raw (not yet canonical) words."""
        if not f or not e:
            return {(e, self.zero_k, f): ONE}
        key = (f, e)
        got = self._straight_memo.get(key)
        if got is not None:
            return got
        j = f[-1]
        aj = self.simple(j)
        first: dict = {(e, self.zero_k, (j,)): ONE}
        kp = aj
        km = tuple(-x for x in aj)
        inv = self.qi_diff_inv[j]
        for p, ep in enumerate(e):
            if ep != j:
                continue
            c = self.form(aj, self.wt(e[p + 1:]))
            rest = e[:p] + e[p + 1:]
            _add_into(first, (rest, kp, ()), -inv.mul_qpow(c))
            _add_into(first, (rest, km, ()), inv.mul_qpow(-c))
        prefix = f[:-1]
        out: dict = {}
        for (e1, k1, f1), c1 in first.items():
            for (e2, k2, f2), c2 in self._straighten(prefix, e1).items():
                c = c1 * c2
                if f2:
                    c = c.mul_qpow(self.form(k1, self.wt(f2)))
                _add_into(out, (e2, tuple(a + b for a, b in zip(k2, k1)), f2 + f1), c)
        self._straight_memo[key] = out
        return out

    def _canon_terms(self, e: Word, k: tuple, f: Word, c) -> Iterator[tuple]:
        re_ = self._reduce_word(e)
        rf = self._reduce_word(f)
        for we, ce in re_.items():
            c1 = c if ce is ONE else c * ce
            for wf, cf in rf.items():
                yield (we, k, wf), (c1 if cf is ONE else c1 * cf)

    def mono_mul(self, a: Mono, b: Mono) -> dict:
        key = (a, b)
        got = self._mul_memo.get(key)
        if got is not None:
            return got
        e1, k1, f1 = a
        e2, k2, f2 = b
        out: dict = {}
        for (e, g, f), c in self._straighten(f1, e2).items():
            s = (self.form(k1, self.wt(e)) if e else 0) + (self.form(k2, self.wt(f)) if f else 0)
            c = c.mul_qpow(s)
            kk = tuple(x + y + z for x, y, z in zip(k1, g, k2))
            for m, cc in self._canon_terms(e1 + e, kk, f + f2, c):
                _add_into(out, m, cc)
        self._mul_memo[key] = out
        return out

    # -- constructors -------------------------------------------------------------
    def elem(self, terms: Mapping | None = None) -> "Elem":
        return Elem(self, terms or {})

    def one(self) -> "Elem":
        return Elem(self, {((), self.zero_k, ()): ONE})

    def zero(self) -> "Elem":
        return Elem(self, {})

    def scalar(self, c) -> "Elem":
        c = as_coeff(c)
        return Elem(self, {((), self.zero_k, ()): c} if c else {})

    def E(self, i: int) -> "Elem":
        return Elem(self, {((i,), self.zero_k, ()): ONE})

    def F(self, i: int) -> "Elem":
        return Elem(self, {((), self.zero_k, (i,)): ONE})

    def K(self, beta: Sequence[int]) -> "Elem":
        return Elem(self, {((), tuple(beta), ()): ONE})

    def Ki(self, i: int, power: int = 1) -> "Elem":
        return self.K(tuple(power if t == i else 0 for t in range(self.n)))

    def E_word(self, word: Sequence[int]) -> "Elem":
        return self.elem({m: c for m, c in self._canon_terms(tuple(word), self.zero_k, (), ONE)})

    def F_word(self, word: Sequence[int]) -> "Elem":
        return self.elem({m: c for m, c in self._canon_terms((), self.zero_k, tuple(word), ONE)})

    def E_div(self, i: int, n: int) -> "Elem":
        """Divided power E_i^(n)."""
        return self.E_word((i,) * n) * q_factorial(n, self.d.eps[i]).inverse()

    def F_div(self, i: int, n: int) -> "Elem":
        return self.F_word((i,) * n) * q_factorial(n, self.d.eps[i]).inverse()

    def K_commutator(self, i: int) -> "Elem":
        """(K_i - K_i^{-1}) / (q_i - q_i^{-1})."""
        return (self.Ki(i) - self.Ki(i, -1)) * self.qi_diff_inv[i]

    # -- Hopf structure -------------------------------------------------------------
    def mono_coproduct(self, m: Mono) -> dict:
        got = self._cop_memo.get(m)
        if got is not None:
            return got
        e, k, f = m
        sym = self.d.sym
        parts_e = []
        for mask in iproduct((0, 1), repeat=len(e)):
            s = 0
            for p, bp in enumerate(mask):
                if bp:
                    for r in range(p + 1, len(e)):
                        if not mask[r]:
                            s += sym[e[p]][e[r]]
            left = tuple(x for x, b in zip(e, mask) if not b)
            right = tuple(x for x, b in zip(e, mask) if b)
            parts_e.append((left, self.wt(right), right, s))
        parts_f = []
        for mask in iproduct((0, 1), repeat=len(f)):
            s = 0
            for p, bp in enumerate(mask):
                if not bp:
                    for r in range(p):
                        if mask[r]:
                            s -= sym[f[p]][f[r]]
            left = tuple(x for x, b in zip(f, mask) if not b)
            right = tuple(x for x, b in zip(f, mask) if b)
            parts_f.append((left, self.wt(left), right, s))
        out: dict = {}
        for le, we, re_, se in parts_e:
            k1 = tuple(a + b for a, b in zip(k, we))
            for lf, wf, rf, sf in parts_f:
                k2 = tuple(a - b for a, b in zip(k, wf))
                c = qpow(se + sf)
                for m1, c1 in self._canon_terms(le, k1, lf, c):
                    for m2, c2 in self._canon_terms(re_, k2, rf, c1):
                        _add_into(out, (m1, m2), c2)
        self._cop_memo[m] = out
        return out

    def coproduct(self, a: "Elem") -> "TElem":
        out: dict = {}
        for m, c in a.terms.items():
            for mm, cc in self.mono_coproduct(m).items():
                _add_into(out, mm, cc * c)
        return TElem(self, out)

    def counit(self, a: "Elem") -> Coeff:
        tot = ZERO
        for (e, k, f), c in a.terms.items():
            if not e and not f:
                tot = tot + c
        return _clean(tot)

    def antipode(self, a: "Elem") -> "Elem":
        out = self.zero()
        for (e, k, f), c in a.terms.items():
            t = self.scalar(c)
            for j in reversed(f):
                t = t * (-(self.F(j) * self.Ki(j)))
            t = t * self.K(tuple(-x for x in k))
            for i in reversed(e):
                t = t * (-(self.Ki(i, -1) * self.E(i)))
            out = out + t
        return out

    def ad(self, x: "Elem", u: "Elem") -> "Elem":
        """Left adjoint action ad(x)(u) = x_(1) u S(x_(2))."""
        out = self.zero()
        for (m1, m2), c in self.coproduct(x).terms.items():
            out = out + Elem(self, {m1: c}) * u * self.antipode(Elem(self, {m2: ONE}))
        return out

    def ad_word(self, word: Sequence[int], u: "Elem") -> "Elem":
        """ad(E_{w1} ... E_{wk})(u), computed as nested single-generator actions."""
        out = u
        for i in reversed(tuple(word)):
            out = self.ad_E(i, out)
        return out

    def ad_E(self, i: int, u: "Elem") -> "Elem":
        """ad(E_i)(u) = E_i u - K_i u K_i^{-1} E_i."""
        Ei = self.E(i)
        return Ei * u - self.Ki(i) * u * self.Ki(i, -1) * Ei

    # -- projections -------------------------------------------------------------------
    def project_P(self, lam: Sequence[int], a: "Elem") -> "Elem":
        lam = tuple(lam)
        keep = {}
        for (e, k, f), c in a.terms.items():
            wf = self.wt(f)
            if tuple(x - y for x, y in zip(k, wf)) == lam:
                keep[(e, k, f)] = c
        return Elem(self, keep)

    def project_pi(self, alpha: Sequence[int], beta: Sequence[int], a: "Elem") -> "Elem":
        alpha, beta = tuple(alpha), tuple(beta)
        return Elem(self, {m: c for m, c in a.terms.items() if self.wt(m[0]) == alpha and self.wt(m[2]) == beta})

    # -- text --------------------------------------------------------------------------
    def label(self, i: int) -> str:
        return str(self.d.labels[i])

    def parse(self, text: str) -> "Elem":
        return _ElemParser(self, text).parse()

    def format_mono(self, m: Mono) -> str:
        e, k, f = m
        toks = [f"E{self.label(i)}" for i in e]
        if any(k):
            toks.append("K[" + ",".join(str(x) for x in k) + "]")
        toks += [f"F{self.label(i)}" for i in f]
        return " ".join(toks) if toks else "1"


def _mono_key(m: Mono):
    e, k, f = m
    return (len(e) + len(f), e, f, k)


class Elem:
    """An element of U_q(g') in normal form; immutable by convention."""

    __slots__ = ("U", "terms")

    def __init__(self, U: Uq, terms: Mapping):
        self.U = U
        self.terms = {m: _clean(c) for m, c in terms.items() if c}

    # -- arithmetic ----------------------------------------------------------------
    def _coerce(self, other) -> "Elem | None":
        if isinstance(other, Elem):
            return other
        if isinstance(other, (Scalar, ParamPoly)) or (isinstance(other, int) and not isinstance(other, bool)):
            return self.U.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            _add_into(out, m, c)
        return Elem(self.U, out)

    __radd__ = __add__

    def __neg__(self):
        return Elem(self.U, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Elem":
        c = as_coeff(c)
        if not c:
            return Elem(self.U, {})
        return Elem(self.U, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Scalar, ParamPoly)) or (isinstance(other, int) and not isinstance(other, bool)):
            return self.scale(other)
        if not isinstance(other, Elem):
            return NotImplemented
        U = self.U
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                cc = c1 * c2
                for m, c in U.mono_mul(m1, m2).items():
                    _add_into(out, m, c * cc if not c.is_one() else cc)
        return Elem(U, out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, ParamPoly)) or (isinstance(other, int) and not isinstance(other, bool)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, ParamPoly):
            other = other.simplify()
        return self.scale(Scalar.coerce(other).inverse())

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of algebra elements are not supported")
        out = self.U.one()
        for _ in range(k):
            out = out * self
        return out

    # -- comparison ------------------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, Elem) else other
        if o is None:
            return NotImplemented
        if self.terms.keys() != o.terms.keys():
            return False
        return all(c == o.terms[m] for m, c in self.terms.items())

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure ---------------------------------------------------------------------
    def weight(self) -> tuple | None:
        """Common weight wt(E) - wt(F) if homogeneous, else None."""
        ws = {tuple(a - b for a, b in zip(self.U.wt(e), self.U.wt(f))) for (e, _, f) in self.terms}
        return ws.pop() if len(ws) == 1 else None

    def weights(self) -> set:
        return {tuple(a - b for a, b in zip(self.U.wt(e), self.U.wt(f))) for (e, _, f) in self.terms}

    def map_coeffs(self, fn: Callable) -> "Elem":
        return Elem(self.U, {m: fn(c) for m, c in self.terms.items()})

    def subs(self, values: Mapping) -> "Elem":
        return self.map_coeffs(lambda c: c.subs(values) if isinstance(c, ParamPoly) else c)

    def coefficient(self, m: Mono) -> Coeff:
        return self.terms.get(m, ZERO)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            ms = self.U.format_mono(m)
            cs = str(c)
            neg = False
            if " " in cs:
                cs = f"({cs})"
            elif cs.startswith("-"):
                neg, cs = True, cs[1:]
            if ms == "1":
                body = cs
            elif cs == "1":
                body = ms
            else:
                body = f"{cs}*{ms}"
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, b in parts[1:]:
            out += (" - " if neg else " + ") + b
        return out

    def __repr__(self):
        return f"Elem({self})"

    def to_json(self) -> list:
        U = self.U
        return [
            {
                "E": [U.d.labels[i] for i in e],
                "K": list(k),
                "F": [U.d.labels[i] for i in f],
                "coef": str(c),
            }
            for (e, k, f), c in self.sorted_terms()
        ]


class TElem:
    """An element of U_q(g') tensor U_q(g'), as {(mono, mono): coef}."""

    __slots__ = ("U", "terms")

    def __init__(self, U: Uq, terms: Mapping):
        self.U = U
        self.terms = {m: _clean(c) for m, c in terms.items() if c}

    @classmethod
    def pure(cls, a: Elem, b: Elem) -> "TElem":
        out: dict = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                _add_into(out, (m1, m2), c1 * c2)
        return cls(a.U, out)

    def __add__(self, other):
        if not isinstance(other, TElem):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return TElem(self.U, out)

    def __neg__(self):
        return TElem(self.U, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TElem":
        c = as_coeff(c)
        return TElem(self.U, {m: v * c for m, v in self.terms.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, (Scalar, ParamPoly, int)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, TElem):
            return NotImplemented
        U = self.U
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                cc = c1 * c2
                left = U.mono_mul(a1, a2)
                right = U.mono_mul(b1, b2)
                for ma, ca in left.items():
                    for mb, cb in right.items():
                        _add_into(out, (ma, mb), cc * ca * cb)
        return TElem(U, out)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, TElem):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(c == other.terms[m] for m, c in self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def by_second(self) -> dict:
        """Group as {second-factor monomial: first-factor Elem}."""
        out: dict = {}
        for (m1, m2), c in self.terms.items():
            out.setdefault(m2, {})[m1] = c
        return {m2: Elem(self.U, t) for m2, t in out.items()}

    def by_first(self) -> dict:
        out: dict = {}
        for (m1, m2), c in self.terms.items():
            out.setdefault(m1, {})[m2] = c
        return {m1: Elem(self.U, t) for m1, t in out.items()}

    def apply(self, f1: Callable | None, f2: Callable | None) -> "TElem":
        """(f1 tensor f2) for linear maps on Elems; None means identity."""
        out = TElem(self.U, {})
        for (m1, m2), c in self.terms.items():
            a = Elem(self.U, {m1: c})
            b = Elem(self.U, {m2: ONE})
            out = out + TElem.pure(f1(a) if f1 else a, f2(b) if f2 else b)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        U = self.U
        items = sorted(self.terms.items(), key=lambda t: (_mono_key(t[0][1]), _mono_key(t[0][0])))
        return " + ".join(f"({c})*[{U.format_mono(a)} (x) {U.format_mono(b)}]" for (a, b), c in items)

    def __repr__(self):
        return f"TElem({self})"


# ---------------------------------------------------------------------------
# Element text syntax
# ---------------------------------------------------------------------------

_ETOK = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<K>K\[\s*-?\d+(?:\s*,\s*-?\d+)*\s*\])|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class _ElemParser:
    """expr := term (('+'|'-') term)*; term := unary (['*'|'/'] unary)*;
    juxtaposition multiplies; atoms are integers, q, i, parameters,
    E<label>, F<label>, K<label>, K[..] and parenthesized expressions."""

    def __init__(self, U: Uq, text: str):
        self.U = U
        self.text = text
        self.toks = []
        pos = 0
        s = text.strip()
        while pos < len(s):
            m = _ETOK.match(s, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos} in {text!r}")
            kind = m.lastgroup
            val = m.group(kind)
            if kind == "op" and val == "**":
                val = "^"
            self.toks.append((kind, val))
            pos = m.end()
            while pos < len(s) and s[pos].isspace():
                pos += 1
        self.pos = 0
        labels = {str(l): k for k, l in enumerate(U.d.labels)}
        self.labels = labels

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        if t[0] is None:
            raise ParseError(f"unexpected end of {self.text!r}")
        self.pos += 1
        return t

    def parse(self) -> Elem:
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

    def _starts_atom(self):
        k, v = self.peek()
        return k in ("int", "K", "name") or (k, v) == ("op", "(")

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
                if any(m != ((), self.U.zero_k, ()) for m in w.terms):
                    raise ParseError("division by a non-scalar element")
                c = w.terms.get(((), self.U.zero_k, ()))
                if c is None:
                    raise DivisionByZero("division by zero")
                if isinstance(c, ParamPoly):
                    raise ParseError("division by a parameter is not supported")
                v = v / c
            elif self._starts_atom():
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
        base, invertible = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            if self.peek() == ("op", "("):
                self.take()
                e = self._signed_int()
                if self.take() != ("op", ")"):
                    raise ParseError("expected ')'")
            else:
                e = self._signed_int()
            if e < 0:
                if invertible is None:
                    raise ParseError("negative power of a non-invertible element")
                return invertible ** (-e)
            return base ** e
        return base

    def _signed_int(self) -> int:
        sign = 1
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.take()[1] == "-":
                sign = -sign
        k, v = self.take()
        if k != "int":
            raise ParseError("expected an integer exponent")
        return sign * int(v)

    def atom(self):
        U = self.U
        k, v = self.take()
        if k == "int":
            s = Scalar.from_int(int(v))
            return U.scalar(s), (U.scalar(s.inverse()) if int(v) else None)
        if k == "K":
            vec = tuple(int(x) for x in v[2:-1].split(","))
            if len(vec) != U.n:
                raise ParseError(f"K vector {v} has wrong length")
            return U.K(vec), U.K(tuple(-x for x in vec))
        if k == "name":
            if v in ("q", "i"):
                s = parse_coeff(v)
                return U.scalar(s), U.scalar(s.inverse())
            if v[0] in "EFK" and v[1:] in self.labels:
                idx = self.labels[v[1:]]
                if v[0] == "E":
                    return U.E(idx), None
                if v[0] == "F":
                    return U.F(idx), None
                return U.Ki(idx), U.Ki(idx, -1)
            if v[0] in "EFK" and v[1:] and v[1:].isdigit():
                raise ParseError(f"unknown generator index in {v!r}")
            return U.scalar(ParamPoly.var(v)), None
        if (k, v) == ("op", "("):
            e = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("expected ')'")
            inv = None
            if len(e.terms) == 1:
                (m, c), = e.terms.items()
                if not m[0] and not m[2] and isinstance(c, Scalar):
                    inv = U.K(tuple(-x for x in m[1])).scale(c.inverse())
            return e, inv
        raise ParseError(f"unexpected token {v!r} in {self.text!r}")
