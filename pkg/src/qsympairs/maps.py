"""(Anti)automorphisms of U_q(g') given by generator images: omega, psi,
sigma, diagram maps, character twists, Lusztig automorphisms T_i, T_w, T_X
and the quantum involution theta_q(X, tau).
"""

from __future__ import annotations

from typing import Callable, Sequence

from .algebra import Elem, Uq
from .cartan import DiagramMap
from .errors import DegeneratePair, InvalidCharacter
from .scalar import ONE, Coeff, ParamPoly, Scalar, as_coeff, qpow
from .weyl import AdmissiblePair, Character, act

__all__ = [
    "Morphism",
    "identity",
    "omega",
    "psi",
    "sigma_anti",
    "tau_map",
    "ad_char",
    "lusztig_T",
    "T_word",
    "T_X",
    "theta_q",
    "builtin",
    "verify_morphism",
    "braid_check",
    "braid_order",
    "tw_on_X_table",
    "defining_relations",
    "eval_free",
]


class Morphism:
    """An algebra (anti)automorphism of U_q(g') determined by generator images.

    ``kimg[i] = (c, v)`` means K_{alpha_i} maps to c * K_v.
    """

    def __init__(self, U: Uq, eimg: Sequence[Elem], fimg: Sequence[Elem], kimg: Sequence[tuple],
                 kind: str = "hom", name: str = ""):
        if kind not in ("hom", "antihom"):
            raise ValueError("kind must be 'hom' or 'antihom'")
        self.U = U
        self.eimg = tuple(eimg)
        self.fimg = tuple(fimg)
        self.kimg = tuple((as_coeff(c), tuple(v)) for c, v in kimg)
        self.kind = kind
        self.name = name
        self._word_memo: dict = {}
        self._mono_memo: dict = {}

    # -- application -------------------------------------------------------------
    def K_image(self, beta: Sequence[int]) -> Elem:
        U = self.U
        c: Coeff = ONE
        vec = [0] * U.n
        for i, b in enumerate(beta):
            if not b:
                continue
            ci, vi = self.kimg[i]
            if isinstance(ci, ParamPoly):
                if b < 0:
                    raise InvalidCharacter("negative power of a symbolic K scalar")
                c = c * ci ** b
            elif not ci.is_one():
                c = c * ci ** b
            for t, x in enumerate(vi):
                vec[t] += b * x
        return U.K(tuple(vec)).scale(c)

    def _word_image(self, kind: str, word: tuple) -> Elem:
        """Image of E_word (kind 'E') or F_word (kind 'F'), respecting self.kind."""
        if not word:
            return self.U.one()
        key = (kind, word)
        got = self._word_memo.get(key)
        if got is not None:
            return got
        imgs = self.eimg if kind == "E" else self.fimg
        if self.kind == "hom":
            out = self._word_image(kind, word[:-1]) * imgs[word[-1]]
        else:
            out = imgs[word[-1]] * self._word_image(kind, word[:-1])
        self._word_memo[key] = out
        return out

    def apply_mono(self, m: tuple) -> Elem:
        got = self._mono_memo.get(m)
        if got is not None:
            return got
        e, k, f = m
        ie = self._word_image("E", e)
        ik = self.K_image(k)
        if_ = self._word_image("F", f)
        out = ie * ik * if_ if self.kind == "hom" else if_ * ik * ie
        self._mono_memo[m] = out
        return out

    def __call__(self, a: Elem) -> Elem:
        out = self.U.zero()
        terms: dict = {}
        for m, c in a.terms.items():
            img = self.apply_mono(m)
            for mm, cc in img.terms.items():
                v = terms.get(mm)
                w = cc * c
                terms[mm] = w if v is None else v + w
        return Elem(self.U, terms) if terms else out

    # -- composition ----------------------------------------------------------------
    def __mul__(self, other: "Morphism") -> "Morphism":
        """Composition self o other."""
        if not isinstance(other, Morphism):
            return NotImplemented
        U = self.U
        eimg = [self(x) for x in other.eimg]
        fimg = [self(x) for x in other.fimg]
        kimg = []
        for c, v in other.kimg:
            img = self.K_image(v)
            (m, cc), = img.terms.items()
            kimg.append((c * cc, m[1]))
        kind = "hom" if self.kind == other.kind else "antihom"
        name = f"{self.name}*{other.name}" if self.name and other.name else ""
        return Morphism(U, eimg, fimg, kimg, kind, name)

    def on_generators(self) -> dict:
        U = self.U
        return {
            **{f"E{U.label(i)}": self.eimg[i] for i in range(U.n)},
            **{f"F{U.label(i)}": self.fimg[i] for i in range(U.n)},
            **{f"K{U.label(i)}": self.K_image(U.simple(i)) for i in range(U.n)},
        }

    def equals_on_generators(self, other: "Morphism") -> bool:
        return (self.eimg == other.eimg and self.fimg == other.fimg
                and all(self.K_image(self.U.simple(i)) == other.K_image(self.U.simple(i)) for i in range(self.U.n)))

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind,
                "images": {k: str(v) for k, v in self.on_generators().items()}}


def _neg_vec(v):
    return tuple(-x for x in v)


def identity(U: Uq) -> Morphism:
    return Morphism(U, [U.E(i) for i in range(U.n)], [U.F(i) for i in range(U.n)],
                    [(ONE, U.simple(i)) for i in range(U.n)], "hom", "id")


def omega(U: Uq) -> Morphism:
    """E_i -> -F_i, F_i -> -E_i, K_beta -> K_{-beta}."""
    return Morphism(U, [-U.F(i) for i in range(U.n)], [-U.E(i) for i in range(U.n)],
                    [(ONE, _neg_vec(U.simple(i))) for i in range(U.n)], "hom", "omega")


def psi(U: Uq) -> Morphism:
    """E_i -> E_i K_i, F_i -> K_i^{-1} F_i, K fixed."""
    return Morphism(U, [U.E(i) * U.Ki(i) for i in range(U.n)], [U.Ki(i, -1) * U.F(i) for i in range(U.n)],
                    [(ONE, U.simple(i)) for i in range(U.n)], "hom", "psi")


def sigma_anti(U: Uq) -> Morphism:
    """Antiautomorphism E -> E, F -> F, K_beta -> K_{-beta}."""
    return Morphism(U, [U.E(i) for i in range(U.n)], [U.F(i) for i in range(U.n)],
                    [(ONE, _neg_vec(U.simple(i))) for i in range(U.n)], "antihom", "sigma")


def tau_map(U: Uq, tau: DiagramMap) -> Morphism:
    if not tau.preserves(U.d):
        raise ValueError("tau is not a diagram automorphism")
    return Morphism(U, [U.E(tau(i)) for i in range(U.n)], [U.F(tau(i)) for i in range(U.n)],
                    [(ONE, U.simple(tau(i))) for i in range(U.n)], "hom", "tau")


def ad_char(U: Uq, x: Character | Sequence) -> Morphism:
    """Ad(x): scales the weight-beta component by x(beta)."""
    vals = x.values if isinstance(x, Character) else tuple(as_coeff(v) for v in x)
    if any(not v for v in vals):
        raise InvalidCharacter("character values must be nonzero")
    inv = [v.inverse() if isinstance(v, Scalar) else None for v in vals]
    if any(v is None for v in inv):
        raise InvalidCharacter("character values must be invertible scalars")
    return Morphism(U, [U.E(i).scale(vals[i]) for i in range(U.n)], [U.F(i).scale(inv[i]) for i in range(U.n)],
                    [(ONE, U.simple(i)) for i in range(U.n)], "hom", "Ad")


def _lusztig(U: Uq, i: int) -> Morphism:
    d = U.d
    qi = d.eps[i]
    eimg, fimg, kimg = [], [], []
    for j in range(U.n):
        kimg.append((ONE, act(d, (i,), U.simple(j))))
        if j == i:
            eimg.append(-(U.F(i) * U.Ki(i)))
            fimg.append(-(U.Ki(i, -1) * U.E(i)))
            continue
        m = -d.a[i][j]
        te = U.zero()
        tf = U.zero()
        for r in range(m + 1):
            s = m - r
            sign = -1 if r % 2 else 1
            te = te + (U.E_div(i, s) * U.E(j) * U.E_div(i, r)).scale(qpow(-qi * r) * sign)
            tf = tf + (U.F_div(i, r) * U.F(j) * U.F_div(i, s)).scale(qpow(qi * r) * sign)
        eimg.append(te)
        fimg.append(tf)
    return Morphism(U, eimg, fimg, kimg, "hom", f"T{U.label(i)}")


def lusztig_T(U: Uq, i: int, exp: int = 1) -> Morphism:
    """Lusztig automorphism T_i (exp=1) or its inverse sigma o T_i o sigma (exp=-1)."""
    key = (i, exp)
    cache = U.__dict__.setdefault("_lusztig_cache", {})
    if key in cache:
        return cache[key]
    if exp == 1:
        out = _lusztig(U, i)
    elif exp == -1:
        s = sigma_anti(U)
        out = s * _lusztig(U, i) * s
        out.name = f"T{U.label(i)}^-1"
    else:
        raise ValueError("exp must be +1 or -1")
    cache[key] = out
    return out


def T_word(U: Uq, word: Sequence[int]) -> Morphism:
    """T_{i1} o ... o T_{ik} for the word (i1, ..., ik)."""
    out = identity(U)
    # applying a single T_i to the accumulated images keeps intermediate products small
    for i in reversed(tuple(word)):
        out = lusztig_T(U, i) * out
    out.name = "T[" + ",".join(U.label(i) for i in word) + "]"
    return out


def T_X(U: Uq, pair: AdmissiblePair) -> Morphism:
    out = T_word(U, pair.wX) * psi(U)
    out.name = "T_X"
    return out


def theta_q(U: Uq, pair: AdmissiblePair) -> Morphism:
    """theta_q(X, tau) = Ad(s(X, tau)) o T_X o tau o omega."""
    if pair.degenerate:
        raise DegeneratePair("theta_q is not defined for X = I")
    cache = U.__dict__.setdefault("_theta_cache", {})
    key = (pair.X, pair.tau.perm, pair.order)
    if key in cache:
        return cache[key]
    out = ad_char(U, pair.s) * T_X(U, pair) * tau_map(U, pair.tau) * omega(U)
    out.name = "theta_q"
    cache[key] = out
    return out


def builtin(U: Uq, name: str, pair: AdmissiblePair | None = None, tau: DiagramMap | None = None,
            x: Character | None = None) -> Morphism:
    name = name.lower()
    if name == "omega":
        return omega(U)
    if name == "psi":
        return psi(U)
    if name in ("sigma", "sigma_anti"):
        return sigma_anti(U)
    if name in ("id", "identity"):
        return identity(U)
    if name == "tau":
        t = tau or (pair.tau if pair else None)
        if t is None:
            raise ValueError("tau map needs a diagram automorphism")
        return tau_map(U, t)
    if name in ("ad", "ad_char"):
        if x is None:
            raise ValueError("ad_char needs a character")
        return ad_char(U, x)
    if name in ("ad_s", "s"):
        if pair is None:
            raise ValueError("ad_s needs a pair")
        return ad_char(U, pair.s)
    if name in ("theta_q", "theta"):
        if pair is None:
            raise ValueError("theta_q needs a pair")
        return theta_q(U, pair)
    if name == "t_x":
        if pair is None:
            raise ValueError("T_X needs a pair")
        return T_X(U, pair)
    if name.startswith("t") and name[1:]:
        lab = name[1:]
        exp = 1
        if lab.endswith("^-1"):
            lab, exp = lab[:-3], -1
        return lusztig_T(U, U.d.index(lab), exp)
    raise ValueError(f"unknown map {name!r}")


# ---------------------------------------------------------------------------
# Relations and verification
# ---------------------------------------------------------------------------

# free polynomials: {tuple of symbols: coef}; symbols ('E', i), ('F', i), ('K', i, e)


def eval_free(poly: dict, images: Callable, U: Uq, reverse: bool = False) -> Elem:
    """Evaluate a free polynomial with ``images(symbol) -> Elem``."""
    out = U.zero()
    for word, c in poly.items():
        t = U.one()
        seq = reversed(word) if reverse else word
        for sym in seq:
            t = t * images(sym)
        out = out + t.scale(c)
    return out


def defining_relations(U: Uq, max_degree: int | None = None) -> list[tuple[str, dict]]:
    """Relations of U_q(g') as (name, free polynomial) pairs, all equal to zero."""
    d = U.d
    rels = []
    for i in range(U.n):
        rels.append((f"K{U.label(i)}K{U.label(i)}^-1", {(("K", i, 1), ("K", i, -1)): ONE, (): -ONE}))
        for j in range(U.n):
            if i < j:
                rels.append((f"[K{U.label(i)},K{U.label(j)}]",
                             {(("K", i, 1), ("K", j, 1)): ONE, (("K", j, 1), ("K", i, 1)): -ONE}))
            qq = qpow(d.sym[i][j])
            rels.append((f"K{U.label(i)}E{U.label(j)}",
                         {(("K", i, 1), ("E", j)): ONE, (("E", j), ("K", i, 1)): -qq}))
            rels.append((f"K{U.label(i)}F{U.label(j)}",
                         {(("K", i, 1), ("F", j)): ONE, (("F", j), ("K", i, 1)): -qpow(-d.sym[i][j])}))
            rel = {(("E", i), ("F", j)): ONE, (("F", j), ("E", i)): -ONE}
            if i == j:
                inv = U.qi_diff_inv[i]
                rel[(("K", i, 1),)] = -inv
                rel[(("K", i, -1),)] = inv
            rels.append((f"[E{U.label(i)},F{U.label(j)}]", rel))
    for i in range(U.n):
        for j in range(U.n):
            if i == j:
                continue
            deg = 2 - d.a[i][j]
            if max_degree is not None and deg > max_degree:
                continue
            s = U.serre(i, j)
            for x in "EF":
                rels.append((f"Serre_{x}({U.label(i)},{U.label(j)})",
                             {tuple((x, t) for t in w): c for w, c in s.items()}))
    return rels


def _images_of(m: Morphism) -> Callable:
    def img(sym):
        if sym[0] == "E":
            return m.eimg[sym[1]]
        if sym[0] == "F":
            return m.fimg[sym[1]]
        _, i, e = sym
        v = [0] * m.U.n
        v[i] = e
        return m.K_image(tuple(v))

    return img


def verify_morphism(m: Morphism, max_degree: int | None = None) -> dict:
    """Apply ``m`` to every defining relation; report those not mapped to zero."""
    U = m.U
    img = _images_of(m)
    failures = []
    rels = defining_relations(U, max_degree)
    for name, rel in rels:
        val = eval_free(rel, img, U, reverse=(m.kind == "antihom"))
        if val:
            failures.append({"relation": name, "residue": str(val)})
    return {"map": m.name, "checked": len(rels), "ok": not failures, "failures": failures}


def braid_order(U: Uq, i: int, j: int) -> int:
    p = U.d.a[i][j] * U.d.a[j][i]
    orders = {0: 2, 1: 3, 2: 4, 3: 6}
    if p not in orders:
        raise ValueError(f"no braid relation for a_ij a_ji = {p}")
    return orders[p]


def braid_check(U: Uq, i: int, j: int) -> dict:
    m = braid_order(U, i, j)
    w1 = tuple(i if k % 2 == 0 else j for k in range(m))
    w2 = tuple(j if k % 2 == 0 else i for k in range(m))
    a = T_word(U, w1)
    b = T_word(U, w2)
    bad = [g for g, v in a.on_generators().items() if v != b.on_generators()[g]]
    return {"i": U.label(i), "j": U.label(j), "m": m, "ok": not bad, "failures": bad}


def tw_on_X_table(U: Uq, pair: AdmissiblePair) -> dict:
    """Check the six images of T_{w_X}^{+-1} on E_i, F_i, K_i for i in X."""
    Tw = T_word(U, pair.wX)
    Tw_inv = identity(U)
    for i in pair.wX:
        Tw_inv = lusztig_T(U, i, -1) * Tw_inv
    rows = []
    for i in pair.xs:
        t = pair.tauX[i]
        expect = {
            "T(E)": -(U.F(t) * U.Ki(t)),
            "T(F)": -(U.Ki(t, -1) * U.E(t)),
            "T(K)": U.Ki(t, -1),
            "Tinv(E)": -(U.Ki(t, -1) * U.F(t)),
            "Tinv(F)": -(U.E(t) * U.Ki(t)),
            "Tinv(K)": U.Ki(t, -1),
        }
        got = {
            "T(E)": Tw(U.E(i)),
            "T(F)": Tw(U.F(i)),
            "T(K)": Tw(U.Ki(i)),
            "Tinv(E)": Tw_inv(U.E(i)),
            "Tinv(F)": Tw_inv(U.F(i)),
            "Tinv(K)": Tw_inv(U.Ki(i)),
        }
        for k in expect:
            rows.append({"i": U.label(i), "image": k, "ok": expect[k] == got[k], "got": str(got[k])})
    return {"ok": all(r["ok"] for r in rows), "rows": rows}
