"""Weyl group action, parabolic longest elements, admissible pairs, the
involution Theta on the root lattice, the character s(X, tau) and the
parameter domains for the coideal subalgebras.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .cartan import AUT_CAP, CartanDatum, DiagramMap, aut_A, finite_type_subset
from .errors import IndexSetTooLarge, NotFiniteType, ParseError
from .scalar import I_UNIT, ONE, Scalar

__all__ = [
    "act",
    "act_coroot",
    "longest_word",
    "pairing_2rho",
    "AdmissiblePair",
    "AdmissibilityReport",
    "validate_admissible",
    "enumerate_admissible",
    "Character",
    "s_character",
    "ParameterDomains",
    "parameter_domains",
    "integer_kernel",
    "pair_from_json",
    "pair_to_json",
    "make_pair",
]

Vec = tuple


def _reflect(d: CartanDatum, i: int, beta: Vec) -> Vec:
    k = d.pair(i, beta)
    if not k:
        return beta
    out = list(beta)
    out[i] -= k
    return tuple(out)


def act(d: CartanDatum, word: Sequence[int], beta: Vec) -> Vec:
    """Apply the word r_{w1} r_{w2} ... r_{wk} to beta (rightmost letter first)."""
    out = tuple(beta)
    for i in reversed(tuple(word)):
        out = _reflect(d, i, out)
    return out


def act_coroot(d: CartanDatum, word: Sequence[int], h: Vec) -> Vec:
    """Same action on coroot coordinates: r_i(h) = h - alpha_i(h) h_i."""
    out = list(h)
    for i in reversed(tuple(word)):
        k = sum(d.a[j][i] * c for j, c in enumerate(out) if c)
        out[i] -= k
    return tuple(out)


def longest_word(d: CartanDatum, X: Iterable[int]) -> tuple[int, ...]:
    """Reduced word for the longest element of the parabolic subgroup W_X."""
    xs = sorted(set(X))
    if not finite_type_subset(d, xs):
        raise NotFiniteType(f"X = {xs} is not of finite type")
    # lam(h_i) = 1 for i in X, tracked through its values on h_i
    vals = {i: 1 for i in xs}
    record = []
    while True:
        i = next((k for k in xs if vals[k] > 0), None)
        if i is None:
            break
        record.append(i)
        c = vals[i]
        # r_i(lam)(h_k) = lam(h_k) - lam(h_i) alpha_i(h_k) = lam(h_k) - c a_ki
        for k in xs:
            vals[k] -= c * d.a[k][i]
    return tuple(reversed(record))


def positive_coroots(d: CartanDatum, X: Iterable[int]) -> list[Vec]:
    """Positive coroots of Phi_X in h-coordinates (closure of the simple coroots)."""
    xs = sorted(set(X))
    if not xs:
        return []
    if not finite_type_subset(d, xs):
        raise NotFiniteType(f"X = {xs} is not of finite type")
    out = set()
    frontier = [tuple(1 if j == i else 0 for j in range(d.n)) for i in xs]
    out.update(frontier)
    while frontier:
        nxt = []
        for h in frontier:
            for i in xs:
                r = act_coroot(d, (i,), h)
                if all(c >= 0 for c in r) and r not in out:
                    out.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted(out, key=lambda v: (sum(v), v))


def pairing_2rho(d: CartanDatum, X: Iterable[int], j: int) -> int:
    """alpha_j(2 rho_X^vee) as a sum over the positive coroots of Phi_X."""
    return sum(sum(d.a[k][j] * c for k, c in enumerate(h) if c) for h in positive_coroots(d, X))


# ---------------------------------------------------------------------------
# Admissible pairs
# ---------------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    ok: bool
    failures: list  # list[dict(condition=..., detail=...)]
    degenerate: bool = False

    def to_json(self) -> dict:
        return {"admissible": self.ok, "degenerate": self.degenerate, "failures": self.failures}


def _tau_X(d: CartanDatum, X: Sequence[int], w: Sequence[int]) -> dict[int, int]:
    out = {}
    for i in X:
        img = act(d, w, d.simple(i))
        neg = tuple(-c for c in img)
        j = next((k for k in X if neg == d.simple(k)), None)
        out[i] = j
    return out


def validate_admissible(d: CartanDatum, X: Iterable[int], tau: DiagramMap | Sequence[int]) -> AdmissibilityReport:
    """Check finite type of X, tau in Aut(A, X) and conditions (1)-(3).

    Conditions are reported as ``finite_type``, ``aut`` and ``1``, ``2``, ``3``.
    """
    xs = tuple(sorted(set(X)))
    tau = tau if isinstance(tau, DiagramMap) else DiagramMap(tuple(tau))
    fails = []
    if len(tau.perm) != d.n or sorted(tau.perm) != list(range(d.n)):
        return AdmissibilityReport(False, [{"condition": "aut", "detail": "tau is not a permutation of I"}])
    if not finite_type_subset(d, xs):
        return AdmissibilityReport(False, [{"condition": "finite_type", "detail": f"X = {_labs(d, xs)} is not of finite type"}])
    if not tau.preserves(d):
        fails.append({"condition": "aut", "detail": "tau does not preserve the Cartan matrix"})
    if set(tau(i) for i in xs) != set(xs):
        fails.append({"condition": "aut", "detail": "tau does not preserve X"})
    if not (tau * tau).is_identity():
        fails.append({"condition": "1", "detail": "tau^2 != id"})
    w = longest_word(d, xs)
    tx = _tau_X(d, xs, w)
    bad = [i for i in xs if tx[i] != tau(i)]
    if bad:
        fails.append({
            "condition": "2",
            "detail": "tau differs from -w_X on " + ", ".join(str(d.labels[i]) for i in bad),
        })
    odd = [j for j in range(d.n) if j not in xs and tau(j) == j and pairing_2rho(d, xs, j) % 2]
    if odd:
        fails.append({
            "condition": "3",
            "detail": "alpha_j(rho_X^vee) not integral for j = " + ", ".join(str(d.labels[j]) for j in odd),
        })
    return AdmissibilityReport(not fails, fails, degenerate=not fails and len(xs) == d.n)


def _labs(d: CartanDatum, xs) -> list:
    return [d.labels[i] for i in xs]


@dataclass(frozen=True)
class AdmissiblePair:
    """An admissible pair (X, tau) for a Cartan datum, with cached combinatorics."""

    d: CartanDatum
    X: frozenset
    tau: DiagramMap
    order: tuple | None = None  # total order on positions for s(X, tau)

    @cached_property
    def xs(self) -> tuple:
        return tuple(sorted(self.X))

    @cached_property
    def wX(self) -> tuple:
        return longest_word(self.d, self.xs)

    @cached_property
    def tauX(self) -> dict:
        return _tau_X(self.d, self.xs, self.wX)

    @cached_property
    def rho2(self) -> tuple:
        return tuple(pairing_2rho(self.d, self.xs, j) for j in range(self.d.n))

    @property
    def degenerate(self) -> bool:
        return len(self.X) == self.d.n

    @cached_property
    def not_X(self) -> tuple:
        return tuple(i for i in range(self.d.n) if i not in self.X)

    def theta(self, beta: Vec) -> Vec:
        """Theta(beta) = -w_X(tau(beta))."""
        return tuple(-c for c in act(self.d, self.wX, self.tau.act(tuple(beta))))

    def theta_coroot(self, h: Vec) -> Vec:
        """Theta on coroot coordinates: -w_X(tau(h))."""
        return tuple(-c for c in act_coroot(self.d, self.wX, self.tau.act(tuple(h))))

    @cached_property
    def s(self) -> "Character":
        return s_character(self, self.order)

    def label(self) -> str:
        X = ",".join(str(self.d.labels[i]) for i in self.xs)
        cyc = [c for c in self.tau.cycles() if len(c) > 1]
        t = "".join("(" + " ".join(str(self.d.labels[i]) for i in c) + ")" for c in cyc) or "id"
        return f"({{{X}}}, {t})"

    def to_json(self) -> dict:
        return pair_to_json(self)


def make_pair(d: CartanDatum, X: Iterable, tau=None, order=None, check: bool = True) -> AdmissiblePair:
    """Build a pair from labels; ``tau`` may be None, a label mapping or a DiagramMap."""
    xs = frozenset(d.index(x) for x in X)
    if tau is None:
        tm = DiagramMap.identity(d.n)
    elif isinstance(tau, DiagramMap):
        tm = tau
    else:
        perm = list(range(d.n))
        for k, v in dict(tau).items():
            perm[d.index(k)] = d.index(v)
        tm = DiagramMap(tuple(perm))
    if check:
        from .errors import NotAdmissible

        rep = validate_admissible(d, xs, tm)
        if not rep.ok:
            err = NotAdmissible(f"pair is not admissible: {rep.failures}")
            err.report = rep
            raise err
    return AdmissiblePair(d, xs, tm, tuple(order) if order is not None else None)


def enumerate_admissible(d: CartanDatum, cap: int = AUT_CAP) -> list[dict]:
    """All admissible pairs grouped into Aut(A)-orbits.

    Returns a list of orbits; each is ``{"representative": pair, "members": [...],
    "degenerate": bool}``.  Pairs and orbits are sorted deterministically.
    """
    if d.n > cap:
        raise IndexSetTooLarge(f"|I| = {d.n} exceeds the cap {cap}")
    auts = aut_A(d, cap)
    involutions = [s for s in auts if (s * s).is_identity()]
    finite_X = [frozenset(c) for r in range(d.n + 1) for c in itertools.combinations(range(d.n), r)
                if finite_type_subset(d, c)]
    found = []
    for X in finite_X:
        for t in involutions:
            if set(t(i) for i in X) != set(X):
                continue
            if validate_admissible(d, X, t).ok:
                found.append((X, t))

    def key(p):
        return (len(p[0]), tuple(sorted(p[0])), p[1].perm)

    found.sort(key=key)
    seen = set()
    orbits = []
    for X, t in found:
        k = (X, t.perm)
        if k in seen:
            continue
        members = set()
        for s in auts:
            sX = frozenset(s(i) for i in X)
            st = s * t * s.inverse()
            members.add((sX, st.perm))
        for m in members:
            seen.add(m)
        mem = sorted(((X2, DiagramMap(p2)) for X2, p2 in members), key=key)
        orbits.append({
            "representative": AdmissiblePair(d, X, t),
            "members": [AdmissiblePair(d, X2, t2) for X2, t2 in mem],
            "degenerate": len(X) == d.n,
        })
    return orbits


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Character:
    """Group homomorphism Q -> K(q)^x given by its values on the simple roots."""

    values: tuple  # tuple[Scalar, ...]

    def __post_init__(self):
        from .errors import InvalidCharacter

        if any(not v for v in self.values):
            raise InvalidCharacter("character values must be nonzero")

    def __call__(self, beta: Vec) -> Scalar:
        out = ONE
        for v, b in zip(self.values, beta):
            if b:
                out = out * v ** b
        return out

    def __mul__(self, other: "Character") -> "Character":
        return Character(tuple(a * b for a, b in zip(self.values, other.values)))

    def inverse(self) -> "Character":
        return Character(tuple(v.inverse() for v in self.values))

    @classmethod
    def trivial(cls, n: int) -> "Character":
        return cls((ONE,) * n)


def s_character(pair: AdmissiblePair, order: Sequence[int] | None = None) -> Character:
    """The character s(X, tau); ``order`` lists positions from smallest to largest."""
    d = pair.d
    rank = {p: k for k, p in enumerate(order)} if order is not None else {p: p for p in range(d.n)}
    vals = []
    for j in range(d.n):
        t = pair.tau(j)
        if j in pair.X or t == j:
            vals.append(ONE)
            continue
        e = pair.rho2[j]
        base = I_UNIT if rank[t] > rank[j] else -I_UNIT
        vals.append(base ** (e % 4))
    return Character(tuple(vals))


# ---------------------------------------------------------------------------
# Parameter domains
# ---------------------------------------------------------------------------


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[Vec]:
    """Z-basis (Hermite normal form) of {v in Z^n : M v = 0}; rows of M given."""
    # row-reduce [M^T | I] with unimodular integer operations
    aug = [[rows[r][c] for r in range(len(rows))] + [1 if k == c else 0 for k in range(n)] for c in range(n)]
    m = len(rows)
    piv_row = 0
    for col in range(m):
        while True:
            nz = [r for r in range(piv_row, n) if aug[r][col] != 0]
            if not nz:
                break
            p = min(nz, key=lambda r: abs(aug[r][col]))
            aug[piv_row], aug[p] = aug[p], aug[piv_row]
            done = True
            for r in range(piv_row + 1, n):
                if aug[r][col]:
                    f = aug[r][col] // aug[piv_row][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[piv_row])]
                    if aug[r][col]:
                        done = False
            if done:
                piv_row += 1
                break
    kernel = [row[m:] for row in aug[piv_row:]]
    return _hnf(kernel)


def _hnf(vecs: list) -> list[Vec]:
    """Row Hermite normal form of the lattice spanned by ``vecs``."""
    a = [list(v) for v in vecs if any(v)]
    if not a:
        return []
    n = len(a[0])
    r = 0
    for c in range(n):
        while True:
            nz = [k for k in range(r, len(a)) if a[k][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda k: abs(a[k][c]))
            a[r], a[p] = a[p], a[r]
            clean = True
            for k in range(r + 1, len(a)):
                if a[k][c]:
                    f = a[k][c] // a[r][c]
                    a[k] = [x - f * y for x, y in zip(a[k], a[r])]
                    if a[k][c]:
                        clean = False
            if clean:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for k in range(r):
                f = a[k][c] // a[r][c]
                if f:
                    a[k] = [x - f * y for x, y in zip(a[k], a[r])]
            r += 1
        if r == len(a):
            break
    return [tuple(v) for v in a[:r]]


@dataclass
class ParameterDomains:
    c_equalities: list  # list[(i, tau(i))] positions with c_i = c_tau(i)
    I_ns: tuple
    s_free: tuple  # positions allowed s_i != 0
    s_violations: dict  # i in I_ns -> list of j with a_ji not in -2N_0
    I_star: tuple
    Q_theta_basis: list

    def to_json(self, d: CartanDatum) -> dict:
        lab = d.labels
        return {
            "C": [{"equal": [lab[i], lab[j]]} for i, j in self.c_equalities],
            "I_ns": [lab[i] for i in self.I_ns],
            "S_free": [lab[i] for i in self.s_free],
            "I_star": [lab[i] for i in self.I_star],
            "Q_theta_basis": [list(v) for v in self.Q_theta_basis],
        }


def parameter_domains(pair: AdmissiblePair) -> ParameterDomains:
    d = pair.d
    notX = pair.not_X
    eqs = []
    for i in notX:
        t = pair.tau(i)
        if t != i and i < t and d.bilinear(d.simple(i), pair.theta(d.simple(i))) == 0:
            eqs.append((i, t))
    ins = tuple(i for i in notX if pair.tau(i) == i and all(d.a[j][i] == 0 for j in pair.X))
    free, viol = [], {}
    for i in ins:
        # s_i K_i^{-1} inside F_ji(B_j, B_i) obstructs unless a_ji is even
        bad = [j for j in ins if j != i and (d.a[j][i] > 0 or d.a[j][i] % 2)]
        if bad:
            viol[i] = bad
        else:
            free.append(i)
    order = pair.order or tuple(range(d.n))
    rank = {p: k for k, p in enumerate(order)}
    star = []
    for i in sorted(notX, key=lambda p: rank[p]):
        t = pair.tau(i)
        if rank[i] <= rank[t]:
            star.append(i)
    # Theta - id as a matrix acting on coordinate vectors
    cols = [pair.theta(d.simple(k)) for k in range(d.n)]
    rows = [[cols[k][r] - (1 if r == k else 0) for k in range(d.n)] for r in range(d.n)]
    basis = integer_kernel(rows, d.n)
    return ParameterDomains(eqs, ins, tuple(free), viol, tuple(star), basis)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def pair_to_json(pair: AdmissiblePair) -> dict:
    d = pair.d
    return {
        "X": [d.labels[i] for i in pair.xs],
        "tau": {str(d.labels[i]): d.labels[pair.tau(i)] for i in range(d.n)},
    }


def pair_from_json(d: CartanDatum, obj, check: bool = True) -> AdmissiblePair:
    """Parse ``{"X": [...], "tau": {"1": 3, ...}}``; missing tau entries are fixed points."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("pair JSON must be an object")
    try:
        X = list(obj.get("X", []))
        tau = obj.get("tau") or {}
        order = obj.get("order")
        order_pos = [d.index(x) for x in order] if order else None
        return make_pair(d, X, tau, order_pos, check=check)
    except KeyError as exc:
        raise ParseError(str(exc)) from None
