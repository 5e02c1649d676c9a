"""Generalized Cartan matrices, symmetrizers, diagram automorphisms,
affinization and GIM doubling.

Indices are handled positionally (0..n-1); ``labels`` carry the user-facing
names and are used only for input and output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import IndexSetTooLarge, NotFiniteType, NotGCM, NotIndecomposable, NotSymmetrizable, ParseError

__all__ = [
    "CartanDatum",
    "DiagramMap",
    "GimMatrix",
    "validate_cartan",
    "validate_gim",
    "bilinear",
    "aut_A",
    "finite_type_subset",
    "affinize",
    "gim_double",
    "cartan_from_json",
    "cartan_to_json",
    "named_cartan",
    "AUT_CAP",
]

AUT_CAP = 10

Vec = tuple  # tuple[int, ...]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _components(n: int, adj) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(n):
                if not seen[v] and adj(u, v):
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _symmetrizer(a: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Coprime positive eps with eps_i a_ij = eps_j a_ji, or NotSymmetrizable."""
    n = len(a)
    eps: list[Fraction | None] = [None] * n
    for comp in _components(n, lambda u, v: u != v and a[u][v] != 0):
        root = comp[0]
        eps[root] = Fraction(1)
        stack = [root]
        while stack:
            u = stack.pop()
            for v in comp:
                if v == u or a[u][v] == 0:
                    continue
                # eps_v a_vu = eps_u a_uv
                val = eps[u] * a[u][v] / a[v][u]
                if eps[v] is None:
                    eps[v] = val
                    stack.append(v)
                elif eps[v] != val:
                    raise NotSymmetrizable(f"matrix {list(map(list, a))} is not symmetrizable")
        # normalise each component to coprime integers
        den = reduce(_lcm, (eps[v].denominator for v in comp), 1)
        ints = [int(eps[v] * den) for v in comp]
        g = reduce(gcd, ints)
        for v, x in zip(comp, ints):
            eps[v] = Fraction(x // g)
    out = tuple(int(e) for e in eps)
    g = reduce(gcd, out)
    # components are normalised independently; the total vector is then coprime too
    return tuple(e // g for e in out)


@dataclass(frozen=True)
class CartanDatum:
    """A symmetrizable generalized Cartan matrix with its coprime symmetrizer."""

    labels: tuple
    a: tuple  # tuple[tuple[int, ...], ...]
    eps: tuple  # tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        """Position of ``label``; accepts labels or their string forms."""
        try:
            return self._label_index[label]
        except KeyError:
            pass
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise KeyError(f"unknown index {label!r}; labels are {list(self.labels)}") from None

    @cached_property
    def _label_index(self) -> dict:
        d = {}
        for k, lab in enumerate(self.labels):
            d[lab] = k
            d[str(lab)] = k
        return d

    @cached_property
    def sym(self) -> tuple:
        """Symmetrized matrix (eps_i a_ij) = ((alpha_i, alpha_j))."""
        return tuple(tuple(self.eps[i] * self.a[i][j] for j in range(self.n)) for i in range(self.n))

    def components(self) -> list[list[int]]:
        return _components(self.n, lambda u, v: u != v and self.a[u][v] != 0)

    def is_indecomposable(self) -> bool:
        return len(self.components()) == 1

    def component_class(self, comp: Sequence[int]) -> str:
        return _classify(self, comp)

    @cached_property
    def classes(self) -> tuple:
        return tuple((tuple(c), _classify(self, c)) for c in self.components())

    def is_finite(self) -> bool:
        return all(cls == "finite" for _, cls in self.classes)

    def bilinear(self, b: Vec, c: Vec) -> int:
        s = self.sym
        tot = 0
        for i, bi in enumerate(b):
            if bi:
                row = s[i]
                for j, cj in enumerate(c):
                    if cj:
                        tot += bi * cj * row[j]
        return tot

    def simple(self, i: int) -> Vec:
        v = [0] * self.n
        v[i] = 1
        return tuple(v)

    def pair(self, i: int, beta: Vec) -> int:
        """beta(h_i) = sum_j beta_j a_ij."""
        row = self.a[i]
        return sum(row[j] * b for j, b in enumerate(beta) if b)

    def to_json(self) -> dict:
        return cartan_to_json(self)


def _classify(d: CartanDatum, comp: Sequence[int]) -> str:
    sub = [[d.sym[i][j] for j in comp] for i in comp]
    minors = [_det([row[:k] for row in sub[:k]]) for k in range(1, len(comp) + 1)]
    if all(m > 0 for m in minors):
        return "finite"
    # indecomposable affine: all proper principal minors positive, determinant zero
    if minors[-1] == 0 and all(
        _det([[sub[r][c] for c in keep] for r in keep]) > 0
        for keep in (tuple(x for x in range(len(comp)) if x != drop) for drop in range(len(comp)))
        if keep
    ):
        return "affine"
    return "indefinite"


def _parse_matrix(matrix) -> tuple:
    try:
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
    except (TypeError, ValueError) as exc:
        raise NotGCM(f"matrix entries must be integers: {exc}") from None
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise NotGCM("matrix must be square and non-empty")
    for r, row in zip(rows, matrix):
        for x, y in zip(r, row):
            if isinstance(y, float) and y != int(y):
                raise NotGCM("matrix entries must be integers")
    return rows


def validate_cartan(matrix, labels: Iterable | None = None) -> CartanDatum:
    """Check the GCM axioms and return the datum with its coprime symmetrizer."""
    a = _parse_matrix(matrix)
    n = len(a)
    for i in range(n):
        if a[i][i] != 2:
            raise NotGCM(f"diagonal entry a[{i}][{i}] = {a[i][i]} != 2")
        for j in range(n):
            if i != j:
                if a[i][j] > 0:
                    raise NotGCM(f"off-diagonal entry a[{i}][{j}] = {a[i][j]} > 0")
                if (a[i][j] == 0) != (a[j][i] == 0):
                    raise NotGCM(f"a[{i}][{j}] and a[{j}][{i}] must vanish together")
    labs = tuple(labels) if labels is not None else tuple(range(1, n + 1))
    if len(labs) != n or len(set(map(str, labs))) != n:
        raise NotGCM("labels must be distinct and match the matrix size")
    eps = _symmetrizer(a)
    return CartanDatum(labs, a, eps)


def bilinear(d: CartanDatum, beta: Vec, gamma: Vec) -> int:
    return d.bilinear(tuple(beta), tuple(gamma))


# ---------------------------------------------------------------------------
# Diagram automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagramMap:
    """A permutation of the index set; ``perm[i]`` is the image of position i."""

    perm: tuple

    @classmethod
    def identity(cls, n: int) -> "DiagramMap":
        return cls(tuple(range(n)))

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def __mul__(self, other: "DiagramMap") -> "DiagramMap":
        return DiagramMap(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def inverse(self) -> "DiagramMap":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return DiagramMap(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def act(self, beta: Vec) -> Vec:
        out = [0] * len(beta)
        for i, b in enumerate(beta):
            out[self.perm[i]] += b
        return tuple(out)

    def preserves(self, d: CartanDatum) -> bool:
        p = self.perm
        return all(d.a[p[i]][p[j]] == d.a[i][j] for i in range(d.n) for j in range(d.n))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self.perm[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.perm[j]
            out.append(tuple(cyc))
        return out

    def to_labels(self, d: CartanDatum) -> dict:
        return {str(d.labels[i]): d.labels[p] for i, p in enumerate(self.perm)}


def aut_A(d: CartanDatum, cap: int = AUT_CAP) -> list[DiagramMap]:
    """All permutations preserving the matrix, identity first, lexicographic."""
    if d.n > cap:
        raise IndexSetTooLarge(f"|I| = {d.n} exceeds the cap {cap}")
    out = []
    # prune by diagonal-free row multisets
    sig = [tuple(sorted(d.a[i])) + tuple(sorted(d.a[j][i] for j in range(d.n))) for i in range(d.n)]

    def extend(prefix: list[int], used: set[int]):
        k = len(prefix)
        if k == d.n:
            out.append(DiagramMap(tuple(prefix)))
            return
        for c in range(d.n):
            if c in used or sig[c] != sig[k]:
                continue
            if all(d.a[c][prefix[j]] == d.a[k][j] and d.a[prefix[j]][c] == d.a[j][k] for j in range(k)):
                prefix.append(c)
                used.add(c)
                extend(prefix, used)
                prefix.pop()
                used.discard(c)

    extend([], set())
    out.sort(key=lambda m: (not m.is_identity(), m.perm))
    return out


def finite_type_subset(d: CartanDatum, X: Iterable[int]) -> bool:
    """True iff the symmetrized principal submatrix on X is positive definite."""
    xs = sorted(set(X))
    sub = [[d.sym[i][j] for j in xs] for i in xs]
    return all(_det([row[:k] for row in sub[:k]]) > 0 for k in range(1, len(xs) + 1))


# ---------------------------------------------------------------------------
# Affinization
# ---------------------------------------------------------------------------


def positive_roots_finite(d: CartanDatum, X: Iterable[int] | None = None) -> list[Vec]:
    """Positive roots of the finite root subsystem on X (all of I by default).

    Computed by reflection closure of the simple roots; requires X of finite type.
    """
    xs = sorted(set(range(d.n) if X is None else X))
    if not finite_type_subset(d, xs):
        raise NotFiniteType("subset is not of finite type")
    simple = [d.simple(i) for i in xs]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for r in frontier:
            for i in xs:
                k = d.pair(i, r)
                s = tuple(c - k * (1 if j == i else 0) for j, c in enumerate(r))
                if all(c >= 0 for c in s) and any(s) and s not in roots:
                    roots.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(roots, key=lambda r: (sum(r), r))


def highest_root(d: CartanDatum) -> Vec:
    """Highest root of an indecomposable finite-type datum, by saturation."""
    roots = set(positive_roots_finite(d))
    cur = d.simple(0)
    grown = True
    while grown:
        grown = False
        for i in range(d.n):
            cand = tuple(c + (1 if j == i else 0) for j, c in enumerate(cur))
            if cand in roots:
                cur = cand
                grown = True
                break
    return cur


def affinize(d: CartanDatum, pair=None, label0=0):
    """Untwisted affinization.

    Returns ``(Ahat, marks, tau_hat)`` where the new node sits at position 0
    with label ``label0`` and the old node at position i moves to i + 1.  When
    ``pair`` (an AdmissiblePair for ``d``) is given, ``tau_hat`` extends its
    tau and admissibility of the lifted pair is asserted.
    """
    if not d.is_indecomposable():
        raise NotIndecomposable("affinization requires an indecomposable matrix")
    if not d.is_finite():
        raise NotFiniteType("affinization requires a finite-type matrix")
    theta = highest_root(d)
    n = d.n
    rows = [[0] * (n + 1) for _ in range(n + 1)]
    rows[0][0] = 2
    for i in range(n):
        for j in range(n):
            rows[i + 1][j + 1] = d.a[i][j]
        # alpha_0 = delta - theta, so a_{i0} = alpha_0(h_i) = -theta(h_i)
        rows[i + 1][0] = -d.pair(i, theta)
    # h_0 = c - h_theta, so a_{0i} = -alpha_i(h_theta)
    norm_theta = d.bilinear(theta, theta)
    for i in range(n):
        # alpha_i(h_theta) = 2 (theta, alpha_i) / (theta, theta)
        val = Fraction(2 * d.bilinear(theta, d.simple(i)), norm_theta)
        if val.denominator != 1:
            raise NotFiniteType("non-integral coroot pairing")
        rows[0][i + 1] = -int(val)
    labels = (label0,) + tuple(d.labels)
    ahat = validate_cartan(rows, labels)
    marks = (1,) + tuple(theta)
    for i in range(n + 1):
        assert sum(marks[j] * ahat.a[i][j] for j in range(n + 1)) == 0
    tau_hat = None
    if pair is not None:
        from .weyl import AdmissiblePair, validate_admissible

        tau_hat = DiagramMap((0,) + tuple(p + 1 for p in pair.tau.perm))
        lifted = AdmissiblePair(ahat, frozenset(x + 1 for x in pair.X), tau_hat)
        report = validate_admissible(ahat, lifted.X, lifted.tau)
        if not report.ok:
            raise AssertionError(f"affinized pair not admissible: {report.failures}")
    return ahat, marks, tau_hat


# ---------------------------------------------------------------------------
# GIM doubling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GimMatrix:
    labels: tuple
    a: tuple
    eps: tuple

    @property
    def n(self) -> int:
        return len(self.labels)


def validate_gim(matrix, labels: Iterable | None = None) -> GimMatrix:
    a = _parse_matrix(matrix)
    n = len(a)
    for i in range(n):
        if a[i][i] != 2:
            raise NotGCM(f"diagonal entry a[{i}][{i}] = {a[i][i]} != 2")
        for j in range(n):
            if i != j and ((a[i][j] > 0) != (a[j][i] > 0) or (a[i][j] < 0) != (a[j][i] < 0)):
                raise NotGCM(f"a[{i}][{j}] and a[{j}][{i}] must have the same sign")
    labs = tuple(labels) if labels is not None else tuple(range(1, n + 1))
    if len(labs) != n:
        raise NotGCM("labels must match the matrix size")
    eps = _symmetrizer(a)
    return GimMatrix(labs, a, eps)


def gim_double(g: GimMatrix):
    """Return ``(C(A), sigma, unoriented)``.

    Positions 0..n-1 of C(A) are the original indices, n..2n-1 their barred
    copies; sigma swaps i and its copy.
    """
    n = g.n
    c = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            aij = g.a[i][j]
            if i == j:
                c[i][i] = c[i + n][i + n] = 2
            elif aij <= 0:
                c[i][j] = c[i + n][j + n] = aij
            else:
                c[i][j + n] = c[i + n][j] = -aij
    labels = tuple(g.labels) + tuple(f"{lab}b" for lab in g.labels)
    d = validate_cartan(c, labels)
    sigma = DiagramMap(tuple(range(n, 2 * n)) + tuple(range(n)))
    assert sigma.preserves(d)
    return d, sigma, d.is_indecomposable()


# ---------------------------------------------------------------------------
# JSON and named data
# ---------------------------------------------------------------------------


def cartan_to_json(d) -> dict:
    out = {"labels": list(d.labels), "matrix": [list(r) for r in d.a]}
    if isinstance(d, GimMatrix):
        out["gim"] = True
    return out


def cartan_from_json(obj) -> CartanDatum | GimMatrix:
    """Parse ``{"labels": [...], "matrix": [[...]]}`` (a dict or JSON text)."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ParseError("Cartan JSON needs a 'matrix' field")
    labels = obj.get("labels")
    if obj.get("gim"):
        return validate_gim(obj["matrix"], labels)
    return validate_cartan(obj["matrix"], labels)


def _type_a(n: int):
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]


_NAMED = {
    "A1": lambda: validate_cartan([[2]]),
    "A2": lambda: validate_cartan(_type_a(2)),
    "A3": lambda: validate_cartan(_type_a(3)),
    "A4": lambda: validate_cartan(_type_a(4)),
    "A1xA1": lambda: validate_cartan([[2, 0], [0, 2]]),
    "B2": lambda: validate_cartan([[2, -2], [-1, 2]]),
    "C2": lambda: validate_cartan([[2, -1], [-2, 2]]),
    "G2": lambda: validate_cartan([[2, -1], [-3, 2]]),
    "affine-sl2": lambda: validate_cartan([[2, -2], [-2, 2]], labels=(0, 1)),
    "affine-A2": lambda: validate_cartan([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], labels=(0, 1, 2)),
}


def named_cartan(name: str) -> CartanDatum:
    """Small built-in data: A1..A4, A1xA1, B2, C2, G2, affine-sl2, affine-A2."""
    key = name.replace("_", "-")
    for k, f in _NAMED.items():
        if k.lower() == key.lower():
            return f()
    raise KeyError(f"unknown Cartan datum {name!r}; known: {sorted(_NAMED)}")
