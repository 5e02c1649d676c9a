"""Independent reference computations used to pin engine outputs.

Nothing here imports the engine's algebra code.  Scalars are evaluated at a
rational q and everything else is plain integer or Fraction linear algebra.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy

# ---------------------------------------------------------------------------
# Free-algebra rank oracle for dim U^+_mu
# ---------------------------------------------------------------------------


def _words_of_weight(mu):
    letters = [i for i, m in enumerate(mu) for _ in range(m)]
    return sorted(set(itertools.permutations(letters)))


def _q_binom(n, k, base):
    num = Fraction(1)
    for t in range(k):
        num *= Fraction(base ** (n - t) - base ** (t - n), base ** (t + 1) - base ** (-t - 1))
    return num


def _serre_poly(a, eps, i, j, q0):
    """F_ij as {word: value} at q = q0, from the textbook alternating sum."""
    m = 1 - a[i][j]
    qi = Fraction(q0) ** eps[i]
    return {(i,) * (m - s) + (j,) + (i,) * s: (-1) ** s * _q_binom(m, s, qi) for s in range(m + 1)}


def _rank(rows):
    if not rows:
        return 0
    return sympy.Matrix(rows).rank()


def free_rank_dim(a, eps, mu, q0=Fraction(3)):
    """dim of the weight-mu part of U^+: #words minus rank of the Serre ideal there."""
    n = len(a)
    words = _words_of_weight(mu)
    index = {w: k for k, w in enumerate(words)}
    rows = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            rel = _serre_poly(a, eps, i, j, q0)
            rw = [0] * n
            for letter in next(iter(rel)):
                rw[letter] += 1
            rest = [m - r for m, r in zip(mu, rw)]
            if min(rest) < 0:
                continue
            for left_mu in itertools.product(*[range(r + 1) for r in rest]):
                right_mu = [r - lft for r, lft in zip(rest, left_mu)]
                for u in _words_of_weight(left_mu):
                    for v in _words_of_weight(right_mu):
                        row = [0] * len(words)
                        for w, c in rel.items():
                            row[index[u + w + v]] += c
                        rows.append(row)
    return len(words) - _rank(rows)


def positive_roots(a):
    """Positive roots of a finite-type Cartan matrix by root strings."""
    n = len(a)
    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for beta in frontier:
            for i in range(n):
                # p = how far down the alpha_i string goes from beta
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                pair = sum(beta[k] * a[i][k] for k in range(n))
                if p - pair > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        new.append(up)
        frontier = new
    return sorted(roots)


def kostant(roots, mu):
    """Number of ways to write mu as an unordered sum of positive roots."""
    mu = tuple(mu)

    def count(rest, k):
        if all(x == 0 for x in rest):
            return 1
        if k == len(roots):
            return 0
        total = 0
        r = roots[k]
        cur = rest
        while all(x >= 0 for x in cur):
            total += count(cur, k + 1)
            cur = tuple(x - y for x, y in zip(cur, r))
        return total

    return count(mu, 0)


# ---------------------------------------------------------------------------
# Matrix representations at a rational q
# ---------------------------------------------------------------------------


def _unit(n, r, c):
    m = sympy.zeros(n, n)
    m[r, c] = 1
    return m


def natural_rep_sl(n, q0):
    """U_q(sl_n) on Q^n: E_i = e_{i,i+1}, F_i = e_{i+1,i}, K_i = diag(.., q, q^-1, ..)."""
    reps = []
    for i in range(n - 1):
        k = sympy.eye(n)
        k[i, i] = q0
        k[i + 1, i + 1] = 1 / sympy.Rational(q0)
        reps.append((_unit(n, i, i + 1), _unit(n, i + 1, i), k))
    return reps


def evaluation_rep_affine_sl2(q0, z):
    """U_q(affine sl2)' on Q^2 with spectral parameter z; labels 0, 1."""
    q0 = sympy.Rational(q0)
    e, f = _unit(2, 0, 1), _unit(2, 1, 0)
    k1 = sympy.diag(q0, 1 / q0)
    k0 = sympy.diag(1 / q0, q0)
    return [(z * f, e / z, k0), (e, f, k1)]


def tensor_rep(r1, r2):
    """Rep on V1 x V2 through the textbook coproduct of the generators."""
    out = []
    for (e1, f1, k1), (e2, f2, k2) in zip(r1, r2):
        i1 = sympy.eye(e1.shape[0])
        i2 = sympy.eye(e2.shape[0])
        e = sympy.kronecker_product(e1, i2) + sympy.kronecker_product(k1, e2)
        f = sympy.kronecker_product(f1, k2.inv()) + sympy.kronecker_product(i1, f2)
        k = sympy.kronecker_product(k1, k2)
        out.append((e, f, k))
    return out


def gauss_to_sympy(g):
    return sympy.Rational(g.re.numerator, g.re.denominator) + sympy.I * sympy.Rational(g.im.numerator, g.im.denominator)


def rep_of_elem(rep, a, q0):
    """Evaluate a normal-form element (E-word, K-vector, F-word terms) in ``rep``."""
    dim = rep[0][0].shape[0]
    out = sympy.zeros(dim, dim)
    for (ew, kv, fw), c in a.terms.items():
        m = sympy.eye(dim)
        for i in ew:
            m = m * rep[i][0]
        for i, e in enumerate(kv):
            if e:
                m = m * rep[i][2] ** e
        for i in fw:
            m = m * rep[i][1]
        out += gauss_to_sympy(c.eval_at(Fraction(q0))) * m
    return out


def rep_of_tokens(rep, tokens):
    """Evaluate a raw word of ("E"|"F"|"K"|"k", i) tokens; "k" is K_i^{-1}."""
    dim = rep[0][0].shape[0]
    m = sympy.eye(dim)
    for kind, i in tokens:
        if kind == "E":
            m = m * rep[i][0]
        elif kind == "F":
            m = m * rep[i][1]
        elif kind == "K":
            m = m * rep[i][2]
        else:
            m = m * rep[i][2].inv()
    return m


# ---------------------------------------------------------------------------
# GIM double by the four case rules, written out directly
# ---------------------------------------------------------------------------


def gim_double_oracle(a):
    """Return the 2n x 2n matrix on I then I-bar."""
    n = len(a)
    c = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            v = a[i][j]
            if i == j:
                c[i][j] = c[n + i][n + j] = 2
            elif v < 0:
                c[i][j] = c[n + i][n + j] = v
            elif v > 0:
                c[i][n + j] = c[n + i][j] = -v
    return c


def connected(c):
    n = len(c)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in range(n):
            if v != u and c[u][v] and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n
