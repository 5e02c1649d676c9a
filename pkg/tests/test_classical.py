import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qsympairs.algebra import Uq
from qsympairs.cartan import named_cartan
from qsympairs.classical import (
    classical_normal_form,
    classical_theta,
    involution_check,
    specializable,
    specialize,
    specialize_B_check,
)
from qsympairs.errors import ParseError, PoleAtOne
from qsympairs.qsp import QSPParams, menu_pairs, q_onsager_params
from qsympairs.scalar import parse_scalar
from qsympairs.weyl import make_pair

A2 = named_cartan("A2")
A3 = named_cartan("A3")


def test_normal_form_examples():
    assert str(classical_normal_form(A2, "f1 e1")) == "-h1 + e1 f1"
    assert str(classical_normal_form(A2, "h1 e2")) == "-e2 + e2 h1"
    assert not classical_normal_form(A2, "e1 e1 e2 - 2 e1 e2 e1 + e2 e1 e1")
    assert not classical_normal_form(A2, "f2 f2 f1 - 2 f2 f1 f2 + f1 f2 f2")
    assert not classical_normal_form(A2, "e1 f2 - f2 e1")
    with pytest.raises(ParseError):
        classical_normal_form(A2, "e1 +")


def test_specialize_examples():
    U = Uq(A2)
    assert str(specialize(U.parse("(q^2) E1 K[1,0] E2 F1"))) == "e1 e2 f1"
    assert not specialize(U.parse("(q - 1) E1"))
    with pytest.raises(PoleAtOne):
        specialize(U.parse("F1 E1"))
    assert specializable(parse_scalar("q^3"))
    assert not specializable(parse_scalar("2"))
    assert not specializable(parse_scalar("1/(q - 1)"))


def _upper(U):
    """Elements of U^+ U^0 with Laurent coefficients, where specialization is multiplicative."""
    word = st.lists(st.integers(0, U.n - 1), max_size=3)
    kvec = st.tuples(*[st.integers(-2, 2)] * U.n)
    coef = st.sampled_from(["1", "q", "-q^-2", "q + q^-1", "2"])
    term = st.tuples(coef, word, kvec).map(
        lambda t: (U.E_word(tuple(t[1])) * U.K(t[2])).scale(parse_scalar(t[0])))
    return st.lists(term, min_size=1, max_size=3).map(lambda ts: sum(ts[1:], ts[0]))


@settings(max_examples=60)
@given(st.data())
def test_specialize_multiplicative_on_upper_part(data):
    U = Uq(A3)
    a, b = data.draw(_upper(U)), data.draw(_upper(U))
    assert specialize(a * b) == specialize(a) * specialize(b)


# -- the involution -----------------------------------------------------------------------------


def _unit(n, i, j):
    m = sympy.zeros(n, n)
    m[i, j] = 1
    return m


def _mat(el, n):
    """Image of a classical element in the natural representation of sl_n."""
    gen = {"e": lambda i: _unit(n, i, i + 1), "f": lambda i: _unit(n, i + 1, i),
           "h": lambda i: _unit(n, i, i) - _unit(n, i + 1, i + 1)}
    out = sympy.zeros(n, n)
    for (e, h, f), c in el.terms.items():
        m = sympy.eye(n)
        for i in e:
            m = m * gen["e"](i)
        for i, k in enumerate(h):
            m = m * gen["h"](i) ** k
        for i in f:
            m = m * gen["f"](i)
        out += (sympy.Rational(c.re.numerator, c.re.denominator)
                + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)) * m
    return out


@pytest.mark.parametrize("d", [A2, A3], ids=["A2", "A3"])
def test_split_involution_is_minus_transpose(d):
    th = classical_theta(make_pair(d, []))
    A = th.A
    n = d.n + 1
    for i in range(d.n):
        for g in (A.e(i), A.f(i), A.h(i)):
            assert _mat(th(g), n) == -_mat(g, n).T


@pytest.mark.parametrize("X,tau", [([1, 3], None), ([2], {1: 3, 3: 1}), ([], {1: 3, 3: 1})])
def test_involution_is_lie_automorphism_on_sl4(X, tau):
    pair = make_pair(A3, X, tau)
    th = classical_theta(pair)
    A = th.A
    n = 4
    br = lambda x, y: x * y - y * x  # noqa: E731
    e = [_mat(th.eimg[i], n) for i in range(3)]
    f = [_mat(th.fimg[i], n) for i in range(3)]
    h = [_mat(th.himg[i], n) for i in range(3)]
    for i in range(3):
        for j in range(3):
            assert sympy.expand(br(e[i], f[j])) == (h[i] if i == j else sympy.zeros(n, n))
            assert sympy.expand(br(h[i], e[j]) - A3.a[i][j] * e[j]) == sympy.zeros(n, n)
            assert sympy.expand(br(h[i], f[j]) + A3.a[i][j] * f[j]) == sympy.zeros(n, n)
    for j in pair.X:
        assert th(A.e(j)) == A.e(j) and th(A.f(j)) == A.f(j)


@pytest.mark.parametrize("pair", menu_pairs(), ids=lambda p: f"{p.d.n}:{p.label()}")
def test_involution_check_on_menu(pair):
    assert involution_check(pair)["ok"]


def test_involution_check_fails_off_admissible():
    rep = involution_check(make_pair(A3, [1], check=False))
    assert not rep["ok"] and rep["failures"] == ["e2", "f2"]


def test_specialize_B():
    rep = specialize_B_check(QSPParams.build(make_pair(A3, [1, 3]), c={2: "1"}))
    assert rep["ok"]
    assert rep["specialized"]["2"] == "f2 + e1 e2 e3 - e1 e3 e2 - e2 e1 e3 + e3 e2 e1"
    rep = specialize_B_check(q_onsager_params(c={0: "q^2", 1: "1"}, s={0: "q + 1"}))
    assert rep["ok"] and rep["specialized"]["0"] == "2 + f0 - e0"
    with pytest.raises(PoleAtOne):
        specialize_B_check(QSPParams.build(make_pair(A3, [1, 3])))
