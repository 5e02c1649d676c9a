import itertools

import pytest
from hypothesis import given, settings

from test_algebra import eval_left, expressions
from qsympairs.algebra import Uq
from qsympairs.cartan import DiagramMap, named_cartan
from qsympairs.errors import DegeneratePair, InvalidCharacter
from qsympairs.maps import (
    Morphism,
    T_X,
    T_word,
    ad_char,
    braid_check,
    builtin,
    lusztig_T,
    omega,
    psi,
    sigma_anti,
    tau_map,
    theta_q,
    tw_on_X_table,
    verify_morphism,
)
from qsympairs.qsp import menu_pairs
from qsympairs.scalar import ONE, parse_scalar
from qsympairs.weyl import Character, make_pair

A2 = Uq(named_cartan("A2"))
A3 = Uq(named_cartan("A3"))


def gens(U):
    out = []
    for i in range(U.n):
        out += [U.E(i), U.F(i), U.Ki(i), U.Ki(i, -1)]
    return out


# -- builtin maps ---------------------------------------------------------------------


def test_builtin_images():
    U = A2
    w, p, s = omega(U), psi(U), sigma_anti(U)
    for i in range(U.n):
        assert w(U.E(i)) == -U.F(i) and w(U.F(i)) == -U.E(i) and w(U.Ki(i)) == U.Ki(i, -1)
        assert w(w(U.E(i))) == U.E(i)
        assert p(U.E(i)) == U.E(i) * U.Ki(i) and p(U.F(i)) == U.Ki(i, -1) * U.F(i)
        assert s(U.E(i)) == U.E(i) and s(U.Ki(i)) == U.Ki(i, -1)
    assert s(U.E(0) * U.F(1)) == U.F(1) * U.E(0)
    t = tau_map(U, DiagramMap((1, 0)))
    assert t(U.E(0)) == U.E(1) and t(U.parse("K[1,0] F2")) == U.parse("K[0,1] F1")


def test_builtin_names():
    U = A3
    pair = make_pair(U.d, [1, 3])
    assert builtin(U, "theta_q", pair=pair) is theta_q(U, pair)
    assert builtin(U, "T2^-1")(U.F(1)) == -(U.E(1) * U.Ki(1))
    with pytest.raises(ValueError):
        builtin(U, "nonsense")


def test_ad_char_rejects_zero():
    with pytest.raises(InvalidCharacter):
        ad_char(A2, [ONE, parse_scalar("0")])


@settings(max_examples=60)
@given(expressions(2, 4), expressions(2, 3))
def test_morphisms_respect_products(x, y):
    U = A2
    a, b = eval_left(U, x), eval_left(U, y)
    for m in (omega(U), psi(U), lusztig_T(U, 0)):
        assert m(a * b) == m(a) * m(b)
    s = sigma_anti(U)
    assert s(a * b) == s(b) * s(a)


@settings(max_examples=60)
@given(expressions(2, 4))
def test_ad_omega_commutation(x):
    U = A2
    chi = Character((parse_scalar("q^2"), parse_scalar("-3*i")))
    a = eval_left(U, x)
    lhs = ad_char(U, chi) * omega(U)
    rhs = omega(U) * ad_char(U, chi.inverse())
    assert lhs(a) == rhs(a)


def test_verify_morphism_detects_bad_map():
    U = A2
    bad = Morphism(U, [U.E(i) for i in range(2)], [U.F(i).scale(parse_scalar("2")) for i in range(2)],
                   [(ONE, U.simple(i)) for i in range(2)])
    rep = verify_morphism(bad)
    assert {f["relation"] for f in rep["failures"]} == {"[E1,F1]", "[E2,F2]"}


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "affine-sl2"])
def test_verify_builtin_morphisms(name):
    U = Uq(named_cartan(name))
    for m in (omega(U), psi(U), sigma_anti(U), lusztig_T(U, 0), lusztig_T(U, 1, -1)):
        assert verify_morphism(m)["ok"], m.name


# -- Lusztig automorphisms -------------------------------------------------------------


def test_lusztig_examples():
    U = A2
    assert lusztig_T(U, 0)(U.E(0)) == -(U.F(0) * U.Ki(0))
    assert lusztig_T(U, 0, -1)(U.F(0)) == -(U.E(0) * U.Ki(0))
    assert lusztig_T(U, 0)(U.K((1, 1))) == U.K((0, 1))
    assert lusztig_T(U, 0)(U.K((0, 1))) == U.K((1, 1))
    # T_1(E_2) = E_1 E_2 - q^-1 E_2 E_1 for a_12 = -1
    assert lusztig_T(U, 0)(U.E(1)) == U.E(0) * U.E(1) - (U.E(1) * U.E(0)).scale(parse_scalar("q^-1"))


@pytest.mark.parametrize("name", ["A2", "B2", "C2", "G2", "A1xA1", "affine-sl2"])
def test_lusztig_inverse(name):
    U = Uq(named_cartan(name))
    for i in range(U.n):
        both = lusztig_T(U, i, -1) * lusztig_T(U, i)
        other = lusztig_T(U, i) * lusztig_T(U, i, -1)
        for g in gens(U):
            assert both(g) == g and other(g) == g


@pytest.mark.parametrize("name", ["A2", "B2", "C2", "G2", "A1xA1", "A3", "affine-A2"])
def test_braid_relations(name):
    U = Uq(named_cartan(name))
    for i, j in itertools.combinations(range(U.n), 2):
        rep = braid_check(U, i, j)
        assert rep["ok"], rep


def test_braid_orders():
    assert braid_check(Uq(named_cartan("G2")), 0, 1)["m"] == 6
    assert braid_check(Uq(named_cartan("B2")), 0, 1)["m"] == 4


def test_reduced_word_independence():
    U = A3
    words = [(0, 1, 0, 2, 1, 0), (1, 0, 1, 2, 1, 0), (0, 1, 2, 0, 1, 0), (2, 1, 0, 2, 1, 2)]
    maps = [T_word(U, w) for w in words]
    for m in maps[1:]:
        assert m.equals_on_generators(maps[0])


@pytest.mark.parametrize(
    "name,X", [("A2", [1]), ("A2", [1, 2]), ("A3", [1, 3]), ("A3", [2]), ("B2", [1, 2])]
)
def test_tw_on_X_table(name, X):
    d = named_cartan(name)
    rep = tw_on_X_table(Uq(d), make_pair(d, X, check=False))
    assert rep["ok"] and len(rep["rows"]) == 6 * len(X)


@pytest.mark.parametrize("name,X,tau", [("A3", [1, 3], None), ("A3", [2], {1: 3, 3: 1}), ("C2", [2], None), ("affine-sl2", [1], None)])
def test_tw_highest_weight_vectors(name, X, tau):
    d = named_cartan(name)
    U = Uq(d)
    pair = make_pair(d, X, tau)
    Tw = T_word(U, pair.wX)
    for i in pair.not_X:
        v = Tw(U.E(i))
        assert v
        for j in pair.X:
            assert U.ad_E(j, v).is_zero()


@pytest.mark.parametrize("name,X,tau", [("A3", [1, 3], None), ("A3", [2], {1: 3, 3: 1}), ("C2", [2], None)])
def test_TX_tau_omega_identity_on_MX(name, X, tau):
    d = named_cartan(name)
    U = Uq(d)
    pair = make_pair(d, X, tau)
    m = T_X(U, pair) * tau_map(U, pair.tau) * omega(U)
    for j in pair.X:
        for g in (U.E(j), U.F(j), U.Ki(j)):
            assert m(g) == g


def test_T_w_example_a3():
    U = A3
    pair = make_pair(U.d, [1, 3])
    v = T_word(U, pair.wX)(U.E(1))
    assert v.weight() == (1, 1, 1)
    assert v == U.ad_word((2, 0), U.E(1)) or v == U.ad_word((0, 2), U.E(1))


# -- theta_q ----------------------------------------------------------------------------


@pytest.mark.parametrize("pair", menu_pairs(), ids=lambda p: f"{p.d.n}:{p.label()}")
def test_theta_q_properties(pair):
    U = Uq(pair.d)
    th = theta_q(U, pair)
    for i in range(U.n):
        beta = U.simple(i)
        assert th(U.K(beta)) == U.K(pair.theta(beta))
    for j in pair.X:
        for g in (U.E(j), U.F(j), U.Ki(j)):
            assert th(g) == g
    sq = th * th
    for i in range(U.n):
        assert sq(U.Ki(i)) == U.Ki(i)
    assert verify_morphism(th)["ok"]


def test_theta_q_split_case():
    d = named_cartan("affine-sl2")
    U = Uq(d)
    th = theta_q(U, make_pair(d, []))
    for i in range(2):
        assert th(U.F(i) * U.Ki(i)) == -U.E(i)
    assert verify_morphism(th, 6)["ok"]


def test_theta_q_sl4_example():
    U = A3
    th = theta_q(U, make_pair(U.d, [1, 3]))
    img = th(U.F(1) * U.Ki(1))
    target = U.ad_word((2, 0), U.E(1))
    ratio = None
    for m, c in target.terms.items():
        r = -img.coefficient(m) / c
        assert ratio is None or r == ratio
        ratio = r
    assert ratio and set(img.terms) == set(target.terms)


def test_theta_q_degenerate():
    d = named_cartan("A1")
    with pytest.raises(DegeneratePair):
        theta_q(Uq(d), make_pair(d, [1]))
