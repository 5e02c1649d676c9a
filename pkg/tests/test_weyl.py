import itertools
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsympairs.cartan import DiagramMap, aut_A, bilinear, named_cartan
from qsympairs.errors import NotAdmissible, NotFiniteType
from qsympairs.scalar import I_UNIT, ONE
from qsympairs.weyl import (
    act,
    act_coroot,
    enumerate_admissible,
    longest_word,
    make_pair,
    pair_from_json,
    pair_to_json,
    pairing_2rho,
    parameter_domains,
    positive_coroots,
    s_character,
    validate_admissible,
)

A3 = named_cartan("A3")
SWAP13 = {1: 3, 3: 1}


def test_act_examples():
    a2 = named_cartan("A2")
    assert act(a2, (0,), (1, 0)) == (-1, 0)
    assert act(A3, (1,), (0, 0, 1)) == (0, 1, 1)


@given(st.sampled_from(["A3", "B2", "G2", "affine-sl2"]), st.data())
def test_reflections_are_involutions(name, data):
    d = named_cartan(name)
    beta = data.draw(st.tuples(*[st.integers(-3, 3)] * d.n))
    i = data.draw(st.integers(0, d.n - 1))
    assert act(d, (i, i), beta) == beta
    assert act_coroot(d, (i, i), beta) == beta
    assert bilinear(d, act(d, (i,), beta), act(d, (i,), beta)) == bilinear(d, beta, beta)


def test_longest_word_examples():
    assert longest_word(A3, [0]) == (0,)
    assert longest_word(named_cartan("A2"), [0, 1]) == (0, 1, 0)
    w = longest_word(A3, [0, 2])
    assert sorted(w) == [0, 2]
    assert act(A3, w, (1, 0, 0)) == (-1, 0, 0) and act(A3, w, (0, 0, 1)) == (0, 0, -1)
    with pytest.raises(NotFiniteType):
        longest_word(named_cartan("affine-sl2"), [0, 1])


@pytest.mark.parametrize("name,X,length", [("A3", [0, 1, 2], 6), ("B2", [0, 1], 4), ("G2", [0, 1], 6), ("A3", [1], 1)])
def test_longest_word_is_reduced_involution(name, X, length):
    d = named_cartan(name)
    w = longest_word(d, X)
    assert len(w) == length == len(positive_coroots(d, X))
    for i in X:
        img = act(d, w, d.simple(i))
        assert all(x <= 0 for x in img)
        assert act(d, w, img) == d.simple(i)


def test_pairing_2rho_examples():
    assert [pairing_2rho(A3, [0, 2], j) for j in range(3)] == [2, -2, 2]
    assert pairing_2rho(A3, [0], 1) == -1
    for X in ([0], [1, 2], [0, 1, 2]):
        for j in X:
            assert pairing_2rho(A3, X, j) == 2


@pytest.mark.parametrize(
    "X,tau,ok,condition",
    [([1, 3], None, True, None), ([2], SWAP13, True, None), ([1], None, False, "3"), ([2], None, False, "3"), ([1, 2], None, False, "2")],
)
def test_a3_verdicts(X, tau, ok, condition):
    pair = make_pair(A3, X, tau, check=False)
    rep = validate_admissible(A3, pair.X, pair.tau)
    assert rep.ok is ok
    if condition:
        assert [f["condition"] for f in rep.failures] == [condition]
        with pytest.raises(NotAdmissible):
            make_pair(A3, X, tau)


def test_tau_must_preserve_matrix():
    rep = validate_admissible(named_cartan("B2"), [], DiagramMap((1, 0)))
    assert not rep.ok and rep.failures[0]["condition"] == "aut"


def _labels(orbits):
    return sorted((o["representative"].label(), len(o["members"]), o["degenerate"]) for o in orbits)


def test_enumeration_examples():
    assert _labels(enumerate_admissible(named_cartan("A1"))) == [("({1}, id)", 1, True), ("({}, id)", 1, False)]
    got = _labels(enumerate_admissible(named_cartan("A2")))
    assert got == [("({1,2}, (1 2))", 1, True), ("({}, (1 2))", 1, False), ("({}, id)", 1, False)]
    labels = {o["representative"].label() for o in enumerate_admissible(A3)}
    assert {"({1,3}, id)", "({2}, (1 3))"} <= labels
    assert not {"({1}, id)", "({2}, id)", "({1,2}, id)"} & labels


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "G2", "affine-sl2", "A1xA1"])
def test_enumeration_is_exhaustive_and_aut_stable(name):
    d = named_cartan(name)
    orbits = enumerate_admissible(d)
    found = {(p.X, p.tau.perm) for o in orbits for p in o["members"]}
    brute = set()
    for r in range(d.n + 1):
        for X in itertools.combinations(range(d.n), r):
            for s in aut_A(d):
                if validate_admissible(d, X, s).ok:
                    brute.add((frozenset(X), s.perm))
    assert found == brute
    for X, perm in brute:
        for s in aut_A(d):
            sX = frozenset(s(i) for i in X)
            conj = s * DiagramMap(perm) * s.inverse()
            assert (sX, conj.perm) in brute


def test_enumeration_speed():
    start = time.perf_counter()
    for name in ["A1", "A2", "A3", "affine-sl2"]:
        enumerate_admissible(named_cartan(name))
    assert time.perf_counter() - start < 1.0


def test_theta_examples():
    pair = make_pair(A3, [2], SWAP13)
    assert pair.theta((1, 0, 0)) == (0, -1, -1)
    empty = make_pair(A3, [])
    assert empty.theta((1, 2, 3)) == (-1, -2, -3)


@pytest.mark.parametrize("name,X,tau", [("A3", [2], SWAP13), ("A3", [1, 3], None), ("affine-sl2", [], {0: 1, 1: 0}), ("C2", [2], None)])
def test_theta_is_isometric_involution(name, X, tau):
    d = named_cartan(name)
    pair = make_pair(d, X, tau)
    basis = [d.simple(i) for i in range(d.n)]
    for b in basis:
        assert pair.theta(pair.theta(b)) == b
        for c in basis:
            assert bilinear(d, pair.theta(b), pair.theta(c)) == bilinear(d, b, c)
    for i in pair.X:
        img = pair.theta(d.simple(i))
        assert all(img[k] == 0 for k in range(d.n) if k not in pair.X)


def test_s_character():
    assert all(v == ONE for v in s_character(make_pair(A3, [])).values)
    pair = make_pair(A3, [2], SWAP13)
    s = s_character(pair)
    assert s.values == (-I_UNIT, ONE, I_UNIT)
    for j in range(3):
        assert s.values[j] * s.values[pair.tau(j)] == ONE
    assert s_character(pair, order=[2, 1, 0]).values == (I_UNIT, ONE, -I_UNIT)


def test_parameter_domains_examples():
    dom = parameter_domains(make_pair(named_cartan("affine-sl2"), []))
    assert dom.c_equalities == [] and dom.I_ns == (0, 1) and dom.s_free == (0, 1)
    dom = parameter_domains(make_pair(A3, [1, 3]))
    assert dom.I_ns == () and dom.s_free == ()
    dom = parameter_domains(make_pair(A3, [2], SWAP13))
    assert [1, 0, -1] in [list(v) for v in dom.Q_theta_basis]
    assert dom.I_star == (0,)


def test_parameter_domains_c_ties_and_s_parity():
    # (empty, (1 2)) on A2: (alpha_1, Theta alpha_1) = -(alpha_1, alpha_2) != 0, so no tie
    assert parameter_domains(make_pair(named_cartan("A2"), [], {1: 2, 2: 1})).c_equalities == []
    # A1xA1 swapped: (alpha_1, Theta alpha_1) = 0 forces c_1 = c_2
    assert parameter_domains(make_pair(named_cartan("A1xA1"), [], {1: 2, 2: 1})).c_equalities == [(0, 1)]
    # B2 = [[2,-2],[-1,2]]: s_1 is blocked by a_21 = -1, s_2 is free since a_12 = -2
    dom = parameter_domains(make_pair(named_cartan("B2"), []))
    assert dom.I_ns == (0, 1) and dom.s_free == (1,) and dom.s_violations == {0: [1]}


def test_pair_json_roundtrip():
    pair = make_pair(A3, [2], SWAP13)
    assert pair_from_json(A3, pair_to_json(pair)) == pair
    assert pair_to_json(pair) == {"X": [2], "tau": {"1": 3, "2": 2, "3": 1}}
