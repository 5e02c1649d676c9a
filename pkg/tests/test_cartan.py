import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import connected, gim_double_oracle, positive_roots
from qsympairs.cartan import (
    aut_A,
    affinize,
    bilinear,
    cartan_from_json,
    cartan_to_json,
    finite_type_subset,
    gim_double,
    highest_root,
    named_cartan,
    validate_cartan,
    validate_gim,
)
from qsympairs.errors import IndexSetTooLarge, NotFiniteType, NotGCM, NotIndecomposable, NotSymmetrizable
from qsympairs.weyl import make_pair, validate_admissible

NAMES = ["A1", "A2", "A3", "A1xA1", "B2", "C2", "G2", "affine-sl2", "affine-A2"]


def test_validate_examples():
    a2 = validate_cartan([[2, -1], [-1, 2]])
    assert a2.eps == (1, 1) and a2.classes == (((0, 1), "finite"),)
    aff = validate_cartan([[2, -2], [-2, 2]])
    assert aff.eps == (1, 1) and aff.classes == (((0, 1), "affine"),)
    g2 = validate_cartan([[2, -1], [-3, 2]])
    assert g2.eps == (3, 1) and g2.is_finite()


def test_validate_rejects():
    with pytest.raises(NotGCM):
        validate_cartan([[2, -1], [0, 2]])
    with pytest.raises(NotGCM):
        validate_cartan([[2, 1], [1, 2]])
    with pytest.raises(NotGCM):
        validate_cartan([[2, -1], [-1]])
    with pytest.raises(NotSymmetrizable):
        validate_cartan([[2, -1, -1], [-2, 2, -1], [-1, -1, 2]])


def test_indefinite_class():
    d = validate_cartan([[2, -3], [-3, 2]])
    assert d.classes[0][1] == "indefinite"


@pytest.mark.parametrize("name", NAMES)
def test_symmetrizer(name):
    d = named_cartan(name)
    n = d.n
    for i, j in itertools.product(range(n), repeat=2):
        assert d.eps[i] * d.a[i][j] == d.eps[j] * d.a[j][i]
    assert bilinear(d, d.simple(0), d.simple(0)) == 2 * d.eps[0]


def test_bilinear_examples():
    a2 = named_cartan("A2")
    assert bilinear(a2, (1, 0), (1, 0)) == 2
    assert bilinear(a2, (1, 0), (0, 1)) == -1


vec3 = st.tuples(*[st.integers(-3, 3)] * 3)


@given(vec3, vec3)
def test_bilinear_symmetric_and_aut_invariant(b, c):
    for name in ["A3", "affine-A2"]:
        d = named_cartan(name)
        assert bilinear(d, b, c) == bilinear(d, c, b)
        for s in aut_A(d):
            assert bilinear(d, s.act(b), s.act(c)) == bilinear(d, b, c)


def test_aut_examples():
    assert len(aut_A(named_cartan("A2"))) == 2
    assert len(aut_A(named_cartan("A1xA1"))) == 2
    assert len(aut_A(named_cartan("G2"))) == 1
    assert len(aut_A(named_cartan("affine-A2"))) == 6


@pytest.mark.parametrize("name", NAMES)
def test_aut_is_brute_force_group(name):
    d = named_cartan(name)
    n = d.n
    brute = {
        p for p in itertools.permutations(range(n))
        if all(d.a[p[i]][p[j]] == d.a[i][j] for i in range(n) for j in range(n))
    }
    got = {s.perm for s in aut_A(d)}
    assert got == brute
    for s, t in itertools.product(aut_A(d), repeat=2):
        assert (s * t).perm in got and s.inverse().perm in got


def test_aut_cap():
    with pytest.raises(IndexSetTooLarge):
        aut_A(validate_cartan([[2 if i == j else 0 for j in range(4)] for i in range(4)]), cap=3)


def test_finite_type_subset_examples():
    aff = named_cartan("affine-sl2")
    assert finite_type_subset(aff, [0])
    assert not finite_type_subset(aff, [0, 1])
    assert finite_type_subset(named_cartan("A3"), [0, 2])


@pytest.mark.parametrize("name,count", [("A1", 1), ("A2", 3), ("A3", 6), ("B2", 4), ("C2", 4), ("G2", 6)])
def test_highest_root_against_root_strings(name, count):
    d = named_cartan(name)
    roots = positive_roots([list(r) for r in d.a])
    assert len(roots) == count
    top = max(roots, key=sum)
    assert highest_root(d) == top


def test_affinize_examples():
    a_hat, b, tau = affinize(named_cartan("A1"))
    assert [list(r) for r in a_hat.a] == [[2, -2], [-2, 2]] and b == (1, 1)
    a2 = named_cartan("A2")
    a_hat, b, tau = affinize(a2, make_pair(a2, []))
    assert b == (1, 1, 1) and tau.is_identity()
    assert a_hat.classes[0][1] == "affine"
    a3 = named_cartan("A3")
    a_hat, b, tau = affinize(a3, make_pair(a3, [1, 3]))
    assert validate_admissible(a_hat, [a_hat.index(1), a_hat.index(3)], tau).ok


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "C2", "G2"])
def test_affinize_marks_in_kernel(name):
    a_hat, b, _ = affinize(named_cartan(name))
    assert b[0] == 1
    for row in a_hat.a:
        assert sum(bj * aij for bj, aij in zip(b, row)) == 0


def test_affinize_rejects():
    with pytest.raises(NotFiniteType):
        affinize(named_cartan("affine-sl2"))
    with pytest.raises(NotIndecomposable):
        affinize(named_cartan("A1xA1"))


GIMS = [
    [[2, -1], [-1, 2]],
    [[2, 1], [1, 2]],
    [[2, -1, 1], [-1, 2, -1], [1, -1, 2]],
    [[2, 1, 0], [1, 2, -1], [0, -1, 2]],
    [[2, -2, 1], [-2, 2, 0], [1, 0, 2]],
]


@pytest.mark.parametrize("a", GIMS)
def test_gim_double_against_case_rules(a):
    c_mat, sigma, unoriented = gim_double(validate_gim(a))
    expect = gim_double_oracle(a)
    assert [list(r) for r in c_mat.a] == expect
    assert unoriented == connected(expect)
    n = len(a)
    for i in range(n):
        assert c_mat.a[i][n + i] == 0
    assert sigma in aut_A(c_mat)
    assert (sigma * sigma).is_identity()


def test_gim_double_examples():
    _, _, u = gim_double(validate_gim([[2, -1], [-1, 2]]))
    assert not u
    c_mat, _, u = gim_double(validate_gim([[2, 1], [1, 2]]))
    assert not u and c_mat.a[0][3] == -1 and c_mat.a[1][2] == -1 and c_mat.a[0][1] == 0
    c_mat, _, u = gim_double(validate_gim([[2, -1, 1], [-1, 2, -1], [1, -1, 2]]))
    assert u and all(sum(1 for x in row if x) == 3 for row in c_mat.a)


def test_gim_rejects_sign_mismatch():
    with pytest.raises(NotGCM):
        validate_gim([[2, 1], [-1, 2]])


def test_json_roundtrip():
    for name in NAMES:
        d = named_cartan(name)
        assert cartan_from_json(cartan_to_json(d)) == d
    g = cartan_from_json({"labels": [1, 2], "matrix": [[2, 1], [1, 2]], "gim": True})
    assert g.a == ((2, 1), (1, 2))
