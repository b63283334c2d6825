import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import t_closure, t_compose, t_inverse, t_order
from polyforge.cpr import build_cpr
from polyforge.errors import CapExceededError, DegreeMismatchError, MembershipError, NotNormalError
from polyforge.perm import (
    PermGroup,
    Permutation,
    commutator,
    compose,
    conjugate,
    core_of_cyclic,
    derived_subgroup,
    group_order,
    is_normal,
    is_transitive,
    normal_closure,
    perm_order,
    quotient_action,
    stabilizer_order,
    subgroup_elements,
)


def perms(degree):
    return st.permutations(list(range(degree))).map(Permutation)


@st.composite
def perm_lists(draw, max_degree=8, max_gens=3):
    n = draw(st.integers(1, max_degree))
    k = draw(st.integers(1, max_gens))
    return [draw(perms(n)) for _ in range(k)]


def cyc(n, *cycles):
    return Permutation.from_cycles(n, cycles)


@pytest.fixture(scope="module")
def g1_10():
    t = build_cpr("G1", 10)
    return PermGroup(t.generators)


def dihedral8():
    return PermGroup([cyc(4, (0, 3), (1, 2)), cyc(4, (0, 1, 2, 3))])


# -- Permutation ------------------------------------------------------------


def test_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([])


def test_from_cycles_validation():
    assert cyc(4, (0, 1, 2)).images == (1, 2, 0, 3)
    with pytest.raises(ValueError):
        cyc(3, (0, 5))
    with pytest.raises(ValueError):
        cyc(4, (0, 1), (1, 2))


def test_compose_is_left_to_right():
    p = cyc(3, (0, 1))
    q = cyc(3, (1, 2))
    assert (p * q).images == t_compose(p.images, q.images)
    assert (p * q)(0) == 2


def test_compose_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        compose(Permutation.identity(3), Permutation.identity(4))


def test_conjugation_and_commutator_conventions():
    x, g = cyc(4, (0, 1, 2)), cyc(4, (2, 3))
    inv = Permutation(t_inverse(g.images))
    assert conjugate(x, g) == inv * x * g
    y = cyc(4, (1, 3))
    assert commutator(x, y) == x.inverse() * y.inverse() * x * y


def test_order_examples():
    assert perm_order(Permutation.identity(5)) == 1
    assert perm_order(cyc(5, (0, 1), (2, 3, 4))) == 6


def test_order_random_degree12():
    rng = random.Random(12)
    pts = list(range(12))
    rng.shuffle(pts)
    p = Permutation(pts)
    assert perm_order(p) == t_order(p.images)


def test_pow_matches_repeated_product():
    p = cyc(7, (0, 1, 2, 3, 4), (5, 6))
    acc = Permutation.identity(7)
    for k in range(12):
        assert p**k == acc
        acc = acc * p
    assert p**-3 == (p**3).inverse()


def test_json_round_trip():
    p = cyc(6, (0, 5, 2))
    assert Permutation.from_json(p.to_json()) == p
    assert p.to_json() == {"degree": 6, "images": [5, 1, 0, 3, 4, 2]}


def test_images_are_read_only_and_small():
    p = cyc(4, (0, 1))
    assert p.array.dtype == np.int16
    with pytest.raises(ValueError):
        p.array[0] = 3


@given(perms(9))
def test_bijectivity(p):
    assert sorted(p.images) == list(range(9))


@given(perms(9))
def test_inverse(p):
    assert (p * p.inverse()).is_identity()
    assert p.inverse().images == t_inverse(p.images)


@given(perms(7), perms(7), perms(7))
def test_commutator_identities(x, y, z):
    assert commutator(x * y, z) == conjugate(commutator(x, z), y) * commutator(y, z)
    assert commutator(x, y * z) == commutator(x, z) * conjugate(commutator(x, y), z)


# -- group order and orbits ---------------------------------------------------


def test_group_order_examples(g1_10):
    assert group_order(PermGroup([cyc(2, (0, 1))])) == 2
    d8 = dihedral8()
    assert group_order(d8) == len(t_closure([g.images for g in d8.generators])) == 8
    # a transposition with a 4-cycle generates the full symmetric group
    s4 = PermGroup([cyc(4, (0, 1)), cyc(4, (0, 1, 2, 3))])
    assert group_order(s4) == len(t_closure([g.images for g in s4.generators])) == 24
    assert group_order(g1_10) == 1024


def test_transitivity(g1_10):
    assert is_transitive(PermGroup([cyc(4, (0, 1, 2, 3))]))
    assert not is_transitive(PermGroup([cyc(3, (0, 1))]))
    assert is_transitive(g1_10) and g1_10.degree == 256


def test_stabilizer_order(g1_10):
    assert stabilizer_order(PermGroup([], degree=5), 3) == 1
    assert stabilizer_order(g1_10, 0) == 4
    assert stabilizer_order(PermGroup([cyc(4, (0, 1)), cyc(4, (2, 3))]), 0) == 2
    with pytest.raises(ValueError):
        stabilizer_order(g1_10, 256)


@given(perm_lists())
def test_order_matches_brute_force(gens):
    g = PermGroup(gens)
    assert g.order() == len(t_closure([p.images for p in gens]))


@given(perm_lists(max_degree=7))
def test_orbit_stabilizer(gens):
    g = PermGroup(gens)
    for pt in range(g.degree):
        assert g.order() == len(g.orbit(pt)) * stabilizer_order(g, pt)


@given(perm_lists(max_degree=6), perms(6))
def test_membership_matches_closure(gens, p):
    gens = [q for q in gens if q.degree == 6] or [Permutation.identity(6)]
    elems = t_closure([q.images for q in gens])
    assert PermGroup(gens).contains(p) == (p.images in elems)


def test_chain_cap_raises():
    big = PermGroup([cyc(12, tuple(range(12))), cyc(12, (0, 1))], chain_cap=50)
    with pytest.raises(CapExceededError):
        big.order()


def test_with_generators_extends():
    g = PermGroup([cyc(5, (0, 1))])
    assert g.with_generators([cyc(5, (0, 1, 2, 3, 4))]).order() == 120


# -- element enumeration --------------------------------------------------------


def test_subgroup_elements_examples(g1_10):
    assert subgroup_elements([Permutation.identity(3)]) == {Permutation.identity(3)}
    assert len(subgroup_elements([cyc(4, (0, 1)), cyc(4, (2, 3))])) == 4
    _, r1, r2 = g1_10.generators
    assert len(subgroup_elements([r1, r2])) == 256


def test_subgroup_elements_cap():
    with pytest.raises(CapExceededError) as info:
        subgroup_elements([cyc(6, tuple(range(6))), cyc(6, (0, 1))], cap=100)
    assert info.value.cap == 100


# -- normal structure -----------------------------------------------------------


def _brute_derived_order(g):
    elems = [e.images for e in subgroup_elements(g.generators)]
    comms = {
        t_compose(t_compose(t_inverse(x), t_inverse(y)), t_compose(x, y)) for x in elems for y in elems
    }
    return len(t_closure(list(comms)))


def test_derived_subgroup_examples():
    assert derived_subgroup(PermGroup([cyc(4, (0, 1)), cyc(4, (2, 3))])).order() == 1
    d8 = dihedral8()
    assert derived_subgroup(d8).order() == _brute_derived_order(d8) == 2


def test_derived_subgroup_g1_10(g1_10):
    assert derived_subgroup(g1_10).order() == 128
    # oracle: every commutator of every pair of elements, then naive closure
    elems = np.stack([e.array for e in subgroup_elements(g1_10.generators)]).astype(np.int64)
    inv = np.argsort(elems, axis=1)
    comms = set()
    for x, xi in zip(elems, inv):
        # x^-1 y^-1 x y applied left to right, vectorised over all y
        rows = np.take_along_axis(elems, x[inv[:, xi]], axis=1)
        comms.update(r.tobytes() for r in rows)
    comms = [tuple(np.frombuffer(b, dtype=np.int64).tolist()) for b in comms]
    assert len(t_closure(comms)) == 128


@given(perm_lists(max_degree=7))
def test_derived_subgroup_is_normal(gens):
    g = PermGroup(gens)
    d = derived_subgroup(g)
    assert is_normal(g, d)
    assert d.order() == _brute_derived_order(g)


def test_normal_closure_examples(g1_10):
    assert normal_closure(g1_10, [Permutation.identity(256)]).order() == 1
    d8 = dihedral8()
    center = cyc(4, (0, 2), (1, 3))
    assert normal_closure(d8, [center]).order() == 2
    _, r1, r2 = g1_10.generators
    assert normal_closure(g1_10, [(r1 * r2) ** 64]).order() == 2


def test_normal_closure_membership_error():
    with pytest.raises(MembershipError):
        normal_closure(PermGroup([cyc(4, (0, 1))]), [cyc(4, (2, 3))])


def test_core_of_cyclic_examples(g1_10):
    d8 = dihedral8()
    center = cyc(4, (0, 2), (1, 3))
    assert core_of_cyclic(d8, center).order() == 2
    s3 = PermGroup([cyc(3, (0, 1)), cyc(3, (0, 1, 2))])
    assert core_of_cyclic(s3, cyc(3, (0, 1))).order() == 1
    _, r1, r2 = g1_10.generators
    assert core_of_cyclic(g1_10, r1 * r2).order() >= 2


def test_core_of_cyclic_rejects_non_member():
    g = PermGroup([cyc(4, (0, 1))])
    with pytest.raises(MembershipError):
        core_of_cyclic(g, cyc(4, (2, 3)))


def test_quotient_action_examples(g1_10):
    d8 = dihedral8()
    trivial = quotient_action(d8, PermGroup([], degree=4))
    assert trivial.order() == 8 and trivial.degree == 8
    q = quotient_action(d8, PermGroup([cyc(4, (0, 2), (1, 3))]))
    # oracle: count cosets of the center in the brute-force element set
    elems = t_closure([g.images for g in d8.generators])
    z = (2, 3, 0, 1)
    cosets = {frozenset({e, t_compose(z, e)}) for e in elems}
    assert q.order() == len(cosets) == 4
    _, r1, r2 = g1_10.generators
    assert quotient_action(g1_10, PermGroup([(r1 * r2) ** 64])).order() == 512


def test_quotient_action_rejects_non_normal():
    s3 = PermGroup([cyc(3, (0, 1)), cyc(3, (0, 1, 2))])
    with pytest.raises(NotNormalError):
        quotient_action(s3, PermGroup([cyc(3, (0, 1))]))


@given(perm_lists(max_degree=6))
def test_quotient_by_derived_has_expected_order(gens):
    g = PermGroup(gens)
    d = derived_subgroup(g)
    assert quotient_action(g, d).order() == g.order() // d.order()
