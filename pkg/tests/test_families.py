import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyforge.errors import ConstraintViolation, CosetLimitError, UnsupportedFamilyError
from polyforge.families import (
    G_MIN_N,
    S8A_LITERAL_ROTATION_EXPONENT,
    FamilyId,
    build,
    build_G,
    build_H,
    build_L,
    build_M,
    build_sporadic,
    expectation,
    faithful_perm_triple,
    regular_perm_triple,
)
from polyforge.fp import Presentation, Word, element_order, fp_group_order, parse_relator
from polyforge.sggi import SchlafliType, check_intersection_property, schlafli_type

W = Word.gens


def fp_type(p, order=None):
    order = order or fp_group_order(p)
    return element_order(p, W(0, 1), order), element_order(p, W(1, 2), order)


# -- ids -------------------------------------------------------------------------------


@pytest.mark.parametrize("text", ["G1:n=10", "H:n=12,s=3,t=4", "M2:b=3", "S9b", "L1", "L3:t=2"])
def test_family_id_round_trip(text):
    fid = FamilyId.parse(text)
    assert str(fid) == text
    assert FamilyId.parse(str(fid)) == fid


def test_family_id_parameter_order_is_canonical():
    assert str(FamilyId.parse("H:t=4, s=3, n=12")) == "H:n=12,s=3,t=4"
    assert FamilyId.parse("G2:n=9").kwargs == {"n": 9}


@pytest.mark.parametrize("text", ["G1", "G1:n=x", "H:n=10,s=2", "L1:t=2", "M1:n=3", "G1:n=10,n=11x"])
def test_family_id_bad_parameters(text):
    with pytest.raises(ValueError):
        FamilyId.parse(text)


@pytest.mark.parametrize("text", ["G9:n=10", "X", "S10a"])
def test_family_id_unknown_tag(text):
    with pytest.raises(UnsupportedFamilyError):
        FamilyId.parse(text)


# -- hypotheses ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "args, hypothesis",
    [((10, 1, 5), "s >= 2"), ((10, 3, 1), "t >= 2"), ((10, 5, 5), "n - s - t >= 1"), ((9, 2, 3), "n >= 10")],
)
def test_build_H_constraints(args, hypothesis):
    with pytest.raises(ConstraintViolation) as info:
        build_H(*args)
    assert info.value.hypothesis == hypothesis
    assert info.value.family == "H"


def test_build_H_allow_small():
    assert fp_group_order(build_H(6, 2, 2, allow_small=True)) == 64
    with pytest.raises(ConstraintViolation):
        build_H(4, 2, 2, allow_small=True)


def test_build_G_floors():
    for i, floor in G_MIN_N.items():
        build_G(i, floor)
        with pytest.raises(ConstraintViolation):
            build_G(i, floor - 1)
    with pytest.raises(UnsupportedFamilyError):
        build_G(9, 10)


def test_build_L_M_constraints():
    with pytest.raises(ConstraintViolation):
        build_L(2, 0)
    with pytest.raises(ConstraintViolation):
        build_M(1, 0)
    with pytest.raises(UnsupportedFamilyError):
        build_L(4, 1)
    with pytest.raises(UnsupportedFamilyError):
        build_sporadic("S7a")


# -- relator lists ---------------------------------------------------------------------


def test_build_H_parity_branches():
    odd = build_H(10, 2, 7)  # n - s - t = 1
    assert odd.texts[-1] == "[(r0*r1)^2,r2]^1"
    even = build_H(10, 4, 4)  # n - s - t = 2
    assert even.texts[-1] == "[(r0*r1)^2,(r1*r2)^2]^1"
    assert build_H(12, 3, 4).texts[-1] == "[(r0*r1)^2,r2]^4"
    assert build_H(13, 2, 3).texts[-1] == "[(r0*r1)^2,(r1*r2)^2]^8"
    # three involution squares, eight relators from R and the parity relator
    assert len(odd.relators) == 9


def test_identity_exponent_relators_are_kept():
    p = build_H(10, 2, 7)
    assert parse_relator(p.texts[-1], 3) == parse_relator("[(r0*r1)^2,r2]", 3)


def test_build_G_relators_examples():
    assert build_G(1, 10).texts[-3:] == ("(r1*r2)^128", "(r0*r2)^2", "[(r0*r1)^2,r2]")
    assert build_G(4, 10).texts[-1] == "[(r0*r1)^2,(r1*r2)^2]*(r1*r2)^32"
    assert build_G(7, 10).texts[-2:] == ("[r0,(r1*r2)^2]^2", "[r0,(r1*r2)^4]*(r1*r2)^16")
    assert build_G(8, 10).texts[-2:] == ("[r0,(r1*r2)^2]^2*(r1*r2)^16", "[r0,(r1*r2)^4]*(r1*r2)^16")


def test_s9b_bracket_conventions():
    left = build_sporadic("S9b").texts[-1]
    right = build_sporadic("S9b", bracket="right").texts[-1]
    assert left == "[r1,r0,r2,r1,r0,r1,r0]"
    assert right == "[r1,[r0,[r2,[r1,[r0,[r1,r0]]]]]]"
    with pytest.raises(ValueError):
        build_sporadic("S9b", bracket="middle")


ALL_SPECS = (
    [f"H:n={n},s={s},t={t}" for n in (10, 11) for s in range(2, n) for t in range(2, n) if s + t <= n - 1]
    + [f"G{i}:n={n}" for i in range(1, 9) for n in (G_MIN_N[i], 10)]
    + ["L1"] + [f"L{i}:t={t}" for i in (2, 3) for t in (1, 4)]
    + [f"M{i}:b={b}" for i in (1, 2) for b in (1, 3)]
    + ["S8a", "S8b", "S9a", "S9b"]
)


@given(st.sampled_from(ALL_SPECS))
def test_text_round_trip(spec):
    p = build(spec)
    q = Presentation.from_text(p.to_text())
    assert q.relators == p.relators
    assert q.involutions == p.involutions == (True, True, True)
    assert q.name == spec


# -- orders and types ----------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, order, typ",
    [
        ("H:n=10,s=2,t=7", 1024, (4, 128)),
        ("H:n=10,s=4,t=4", 1024, (16, 16)),
        ("H:n=12,s=3,t=4", 4096, (8, 16)),
        ("G1:n=10", 1024, (4, 128)),
        ("G4:n=10", 1024, (4, 64)),
        ("G7:n=10", 1024, (4, 32)),
        ("L1", 16, (4, 2)),
        ("L2:t=5", 128, (2, 32)),
        ("L3:t=1", 8, (2, 2)),
        ("M1:b=1", 16, (4, 4)),
        ("M2:b=2", 32, (4, 4)),
        ("M1:b=4", 256, (4, 4)),
        ("S8a", 256, (4, 8)),
        ("S9a", 512, (4, 16)),
    ],
)
def test_build_examples(spec, order, typ):
    p = build(spec)
    assert fp_group_order(p) == order
    assert fp_type(p, order) == typ
    exp = expectation(spec)
    assert exp.order == order and exp.schlafli == SchlafliType(*typ)


def test_s8b_intersection_property():
    s = regular_perm_triple(build("S8b"))
    assert s.order() == 256
    assert check_intersection_property(s)


def test_s8a_literal_exponent_collapses():
    p = build_sporadic("S8a", s8a_rotation=S8A_LITERAL_ROTATION_EXPONENT)
    assert fp_group_order(p) == 512
    assert fp_type(p) == (4, 16)


def test_s9b_right_normed_fallback_is_larger():
    assert fp_group_order(build_sporadic("S9b", bracket="right")) == 1024
    assert fp_group_order(build_sporadic("S9b")) == 512


def test_expectation_source_tags():
    assert expectation("H:n=10,s=2,t=7").source == "existence-theorem"
    assert expectation("G5:n=10").source == "classification-type-4-2^(n-5)"
    assert expectation("M2:b=3").element_orders[-1] == ("r1*r2*r1*r0", 3)
    assert not expectation("M1:b=1").string_c_group
    assert expectation("M1:b=2").string_c_group


def test_listed_element_orders_hold():
    for spec in ["L1", "L2:t=3", "L3:t=4", "M1:b=3", "M2:b=5"]:
        p = build(spec)
        order = fp_group_order(p)
        for text, k in expectation(spec).element_orders:
            assert element_order(p, parse_relator(text, 3), order) == k, (spec, text)


# -- structural invariants ---------------------------------------------------------------


@pytest.mark.parametrize("n", [10, 11, 12])
def test_h_with_s2_matches_g1(n):
    h, g = build_H(n, 2, n - 3), build_G(1, n)
    oh, og = fp_group_order(h), fp_group_order(g)
    assert oh == og == 2**n
    assert fp_type(h, oh) == fp_type(g, og)


@pytest.mark.parametrize("i", range(1, 9))
def test_exponent_law(i):
    # below n = 10 some G_i collapse onto smaller groups, so stay in the classified range
    rotations = []
    for m in (10, 11, 12):
        p = build_G(i, m)
        rotations.append(element_order(p, W(1, 2), fp_group_order(p)))
    assert rotations[1] == 2 * rotations[0] and rotations[2] == 2 * rotations[1]


def test_faithful_triple_is_faithful_and_small():
    p = build_G(3, 10)
    s = faithful_perm_triple(p)
    assert s.order() == 1024
    assert s.degree < 1024
    assert schlafli_type(s) == SchlafliType(4, 64)


def test_faithful_triple_falls_back_to_regular():
    # whichever subgroup the search settles on, the action must keep the order
    for spec in ["L1", "L2:t=1", "M2:b=1"]:
        p = build(spec)
        assert faithful_perm_triple(p).order() == fp_group_order(p)


def test_faithful_triple_reports_coset_limit():
    with pytest.raises(CosetLimitError):
        faithful_perm_triple(build_G(1, 10), order=1024, max_cosets=100)
