import pytest

from polyforge.cpr import (
    CPR_FAMILIES,
    CPR_FLOORS,
    CprGraph,
    CprTriple,
    build_cpr,
    certify,
    export_dot,
    parse_dot,
    to_graph,
)
from polyforge.errors import ConstraintViolation, UnsupportedFamilyError
from polyforge.families import build_G
from polyforge.fp import verify_images
from polyforge.perm import PermGroup, Permutation


def comm(x, y):
    return x.commutator(y)


@pytest.fixture(scope="module")
def g1_10():
    return build_cpr("G1", 10)


def test_build_cpr_g1_10(g1_10):
    assert g1_10.degree == 256
    assert PermGroup(g1_10.generators).order() == 1024
    assert verify_images(build_G(1, 10), g1_10.generators)


def test_build_cpr_g2_relation():
    a, b, c = build_cpr("G2", 10).generators
    assert a.degree == 256
    assert comm((a * b) ** 2, c) == (b * c) ** (2 ** (10 - 4))


def test_build_cpr_g4_relation():
    a, b, c = build_cpr("G4", 10).generators
    assert a.degree == 256
    assert comm((a * b) ** 2, (b * c) ** 2) == (b * c) ** (2 ** (10 - 5))


@pytest.mark.parametrize(
    "family, n, degree",
    [("G1", 10, 256), ("G2", 10, 256), ("G4", 10, 256), ("G6", 10, 256), ("G7", 10, 32), ("G8", 10, 128)],
)
def test_degrees(family, n, degree):
    assert build_cpr(family, n).degree == degree


def test_floors_and_unsupported():
    for fam in CPR_FAMILIES:
        build_cpr(fam, CPR_FLOORS[fam])
        with pytest.raises(ConstraintViolation):
            build_cpr(fam, CPR_FLOORS[fam] - 1)
    with pytest.raises(UnsupportedFamilyError):
        build_cpr("G3", 10)


def test_g7_note_records_point_count():
    t = build_cpr("G7", 11)
    assert t.degree == 2 ** (11 - 5)
    assert any("2^(n-6)" in note for note in t.notes)


# -- graphs -----------------------------------------------------------------------


def test_identity_triple_gives_edgeless_graph():
    ident = Permutation.identity(5)
    g = to_graph([ident, ident, ident])
    assert g.nvertices == 5 and g.edges == ()


def test_g1_10_edge_counts(g1_10):
    g = to_graph(g1_10)
    assert g.nvertices == 256
    assert g.edge_count(1) == 128  # b is fixed-point-free
    assert g.edge_count(0) == 64
    assert g.edge_count(2) == 126


def test_g7_10_edge_counts():
    g = to_graph(build_cpr("G7", 10))
    assert (g.edge_count(0), g.edge_count(1), g.edge_count(2)) == (8, 15, 16)


@pytest.mark.parametrize("family", CPR_FAMILIES)
def test_graph_degree_bound(family):
    g = to_graph(build_cpr(family, max(CPR_FLOORS[family], 10)))
    assert all(g.degree_of(v) <= 3 for v in range(g.nvertices))


def test_graph_rejects_non_matching():
    with pytest.raises(ValueError):
        CprGraph(3, ((0, 1, 0), (1, 2, 0)))
    with pytest.raises(ValueError):
        CprGraph(3, ((0, 1, 5),))
    with pytest.raises(ValueError):
        to_graph([Permutation([1, 2, 0]), Permutation.identity(3), Permutation.identity(3)])


def test_export_dot_small():
    assert export_dot(CprGraph(2, ())) == "graph cpr {\n  1;\n  2;\n}\n"
    text = export_dot(CprGraph(4, ((0, 1, 0), (2, 3, 0), (1, 2, 1))))
    assert text.count("--") == 3
    assert "  1 -- 2 [label=0];" in text


@pytest.mark.parametrize("family, n", [("G1", 7), ("G4", 8), ("G7", 10)])
def test_dot_round_trip(family, n):
    g = to_graph(build_cpr(family, n))
    assert parse_dot(export_dot(g, name="x")) == g


def test_export_dot_is_deterministic(g1_10):
    assert export_dot(to_graph(g1_10)) == export_dot(to_graph(build_cpr("G1", 10)))


# -- certificates -------------------------------------------------------------------


def test_certify_g1_10(g1_10):
    cert = certify(g1_10)
    assert cert.relations and cert.transitive
    assert cert.stabilizer_order == 4 and cert.stabilizer_at_least_4
    assert cert.order == 1024 and cert.schlafli_type == [4, 128]
    assert cert.intersection_property and cert.a_commutes_with_c
    assert cert.passed
    assert cert.to_json()["passed"] is True


def test_certify_g8_10():
    cert = certify(build_cpr("G8", 10))
    assert cert.order == 1024 and cert.schlafli_type == [4, 32]
    assert cert.passed


@pytest.mark.parametrize("family", CPR_FAMILIES)
def test_certify_at_floor(family):
    cert = certify(build_cpr(family, CPR_FLOORS[family]))
    assert cert.passed, cert.to_json()
    assert cert.a_commutes_with_c


def test_certify_corrupted_triple(g1_10):
    a, b, c = g1_10.generators
    first = b.cycles()[0]
    broken = Permutation.from_cycles(b.degree, b.cycles()[1:])
    assert len(first) == 2
    cert = certify(CprTriple(a, broken, c, g1_10.family, g1_10.n))
    assert cert.relations is False
    assert not cert.passed


def test_certify_records_errors_instead_of_raising(g1_10):
    a, b, c = g1_10.generators
    cert = certify(CprTriple(a * b, b, c, g1_10.family, g1_10.n))  # a*b is not an involution
    assert "sggi" in cert.errors
    assert not cert.passed


def test_certify_without_intersection_check(g1_10):
    cert = certify(g1_10, check_intersection=False)
    assert cert.intersection_property is None
    assert cert.passed
