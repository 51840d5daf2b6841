import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flexcolor.corpus import load_graph
from flexcolor.discharging import (
    BUILTIN_SPECS,
    Affine,
    ChargeSpec,
    PlaneStructure,
    apply_rules,
    audit,
    builtin_spec,
    builtin_spec_text,
    format_flexcharge,
    initial_charges,
    parse_condition,
    parse_flexcharge,
    parse_rule,
    run_discharging,
)
from flexcolor.errors import DisconnectedGraphError, EmbeddingIncompleteError, ParseError
from flexcolor.generators import graph_from_coordinates, random_plane_graph
from flexcolor.graph import Graph, RotationSystem, complete_graph, cycle_graph

F = Fraction


def c5():
    return cycle_graph(5), RotationSystem({v: [(v - 1) % 5, (v + 1) % 5] for v in range(5)})


def faces_of_length(ps, n):
    return [("f", i) for i in range(len(ps.faces)) if ps.face_len(i) == n]


# -- initial charges -----------------------------------------------------------------

def test_c5_thm2_initial():
    g, rot = c5()
    spec, _ = builtin_spec("thm2")
    st_ = initial_charges(g, rot, spec)
    assert [st_.charges[("v", v)] for v in range(5)] == [-2] * 5
    assert sorted(c for (k, _), c in st_.charges.items() if k == "f") == [1, 1]
    assert st_.total() == -8


def test_truncated_cube_thm4_initial():
    g, rot = load_graph("truncated_cube")
    st_ = initial_charges(g, rot, builtin_spec("thm4")[0])
    faces = sorted(c for (k, _), c in st_.charges.items() if k == "f")
    assert faces == [1] * 8 + [6] * 6
    assert st_.total() == -4


def test_dodecahedron_thm3_initial():
    g, rot = load_graph("dodecahedron")
    st_ = initial_charges(g, rot, builtin_spec("thm3")[0])
    assert all(c == 1 for (k, _), c in st_.charges.items() if k == "v")
    assert all(c == -2 for (k, _), c in st_.charges.items() if k == "f")
    assert st_.total() == -4


def test_disconnected_and_bad_embedding():
    g = Graph(range(4), [(0, 1), (2, 3)])
    rot = RotationSystem({0: [1], 1: [0], 2: [3], 3: [2]})
    with pytest.raises(DisconnectedGraphError):
        initial_charges(g, rot, builtin_spec("thm2")[0])
    k5 = complete_graph(5)
    with pytest.raises(EmbeddingIncompleteError):
        initial_charges(k5, RotationSystem({v: sorted(k5.neighbors(v)) for v in k5.vertices}), builtin_spec("thm2")[0])


# -- named runs ---------------------------------------------------------------------------

def test_c5_thm2_no_rule_fires():
    g, rot = c5()
    run = run_discharging(g, rot, *builtin_spec("thm2"))
    assert run.final.charges == run.initial.charges
    assert audit(run.final) == [("v", v) for v in range(5)]
    assert run.to_dict()["audit"] == ["v0", "v1", "v2", "v3", "v4"]
    assert run.transfers == [0]


def test_icosidodecahedron_thm2():
    g, rot = load_graph("icosidodecahedron")
    run = run_discharging(g, rot, *builtin_spec("thm2"))
    ps = PlaneStructure(g, rot)
    tri = faces_of_length(ps, 3)
    assert len(tri) == 20 and audit(run.final) == tri
    assert all(run.final.charges[f] == -1 for f in tri)
    assert run.final.total() == -8


def test_truncated_cube_thm4_final():
    g, rot = load_graph("truncated_cube")
    run = run_discharging(g, rot, *builtin_spec("thm4"))
    ps = PlaneStructure(g, rot)
    # octagons spread 6 over 8 corners, triangles give 4/7 to each 3-vertex
    assert all(run.final.charges[("v", v)] == F(1, 14) for v in g.vertices)
    tri = faces_of_length(ps, 3)
    assert all(run.final.charges[f] == F(-5, 7) for f in tri)
    assert audit(run.final) == tri
    assert run.conserved() and run.final.total() == -4


def test_dodecahedron_thm3_final():
    g, rot = load_graph("dodecahedron")
    run = run_discharging(g, rot, *builtin_spec("thm3"))
    assert all(run.final.charges[("v", v)] == 0 for v in g.vertices)
    assert all(c == F(-1, 3) for (k, _), c in run.final.charges.items() if k == "f")


def test_remainder_with_no_receiver_is_recorded():
    g, rot = c5()
    spec = ChargeSpec("s", Affine(F(1), F(0)), Affine(F(0), F(0)), F(10))
    rule = parse_rule("rule R vertex -> face len=3 : uniform-remainder")
    run = apply_rules(initial_charges(g, rot, spec), [rule], g, rot, spec=spec)
    assert len(run.inapplicable) == 5 and run.final.charges == run.initial.charges


# -- properties ------------------------------------------------------------------------------

@given(st.integers(0, 10 ** 6), st.integers(3, 30), st.floats(0.0, 0.6), st.sampled_from(BUILTIN_SPECS))
def test_euler_and_conservation(seed, n, frac, name):
    g, rot = random_plane_graph(n, seed, delete_fraction=frac)
    spec, rules = builtin_spec(name)
    run = run_discharging(g, rot, spec, rules)
    assert run.initial.total() == spec.expected_total
    assert run.conserved()
    assert run.to_dict()["euler_ok"]


@given(st.integers(0, 10 ** 6), st.integers(6, 30))
def test_thm2_triangle_recount(seed, n):
    g, rot = random_plane_graph(n, seed, delete_fraction=0.0)
    run = run_discharging(g, rot, *builtin_spec("thm2"))
    ps = PlaneStructure(g, rot)
    for i in range(len(ps.faces)):
        if ps.face_len(i) != 3:
            continue
        big = sum(1 for v in ps.face_corners[i] if g.degree(v) >= 5)
        assert run.final.charges[("f", i)] == -1 + F(big, 2)
        if big >= 2:
            assert run.final.charges[("f", i)] >= 0


@given(st.integers(0, 10 ** 6), st.integers(6, 30), st.floats(0.0, 0.4))
def test_thm4_triangle_with_three_vertex(seed, n, frac):
    g, rot = random_plane_graph(n, seed, delete_fraction=frac)
    run = run_discharging(g, rot, *builtin_spec("thm4"))
    ps = PlaneStructure(g, rot)
    for i in range(len(ps.faces)):
        if ps.face_len(i) != 3:
            continue
        degs = [g.degree(v) for v in ps.face_corners[i]]
        if 3 not in degs:
            continue
        left = 1 - F(4, 7) * degs.count(3)
        # whatever is left goes to the 4-corners, if there are any
        assert run.final.charges[("f", i)] == (0 if 4 in degs else left)


# -- observation gadget ------------------------------------------------------------------

def pentagon_ring():
    """Triangle a,b,c; each side lies on a pentagon; the outside is a hexagon."""
    pts = {}
    for j in range(3):
        ang = 2 * math.pi * j / 3
        pts[j] = (math.cos(ang), math.sin(ang))
        pts[3 + j] = (2 * math.cos(ang), 2 * math.sin(ang))
        mid = ang + math.pi / 3
        pts[6 + j] = (2.5 * math.cos(mid), 2.5 * math.sin(mid))
    edges = [(0, 1), (1, 2), (0, 2)]
    for j in range(3):
        edges += [(j, 3 + j), (3 + j, 6 + j), (6 + j, 3 + (j + 1) % 3)]
    return graph_from_coordinates(pts, edges)


def test_obs9_order_matters():
    g, rot = pentagon_ring()
    spec, rules = builtin_spec("obs9")
    ps = PlaneStructure(g, rot)
    assert sorted(f.length for f in ps.faces) == [3, 5, 5, 5, 6]
    tri = faces_of_length(ps, 3)[0]
    fwd = run_discharging(g, rot, spec, rules)
    rev = run_discharging(g, rot, spec, list(reversed(rules)))
    assert fwd.final.charges[tri] == F(-14, 5)
    assert rev.final.charges[tri] == -4
    assert fwd.final.charges != rev.final.charges
    assert fwd.conserved() and rev.conserved()


# -- predicates ------------------------------------------------------------------------------

def test_pendent_faces_counted_once():
    pts = {0: (0, 0), 1: (1, 1), 2: (1, -1), 3: (2, 0)}
    g, rot = graph_from_coordinates(pts, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    ps = PlaneStructure(g, rot)
    far = next(i for i, f in enumerate(ps.faces) if f.length == 3 and f.vertex_set == {1, 2, 3})
    assert ps.pendent_faces(0) == [far]
    assert ps.pendent_faces(3) == [next(i for i, f in enumerate(ps.faces) if f.vertex_set == {0, 1, 2} and f.length == 3)]
    rule = parse_rule("rule P vertex -> face len=3 pendent : 1/3")
    spec = ChargeSpec("s", Affine(F(0), F(0)), Affine(F(0), F(0)), F(0))
    run = apply_rules(initial_charges(g, rot, spec), [rule], g, rot, spec=spec)
    assert run.final.charges[("v", 0)] == F(-1, 3)


def test_pendent_requires_three_vertex():
    pts = {0: (0, 0), 1: (1, 0), 2: (2, 1), 3: (2, -1), 4: (3, 0)}
    g, rot = graph_from_coordinates(pts, [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4)])
    assert PlaneStructure(g, rot).pendent_faces(0) == []
    h, hrot = graph_from_coordinates({k: pts[k] for k in range(4)}, [(0, 1), (1, 2), (1, 3), (2, 3)])
    assert len(PlaneStructure(h, hrot).pendent_faces(0)) == 1


def test_facevec_is_a_multiset():
    g, rot = load_graph("truncated_cube")
    ps = PlaneStructure(g, rot)
    pred = parse_condition("facevec{3,3,3}>=1", "vertex")
    assert all(pred(ps, v) for v in g.vertices)
    assert not parse_condition("facevec{3,4,4}>=1", "vertex")(ps, 0)
    assert parse_condition("facevec{3+,3+,3+,3+,3+,3+,3+,3+}=2", "vertex")(ps, 0)
    pts = {0: (0, 0), 1: (2, 0), 2: (1, 2), 3: (-1, 1), 4: (3, 1), 5: (1, -1)}
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (2, 3), (1, 4), (2, 4), (0, 5), (1, 5)]
    h, hrot = graph_from_coordinates(pts, edges)
    hs = PlaneStructure(h, hrot)
    assert [h.degree(v) for v in (0, 1, 2)] == [4, 4, 4]
    assert parse_condition("facevec{2,4,4}>=3", "vertex")(hs, 0) is False
    assert parse_condition("facevec{4,4,2}>=2", "vertex")(hs, 0)


@pytest.mark.parametrize("tok,side", [("deg=3", "face"), ("len=3", "vertex"), ("face3", "vertex"), ("color=1", "vertex"),
                                      ("facevec{3}>=1", "face"), ("touch{deg=3}>=1", "vertex")])
def test_bad_conditions(tok, side):
    with pytest.raises(ParseError):
        parse_condition(tok, side)


# -- flexcharge ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_SPECS)
def test_builtin_round_trip(name):
    spec, rules = builtin_spec(name)
    assert format_flexcharge(spec, rules) == builtin_spec_text(name)
    assert parse_flexcharge(builtin_spec_text(name)) == (spec, rules)


def test_builtin_shapes():
    spec, rules = builtin_spec("thm2")
    assert spec.vertex_charge == Affine(F(1), F(-4)) and spec.face_charge == Affine(F(1), F(-4)) and len(rules) == 1
    spec, rules = builtin_spec("thm4")
    assert spec.vertex_charge == Affine(F(0), F(-2)) and spec.face_charge == Affine(F(1), F(-2))
    assert [r.name[:3] for r in rules] == ["D1", "D2A", "D2A", "D2B", "D2B", "D2B"]
    spec, rules = builtin_spec("obs9")
    assert len(rules) == 2 and rules[1].amount == "uniform-remainder"
    with pytest.raises(KeyError):
        builtin_spec("thm7")


@pytest.mark.parametrize("bad", ["", "flexcharge v2\n", "flexcharge v1\nvertex 1 -4\n",
                                 "flexcharge v1\nvertex 1 -4\nface 1 -4\ntotal x\n",
                                 "flexcharge v1\nvertex 1 -4\nface 1 -4\ntotal -8\nrule R vertex -> vertex : 1\n",
                                 "flexcharge v1\nvertex 1 -4\nface 1 -4\ntotal -8\nrule R vertex face : 1\n",
                                 "flexcharge v1\nvertex 1 -4\nface 1 -4\ntotal -8\nrule R face -> vertex pendent : 1\n",
                                 "flexcharge v1\nvertex 1 -4\nface 1 -4\ntotal -8\nrule R vertex -> face : lots\n",
                                 "flexcharge v1\nwhatever\n"])
def test_flexcharge_errors(bad):
    with pytest.raises(ParseError):
        parse_flexcharge(bad)
