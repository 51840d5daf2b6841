from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flexcolor.coloring import (
    Request,
    check_lists,
    count_colorings,
    enumerate_colorings,
    epsilon_bound,
    format_flexlists,
    is_colorable,
    is_proper_coloring,
    make_lists,
    max_satisfaction,
    parse_flexlists,
    score,
)
from flexcolor.errors import DomainError, NotColorableError, ParseError, UndefinedRatioError
from flexcolor.graph import Graph, cycle_graph, path_graph
from tests.helpers import brute_colorings, random_graph, random_lists


def uniform(g, colors):
    return {v: frozenset(colors) for v in g.vertices}


# -- enumeration ------------------------------------------------------------

def test_single_vertex_three_colorings():
    g = Graph([0])
    assert list(enumerate_colorings(g, {0: frozenset({1, 2, 3})})) == [{0: 1}, {0: 2}, {0: 3}]


def test_edge_two_colorings():
    g = path_graph(2)
    assert list(enumerate_colorings(g, uniform(g, {1, 2}))) == [{0: 1, 1: 2}, {0: 2, 1: 1}]


def test_triangle_two_colors_none():
    g = cycle_graph(3)
    assert count_colorings(g, uniform(g, {1, 2})) == 0
    assert not is_colorable(g, uniform(g, {1, 2}))


def test_path_with_sizes_one_two_two():
    g = path_graph(3)
    assert is_colorable(g, make_lists({0: [1], 1: [1, 2], 2: [2, 3]}))


def test_path_with_sizes_one_two_three_one():
    g = path_graph(4)
    assert is_colorable(g, make_lists({0: [1], 1: [1, 2], 2: [1, 2, 3], 3: [3]}))
    # every such assignment works: check all of them over a small universe
    from itertools import combinations, product
    pool = [1, 2, 3, 4]
    for lists in product(combinations(pool, 1), combinations(pool, 2), combinations(pool, 3), combinations(pool, 1)):
        assert is_colorable(g, {i: frozenset(l) for i, l in enumerate(lists)})


@pytest.mark.parametrize("n", [4, 6, 8])
def test_even_cycle_two_lists(n):
    g = cycle_graph(n)
    rng = np.random.default_rng(n)
    for _ in range(30):
        assert is_colorable(g, random_lists(rng, g.vertices, 2, 4))


def test_empty_graph_has_one_coloring():
    assert list(enumerate_colorings(Graph([]), {})) == [{}]


@given(st.integers(0, 10 ** 6), st.integers(1, 7), st.floats(0.2, 0.9), st.integers(1, 4), st.integers(1, 5))
def test_enumeration_matches_brute_force(seed, n, p, k, extra):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, p)
    lists = random_lists(rng, g.vertices, k, k + extra)
    ours = list(enumerate_colorings(g, lists))
    brute = brute_colorings(g, lists)
    assert ours == brute
    assert all(is_proper_coloring(g, lists, phi) for phi in ours)
    assert count_colorings(g, lists) == len(brute)
    assert is_colorable(g, lists) == bool(brute)


@given(st.integers(0, 10 ** 6), st.integers(2, 6), st.permutations(range(1, 8)))
def test_count_invariant_under_renaming(seed, n, perm):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.6)
    lists = random_lists(rng, g.vertices, 2, 7)
    renamed = {v: frozenset(perm[c - 1] for c in cs) for v, cs in lists.items()}
    assert count_colorings(g, lists) == count_colorings(g, renamed)


def test_check_lists():
    g = path_graph(2)
    check_lists(g, uniform(g, {1, 2}), k=2)
    with pytest.raises(ValueError):
        check_lists(g, uniform(g, {1, 2}), k=3)
    with pytest.raises(ValueError):
        check_lists(g, {0: frozenset({1})})
    with pytest.raises(ValueError):
        check_lists(g, {0: frozenset({1}), 1: frozenset({1}), 5: frozenset({1})})


# -- satisfaction -------------------------------------------------------------

def test_triangle_plain_request_one_third():
    g = cycle_graph(3)
    best, val = max_satisfaction(g, uniform(g, {1, 2, 3}), Request.plain({0: 1, 1: 1, 2: 1}))
    assert val == Fraction(1, 3)
    assert is_proper_coloring(g, uniform(g, {1, 2, 3}), best)


def test_single_vertex_request_met():
    _, val = max_satisfaction(Graph([0]), {0: frozenset({1, 2})}, Request.plain({0: 2}))
    assert val == 1


def test_edge_weighted_half():
    g = path_graph(2)
    req = Request.weighted({(0, 1): 1, (1, 1): 1, (0, 2): 0, (1, 2): 0})
    _, val = max_satisfaction(g, uniform(g, {1, 2}), req)
    assert val == Fraction(1, 2)


def test_satisfaction_errors():
    g = cycle_graph(3)
    with pytest.raises(NotColorableError):
        max_satisfaction(g, uniform(g, {1, 2}), Request.plain({0: 1}))
    with pytest.raises(UndefinedRatioError):
        max_satisfaction(g, uniform(g, {1, 2, 3}), Request.plain({}))
    with pytest.raises(UndefinedRatioError):
        max_satisfaction(g, uniform(g, {1, 2, 3}), Request.weighted({(0, 1): 0}))
    with pytest.raises(ValueError):
        max_satisfaction(g, uniform(g, {1, 2, 3}), Request.plain({0: 9}))
    with pytest.raises(ValueError):
        max_satisfaction(g, uniform(g, {1, 2, 3}), Request.widespread({0: 1}))
    with pytest.raises(ValueError):
        Request.weighted({(0, 1): -1})
    with pytest.raises(ValueError):
        Request("fuzzy")


def brute_best(g, lists, request):
    return max(score(phi, request) for phi in brute_colorings(g, lists))


@given(st.integers(0, 10 ** 6), st.integers(1, 7), st.booleans())
def test_max_satisfaction_matches_brute_force(seed, n, weighted):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.5)
    lists = random_lists(rng, g.vertices, 3, 5)
    if not brute_colorings(g, lists):
        return
    if weighted:
        req = Request.weighted({(v, c): Fraction(int(rng.integers(0, 4)), int(rng.integers(1, 4)))
                                for v in g.vertices for c in lists[v]})
        if req.normalizer() == 0:
            return
    else:
        dom = [v for v in g.vertices if rng.random() < 0.7] or [g.vertices[0]]
        req = Request.plain({v: int(rng.choice(sorted(lists[v]))) for v in dom})
    best, val = max_satisfaction(g, lists, req)
    assert val == brute_best(g, lists, req)
    assert score(best, req) == val
    # dominance over any particular colouring
    for phi in brute_colorings(g, lists)[:5]:
        assert val >= score(phi, req)


@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_widespread_equals_unit_weights(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.5)
    lists = random_lists(rng, g.vertices, 3, 4)
    r = {v: int(rng.choice(sorted(lists[v]))) for v in g.vertices}
    plain = Request.widespread(r)
    w = Request.weighted({(v, c): (1 if c == r[v] else 0) for v in g.vertices for c in lists[v]})
    for phi in brute_colorings(g, lists)[:10]:
        assert score(phi, plain) == score(phi, w)


# -- epsilon ------------------------------------------------------------------

def test_epsilon_examples():
    assert epsilon_bound(3, 1)[:2] == (Fraction(1, 3), Fraction(1, 9))
    assert epsilon_bound(5, 6)[1] == Fraction(1, 5 ** 24)
    assert epsilon_bound(4, 3)[2] == Fraction(1, 4 ** 9 * 3)


@pytest.mark.parametrize("k,b", [(2, 1), (3, 0), (0, 0)])
def test_epsilon_domain(k, b):
    with pytest.raises(DomainError):
        epsilon_bound(k, b)


# -- flexlists ---------------------------------------------------------------

def test_flexlists_round_trip_all_kinds():
    lists = make_lists({0: [1, 2], 1: [2, 3]})
    for req in (None, Request.plain({0: 1}), Request.widespread({0: 1, 1: 3}),
                Request.weighted({(0, 1): Fraction(1, 3), (1, 2): 2})):
        text = format_flexlists(lists, req)
        got_lists, got_req = parse_flexlists(text)
        assert got_lists == lists and got_req == req
        assert format_flexlists(got_lists, got_req) == text


def test_flexlists_infers_widespread():
    _, req = parse_flexlists("flexlists v1\nL 0: 1 2\nR 0 1\n")
    assert req.kind == "widespread"
    _, req = parse_flexlists("flexlists v1\nL 0: 1 2\nL 1: 1\nR 0 1\n")
    assert req.kind == "plain"


@pytest.mark.parametrize("bad", ["", "flexlists v2\n", "flexlists v1\nL x: 1\n", "flexlists v1\nL 0: 1\nL 0: 2\n",
                                 "flexlists v1\nL 0: 1\nR 0 1\nW 0 1 1/2\n", "flexlists v1\nQ 0\n",
                                 "flexlists v1\nL 0: 1\nR 0 1\nR 0 1\n"])
def test_flexlists_errors(bad):
    with pytest.raises(ParseError):
        parse_flexlists(bad)
