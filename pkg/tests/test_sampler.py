import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flexcolor.coloring import Request, epsilon_bound, is_proper_coloring, make_lists, max_satisfaction
from flexcolor.errors import BudgetExceededError, CertificateError, UndefinedRatioError
from flexcolor.family import builtin_family
from flexcolor.graph import Graph, cycle_graph, path_graph
from flexcolor.library import builtin_library
from flexcolor.resolution import build_resolution, resolution_from_blocks, validate_resolution
from flexcolor.sampler import (
    LayeredSampler,
    estimate_marginals,
    exact_distribution,
    sample_coloring,
    satisfaction,
    verify_bounds,
)
from tests.helpers import brute_colorings, random_degenerate_graph, random_lists

EMPTY = builtin_family("empty")


def one_block(g, k=3):
    return resolution_from_blocks(g, [], residue=g.vertices, k=k)


def weak_c4_example():
    g = Graph(range(1, 6), [(1, 2), (2, 3), (3, 4), (1, 4), (2, 5), (3, 5), (4, 5)])
    res = resolution_from_blocks(g, [([1, 2, 3, 4], []), ([5], [])], k=3, kind="weak", fixes={0: [2, 3, 4]})
    return g, res


# -- exact law -----------------------------------------------------------------------

def test_single_vertex_uniform():
    g = Graph([0])
    lists = make_lists({0: [1, 2, 3]})
    dist = exact_distribution(g, lists, one_block(g))
    assert sorted(dist.support.values()) == [Fraction(1, 3)] * 3
    rep = verify_bounds(dist, g, lists, EMPTY, 3, 1)
    assert rep.ok and rep.min_fix_marginal == Fraction(1, 3) and rep.epsilon == Fraction(1, 9)


def test_edge_residue_halves():
    g = path_graph(2)
    lists = make_lists({0: [1, 2], 1: [1, 2]})
    dist = exact_distribution(g, lists, one_block(g))
    assert dist.support == {((0, 1), (1, 2)): Fraction(1, 2), ((0, 2), (1, 1)): Fraction(1, 2)}
    assert all(p == Fraction(1, 2) for row in dist.marginals().values() for p in row.values())
    assert verify_bounds(dist, g, lists, EMPTY, 3, 1).min_fix_marginal == Fraction(1, 2)


def test_path_peeled_after_residue():
    g = path_graph(2)
    lists = make_lists({0: [1, 2], 1: [1, 2]})
    res = resolution_from_blocks(g, [([0], [])], residue=[1], k=3)
    dist = exact_distribution(g, lists, res)
    assert dist.support == {((0, 2), (1, 1)): Fraction(1, 2), ((0, 1), (1, 2)): Fraction(1, 2)}


def test_empty_set_avoidance_is_one():
    g = path_graph(2)
    dist = exact_distribution(g, make_lists({0: [1, 2], 1: [1, 2]}), one_block(g))
    assert dist.avoidance([], 1) == 1


def test_marginal_rows_sum_to_one_and_to_dict():
    g, res = weak_c4_example()
    lists = {v: frozenset({1, 2, 3}) for v in g.vertices}
    dist = exact_distribution(g, lists, res)
    assert dist.total() == 1
    assert all(sum(row.values()) == 1 for row in dist.marginals().values())
    d = dist.to_dict()
    assert sum(Fraction(e["probability"]) for e in d["support"]) == 1


def test_budget_guard():
    g = Graph(range(11))
    lists = {v: frozenset(range(1, 6)) for v in g.vertices}
    with pytest.raises(BudgetExceededError):
        exact_distribution(g, lists, one_block(g, 5))
    small = Graph(range(3))
    with pytest.raises(BudgetExceededError):
        exact_distribution(small, {v: frozenset({1, 2}) for v in small.vertices}, one_block(small), budget=7)


def test_invalid_resolution_is_certificate_error():
    g = cycle_graph(3)
    lists = {v: frozenset({1, 2}) for v in g.vertices}
    with pytest.raises(CertificateError):
        sample_coloring(g, lists, one_block(g), seed=1)
    with pytest.raises(CertificateError):
        exact_distribution(g, lists, one_block(g))
    partial = resolution_from_blocks(g, [([0], [])], k=3)
    with pytest.raises(CertificateError):
        LayeredSampler(g, {v: frozenset({1, 2, 3}) for v in g.vertices}, partial)


def brute_law(g, lists, res):
    """Independent recomputation: product of 1/|extensions| along each colouring's path."""
    blocks = ([res.residue.Q] if res.residue is not None else []) + [s.Q for s in reversed(res.steps)]
    law = {}
    for phi in brute_colorings(g, lists):
        pr = Fraction(1)
        placed = {}
        for blk in blocks:
            sub = g.induced(blk)
            reduced = {y: lists[y] - {placed[w] for w in g.neighbors(y) if w in placed} for y in blk}
            pr /= len(brute_colorings(sub, reduced))
            placed.update({y: phi[y] for y in blk})
        law[tuple(sorted(phi.items()))] = pr
    return {k: v for k, v in law.items()}


@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.sampled_from([3, 4]))
def test_exact_law_on_random_instances(seed, n, k):
    rng = np.random.default_rng(seed)
    g = random_degenerate_graph(rng, n, k - 2)
    lists = random_lists(rng, g.vertices, k, k + 2)
    res = build_resolution(g, builtin_library(f"degenerate{k}"))
    assert validate_resolution(g, res).valid
    dist = exact_distribution(g, lists, res)
    assert dist.total() == 1
    assert all(is_proper_coloring(g, lists, dict(key)) for key in dist.support)
    # every L-colouring is reachable, with the two-stage probability recomputed by brute force
    assert dist.support == brute_law(g, lists, res)
    rep = verify_bounds(dist, g, lists, EMPTY, k, res.effective_b)
    assert rep.ok, rep.violations
    r = Request.plain({v: min(lists[v]) for v in g.vertices})
    assert max_satisfaction(g, lists, r)[1] >= dist.expected_score(r) >= rep.epsilon


# -- weak accounting -----------------------------------------------------------------

def test_weak_accounting():
    g, res = weak_c4_example()
    assert validate_resolution(g, res).valid
    lists = {1: frozenset({1, 2, 3}), 2: frozenset({1, 2, 4}), 3: frozenset({2, 3, 4}), 4: frozenset({1, 3, 4}),
             5: frozenset({1, 2, 3})}
    dist = exact_distribution(g, lists, res)
    b = res.effective_b
    fix = res.fixed_vertices
    assert len(fix) * b >= len(g)
    _, eps, _ = epsilon_bound(3, b)
    rep = verify_bounds(dist, g, lists, EMPTY, 3, b, fix=fix)
    assert rep.ok
    r = {v: max(lists[v]) for v in g.vertices}
    expected_fix_hits = sum(dist.marginals()[v].get(r[v], 0) for v in fix)
    assert expected_fix_hits >= eps * len(g) / b
    wide = Request.widespread(r)
    assert dist.expected_score(wide) >= eps / b


# -- sampling --------------------------------------------------------------------------

def test_sampling_is_deterministic():
    g = cycle_graph(5)
    lists = {v: frozenset({1, 2, 3, 4}) for v in g.vertices}
    res = build_resolution(g, builtin_library("degenerate4"))
    a = [sample_coloring(g, lists, res, 7, t) for t in range(20)]
    b = [sample_coloring(g, lists, res, 7, t) for t in range(20)]
    assert a == b
    assert a != [sample_coloring(g, lists, res, 8, t) for t in range(20)]


def test_c5_samples_proper():
    g = cycle_graph(5)
    lists = {v: frozenset({1, 2, 3, 4}) for v in g.vertices}
    res = build_resolution(g, builtin_library("degenerate4"))
    sampler = LayeredSampler(g, lists, res)
    assert all(is_proper_coloring(g, lists, sampler.sample(3, t)) for t in range(10 ** 4))


def test_single_vertex_empirical():
    g = Graph([0])
    table = estimate_marginals(g, make_lists({0: [1, 2, 3]}), one_block(g), 30000, seed=5)
    assert all(abs(p - 1 / 3) < 0.02 for p in table[0].values())
    assert math.isclose(sum(table[0].values()), 1.0)
    assert table == estimate_marginals(g, make_lists({0: [1, 2, 3]}), one_block(g), 30000, seed=5)
    with pytest.raises(ValueError):
        estimate_marginals(g, make_lists({0: [1, 2, 3]}), one_block(g), 0, seed=5)


def test_empirical_matches_exact_within_4_sigma():
    g, res = weak_c4_example()
    lists = {v: frozenset({1, 2, 3}) for v in g.vertices}
    n = 20000
    exact = exact_distribution(g, lists, res).marginals()
    emp = estimate_marginals(g, lists, res, n, seed=11)
    for v, row in exact.items():
        for c, p in row.items():
            sigma = math.sqrt(float(p) * (1 - float(p)) / n)
            assert abs(emp[v][c] - float(p)) <= 4 * sigma + 1e-12


# -- satisfaction --------------------------------------------------------------------

def test_satisfaction_examples():
    phi = {0: 1, 1: 2, 2: 3}
    assert satisfaction(phi, Request.plain({0: 1, 1: 2, 2: 3})) == 1
    assert satisfaction(phi, Request.plain({0: 2, 1: 3})) == 0
    assert satisfaction(phi, Request.plain({0: 1, 1: 1, 2: 1})) == Fraction(1, 3)
    with pytest.raises(UndefinedRatioError):
        satisfaction(phi, Request.plain({}))
