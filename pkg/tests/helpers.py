"""Small brute-force oracles shared by the tests (deliberately naive)."""

from itertools import combinations, permutations, product

import numpy as np

from flexcolor.graph import Graph


def brute_colorings(graph, lists):
    verts = graph.vertices
    out = []
    for combo in product(*(sorted(lists[v]) for v in verts)):
        phi = dict(zip(verts, combo))
        if all(phi[u] != phi[v] for u, v in graph.edges):
            out.append(phi)
    return out


def brute_degeneracy(graph):
    best = 0
    verts = graph.vertices
    for r in range(1, len(verts) + 1):
        for sub in combinations(verts, r):
            h = graph.induced(sub)
            best = max(best, min(h.degree(v) for v in sub))
    return best


def brute_matches(host, pattern):
    """All injective edge-preserving maps pattern -> host."""
    pv = pattern.vertices
    out = []
    for img in permutations(host.vertices, len(pv)):
        m = dict(zip(pv, img))
        if all(host.has_edge(m[a], m[b]) for a, b in pattern.edges):
            out.append(m)
    return out


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(range(n), edges)


def random_degenerate_graph(rng, n, d):
    """Each new vertex joins at most d earlier ones; degeneracy <= d."""
    edges = []
    for v in range(1, n):
        k = int(rng.integers(0, min(d, v) + 1))
        for u in rng.choice(v, size=k, replace=False):
            edges.append((int(u), v))
    return Graph(range(n), edges)


def random_lists(rng, vertices, k, palette):
    return {v: frozenset(int(c) for c in rng.choice(np.arange(1, palette + 1), size=k, replace=False)) for v in vertices}
