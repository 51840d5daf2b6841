"""Random connected plane graphs for property tests and acceptance runs."""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay

from .family import ForbiddenFamily
from .graph import Graph, RotationSystem


def graph_from_coordinates(points: Sequence[Tuple[float, float]], edges) -> Tuple[Graph, RotationSystem]:
    """Straight-line drawing to rotation system (counterclockwise neighbour order)."""
    n = len(points)
    g = Graph(range(n), edges)
    rot = {}
    for v in range(n):
        x, y = points[v]
        rot[v] = sorted(g.neighbors(v), key=lambda w: math.atan2(points[w][1] - y, points[w][0] - x))
    return g, RotationSystem(rot)


def random_triangulation(n: int, rng: np.random.Generator) -> Tuple[Graph, RotationSystem]:
    """Delaunay triangulation of ``n`` uniform random points in the unit square."""
    if n < 3:
        raise ValueError("need at least 3 points")
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((int(min(u, v)), int(max(u, v))))
    return graph_from_coordinates([tuple(p) for p in pts], sorted(edges))


def _drop_edge(g: Graph, rot: RotationSystem, u: int, v: int) -> Tuple[Graph, RotationSystem]:
    return g.remove_edge(u, v), rot.without_edge(u, v)


def delete_edges(g: Graph, rot: RotationSystem, fraction: float, rng: np.random.Generator):
    """Delete about ``fraction`` of the edges, never disconnecting the graph."""
    target = int(round(fraction * g.num_edges))
    edges = g.edges
    order = rng.permutation(len(edges))
    removed = 0
    for i in order:
        if removed >= target:
            break
        u, v = edges[i]
        if not g.has_edge(u, v) or g.is_bridge(u, v):
            continue
        g, rot = _drop_edge(g, rot, u, v)
        removed += 1
    return g, rot


def filter_to_family(g: Graph, rot: RotationSystem, family: ForbiddenFamily, rng: np.random.Generator):
    """Delete non-bridge edges of forbidden subgraphs until none is left.

    Returns ``None`` if some witness consists only of bridges (cannot happen
    for cycle-based members, which is all the builtin families use).
    """
    while True:
        viol = family.violation(g)
        if viol is None:
            return g, rot
        cands = [e for e in viol.edges if not g.is_bridge(*e)]
        if not cands:
            return None
        u, v = cands[int(rng.integers(len(cands)))]
        g, rot = _drop_edge(g, rot, u, v)


def random_plane_graph(
    n: int,
    seed: int,
    delete_fraction: float = 0.3,
    family: Optional[ForbiddenFamily] = None,
) -> Tuple[Graph, RotationSystem]:
    """Connected plane graph: triangulate, thin out, then (optionally) make it ``family``-free."""
    rng = np.random.default_rng(seed)
    g, rot = random_triangulation(n, rng)
    g, rot = delete_edges(g, rot, delete_fraction, rng)
    if family is not None:
        out = filter_to_family(g, rot, family, rng)
        if out is None:
            raise ValueError("could not filter graph into the family")
        g, rot = out
    return g, rot
