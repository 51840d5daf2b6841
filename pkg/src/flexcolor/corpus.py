"""Bundled configurations with known verdicts, and named embedded graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .graph import Graph, RotationSystem, parse_flexgraph
from .reducibility import Configuration


def _config(edges, boundary, degrees, name, fix=None, vertices=()) -> Configuration:
    verts = set(degrees) | set(boundary) | set(vertices)
    for u, v in edges:
        verts |= {u, v}
    return Configuration(Graph(sorted(verts), edges), frozenset(boundary), degrees, fix, name)


# -- shapes shared by the corpus and the builtin libraries ----------------------

def single_vertex(deg: int, name: str = "") -> Configuration:
    return _config([], [], {0: deg}, name or f"single_{deg}")


def triangle_two(deg: int, name: str = "") -> Configuration:
    """Triangle 0,1,2 with 0 and 1 of degree ``deg``; 2 on the boundary."""
    return _config([(0, 1), (0, 2), (1, 2)], [2], {0: deg, 1: deg}, name or f"triangle_two_{deg}")


def path_of(n: int, deg: int, name: str = "") -> Configuration:
    edges = [(i, i + 1) for i in range(n - 1)]
    return _config(edges, [], {i: deg for i in range(n)}, name or f"path_{n}_{deg}")


RC3_VARIANTS = ("a", "a3", "b0", "b1", "b2")


def near_triangle_star(d: int, variant: str) -> Configuration:
    """A ``d``-vertex 0 with ``d-2`` neighbours 1..d-2 of degree 3, near a triangle.

    Variants: ``a`` 0 is adjacent to a triangle vertex outside the 3-neighbours;
    ``a3`` that triangle vertex is one of them (vertex 1); ``b0`` 0 lies on a
    triangle with two other vertices; ``b1`` one of those is vertex 1; ``b2``
    both are (vertices 1 and 2).
    """
    if d < 3 or (variant == "b2" and d < 4):
        raise ValueError(f"variant {variant} needs a larger d (got {d})")
    A = list(range(1, d - 1))
    star = [(0, a) for a in A]
    degrees = {0: d, **{a: 3 for a in A}}
    n = d - 1
    if variant == "a":
        x, y, z = n, n + 1, n + 2
        edges = star + [(0, x), (x, y), (y, z), (x, z)]
        boundary = [x, y, z]
    elif variant == "a3":
        y, z = n, n + 1
        edges = star + [(1, y), (1, z), (y, z)]
        boundary = [y, z]
    elif variant == "b0":
        y, z = n, n + 1
        edges = star + [(0, y), (0, z), (y, z)]
        boundary = [y, z]
    elif variant == "b1":
        z = n
        edges = star + [(0, z), (1, z)]
        boundary = [z]
    elif variant == "b2":
        edges = star + [(1, 2)]
        boundary = []
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _config(edges, boundary, degrees, f"star_{variant}_d{d}")


def two_triangles_at_vertex() -> Configuration:
    """4-vertex 0 on triangles 0,1,2 and 0,3,4; 1 and 3 have degree 3, 2 and 4 degree 4."""
    return _config(
        [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)], [], {0: 4, 1: 3, 2: 4, 3: 3, 4: 4}, "two_triangles_vertex"
    )


def two_triangles_on_edge() -> Configuration:
    """Adjacent 4-vertices 0,1 on disjoint triangles 0,2,3 and 1,4,5; 2 and 4 have degree 3."""
    return _config(
        [(0, 1), (0, 2), (0, 3), (2, 3), (1, 4), (1, 5), (4, 5)],
        [],
        {0: 4, 1: 4, 2: 3, 3: 4, 4: 3, 5: 4},
        "two_triangles_edge",
    )


def four_cycle(degrees: Dict[int, int], boundary, name: str, fix=None) -> Configuration:
    """4-cycle 1-2-3-4-1 with the given core degrees."""
    return _config([(1, 2), (2, 3), (3, 4), (1, 4)], boundary, degrees, name, fix, vertices=(1, 2, 3, 4))


# -- corpus --------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusConfig:
    name: str
    config: Configuration
    k: int
    family: str
    strong: bool
    weak: bool
    fix_set: Optional[Tuple[int, ...]] = None
    provenance: str = ""


def configuration_corpus() -> List[CorpusConfig]:
    out = []
    for k in (4, 5):
        out.append(CorpusConfig(f"lemma6_k{k}", single_vertex(k - 2, f"lemma6_k{k}"), k, "empty", True, True, (0,),
                                "single (k-2)-vertex"))
        out.append(CorpusConfig(f"lemma7_k{k}", triangle_two(k - 1, f"lemma7_k{k}"), k, "k4minus", True, True, (0, 1),
                                "triangle with two (k-1)-vertices"))
    out.append(CorpusConfig("s5_rc2", path_of(3, 3, "s5_rc2"), 4, "empty", True, True, (0, 1, 2),
                            "path of three 3-vertices"))
    for d in range(3, 9):
        for var in RC3_VARIANTS:
            if var == "b2" and d < 4:
                continue
            cfg = near_triangle_star(d, var)
            out.append(CorpusConfig(f"s5_rc3_{var}_d{d}", cfg, 4, "thm3", True, True, tuple(cfg.core),
                                    "d-vertex with d-2 3-neighbours near a triangle"))
    out.append(CorpusConfig("s6_rc3", two_triangles_at_vertex(), 4, "c4", True, True, (0, 1, 2, 3, 4),
                            "4-vertex on two (3,4,4) triangles"))
    out.append(CorpusConfig("s6_rc4", two_triangles_on_edge(), 4, "c4c5", True, True, (0, 1, 2, 3, 4, 5),
                            "adjacent 4-vertices on disjoint (3,4,4) triangles"))
    out.append(CorpusConfig("s7_rc2", four_cycle({1: 4, 2: 4}, [3, 4], "s7_rc2"), 5, "house", True, True, (1, 2),
                            "4-cycle with two adjacent 4-vertices"))
    out.append(CorpusConfig("s7_rc3", four_cycle({1: 4, 2: 5, 3: 4}, [4], "s7_rc3"), 5, "thm5", True, True,
                            (1, 2, 3), "4-cycle with consecutive degrees 4,5,4"))
    out.append(CorpusConfig("s7_rc4", four_cycle({1: 4, 2: 5, 3: 5, 4: 5}, [], "s7_rc4"), 5, "thm5", False, True,
                            (2, 3, 4), "4-cycle with one 4-vertex and three 5-vertices"))
    out.append(CorpusConfig("s7_rc5", path_of(4, 4, "s7_rc5"), 5, "empty", True, True, (0, 1, 2, 3),
                            "path of four 4-vertices"))
    return out


# -- named graphs ----------------------------------------------------------------

def _data_text(*parts: str) -> str:
    node = resources.files("flexcolor").joinpath("data")
    for part in parts:
        node = node.joinpath(part)
    return node.read_text()


def graph_index() -> Dict[str, dict]:
    """Bundled embedded graphs: name -> {file, families, provenance, degeneracy}."""
    return json.loads(_data_text("graphs.json"))


def load_graph(name: str) -> Tuple[Graph, RotationSystem]:
    index = graph_index()
    if name not in index:
        raise KeyError(f"unknown bundled graph {name!r}; known: {sorted(index)}")
    return parse_flexgraph(_data_text("graphs", index[name]["file"]))


def graph_text(name: str) -> str:
    return _data_text("graphs", graph_index()[name]["file"])
