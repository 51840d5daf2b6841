"""Forbidden families: subgraph patterns plus named structural predicates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import ParseError
from .graph import (
    Graph,
    complete_bipartite,
    contains_subgraph,
    cycle_graph,
    house,
    k4_minus,
)

SUPPORTED_PREDICATES = ("triangles_within_distance",)


@dataclass(frozen=True)
class Violation:
    """Why a graph is not F-free: which member, and the host edges involved."""

    member: str
    edges: Tuple[Tuple[int, int], ...]
    mapping: Optional[Dict[int, int]] = None


def triangles(graph: Graph) -> List[Tuple[int, int, int]]:
    out = []
    for u, v in graph.edges:
        for w in graph.neighbors(u) & graph.neighbors(v):
            if w > v:
                out.append((u, v, w))
    return out


def close_triangles(graph: Graph, d: int) -> Optional[Tuple[Tuple[int, int, int], Tuple[int, int, int]]]:
    """First pair of distinct triangles whose vertex sets are at distance <= d."""
    tris = triangles(graph)
    for i, t in enumerate(tris):
        dist = _bounded_distances(graph, t, d)
        for s in tris[i + 1:]:
            if any(x in dist for x in s):
                return t, s
    return None


def _bounded_distances(graph: Graph, sources, limit: int) -> Dict[int, int]:
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    for step in range(1, limit + 1):
        nxt = []
        for u in frontier:
            for w in graph.neighbors(u):
                if w not in dist:
                    dist[w] = step
                    nxt.append(w)
        frontier = nxt
    return dist


@dataclass(frozen=True)
class ForbiddenFamily:
    name: str
    patterns: Tuple[Tuple[str, Graph], ...] = ()
    predicates: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        for pred, _ in self.predicates:
            if pred not in SUPPORTED_PREDICATES:
                raise ValueError(f"unsupported predicate {pred!r}")

    @property
    def is_empty(self) -> bool:
        return not self.patterns and not self.predicates

    def violation(self, graph: Graph) -> Optional[Violation]:
        for name, pat in self.patterns:
            m = contains_subgraph(graph, pat)
            if m is not None:
                edges = tuple(sorted((min(m[a], m[b]), max(m[a], m[b])) for a, b in pat.edges))
                return Violation(name, edges, m)
        for pred, d in self.predicates:
            if pred == "triangles_within_distance":
                pair = close_triangles(graph, d)
                if pair is not None:
                    edges = tuple(
                        sorted({(min(a, b), max(a, b)) for t in pair for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2]))})
                    )
                    return Violation(f"{pred}({d})", edges)
        return None

    def is_free(self, graph: Graph) -> bool:
        return self.violation(graph) is None


def is_forbidding(graph: Graph, subset: Iterable[int], family: ForbiddenFamily) -> bool:
    """True iff ``graph`` plus an apex adjacent exactly to ``subset`` is F-free."""
    subset = set(subset)
    if not subset <= set(graph.vertices):
        raise ValueError("forbidding candidate must be a vertex subset")
    apexed, _ = graph.with_apex(subset)
    return family.is_free(apexed)


def _fam(name, patterns=(), predicates=()):
    return ForbiddenFamily(name, tuple(patterns), tuple(predicates))


def builtin_family(name: str) -> ForbiddenFamily:
    """Families used by the bundled configurations and libraries."""
    table = {
        "empty": lambda: _fam("empty"),
        "k4minus": lambda: _fam("k4minus", [("K4-", k4_minus())]),
        "c4": lambda: _fam("c4", [("C4", cycle_graph(4))]),
        "c4c5": lambda: _fam("c4c5", [("C4", cycle_graph(4)), ("C5", cycle_graph(5))]),
        "thm3": lambda: _fam("thm3", [("C4", cycle_graph(4))], [("triangles_within_distance", 1)]),
        "thm4": lambda: _fam("thm4", [("C4", cycle_graph(4)), ("C5", cycle_graph(5)), ("C6", cycle_graph(6))]),
        "house": lambda: _fam("house", [("house", house())]),
        "thm5": lambda: _fam("thm5", [("house", house()), ("K23", complete_bipartite(2, 3))]),
    }
    aliases = {"thm2": "k4minus", "none": "empty", "house_k23": "thm5"}
    key = aliases.get(name, name)
    if key not in table:
        raise KeyError(f"unknown family {name!r}")
    return table[key]()


BUILTIN_FAMILIES = ("empty", "k4minus", "c4", "c4c5", "thm3", "thm4", "house", "thm5")


# -- flexfamily v1 -------------------------------------------------------------

FLEXFAMILY_HEADER = "flexfamily v1"


def parse_flexfamily(text: str) -> ForbiddenFamily:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXFAMILY_HEADER:
        raise ParseError(f"expected header {FLEXFAMILY_HEADER!r}")
    name = "custom"
    patterns = []
    predicates = []
    current = None
    try:
        for ln in lines[1:]:
            tok = ln.split()
            if current is not None:
                if tok[0] == "edge":
                    u, v = int(tok[1]), int(tok[2])
                    current[1].extend([u, v])
                    current[2].append((u, v))
                elif tok[0] == "vertex":
                    current[1].append(int(tok[1]))
                elif tok[0] == "end":
                    pname, vs, es = current
                    patterns.append((pname, Graph(sorted(set(vs)), es)))
                    current = None
                else:
                    raise ParseError(f"unexpected line inside pattern: {ln!r}")
            elif tok[0] == "name":
                name = tok[1]
            elif tok[0] == "pattern":
                current = (tok[1], [], [])
            elif tok[0] == "predicate":
                predicates.append((tok[1], int(tok[2])))
            else:
                raise ParseError(f"unknown line {ln!r}")
        if current is not None:
            raise ParseError(f"pattern {current[0]!r} is missing 'end'")
        return ForbiddenFamily(name, tuple(patterns), tuple(predicates))
    except (ValueError, IndexError) as exc:
        raise ParseError(str(exc)) from exc


def format_flexfamily(family: ForbiddenFamily) -> str:
    out = [FLEXFAMILY_HEADER, f"name {family.name}"]
    for pname, g in family.patterns:
        out.append(f"pattern {pname}")
        for v in g.vertices:
            if g.degree(v) == 0:
                out.append(f"vertex {v}")
        for u, v in g.edges:
            out.append(f"edge {u} {v}")
        out.append("end")
    for pred, d in family.predicates:
        out.append(f"predicate {pred} {d}")
    return "\n".join(out) + "\n"
