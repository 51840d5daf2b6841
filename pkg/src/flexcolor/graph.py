"""Simple graphs, rotation systems, face tracing, degeneracy and subgraph search.

Vertices are integers.  A :class:`Graph` is immutable; every operation that
"changes" a graph returns a new one.  A :class:`RotationSystem` stores, for
each vertex, the clockwise cyclic order of its neighbours and is the only
representation of a plane embedding used in this package.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import EmbeddingIncompleteError, ParseError

Edge = Tuple[int, int]
Dart = Tuple[int, int]


class Graph:
    """An undirected simple graph on integer vertices."""

    __slots__ = ("_adj", "_edges")

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[Tuple[int, int]] = ()):
        adj: Dict[int, set] = {int(v): set() for v in vertices}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) uses an undeclared vertex")
            if v in adj[u]:
                raise ValueError(f"parallel edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: frozenset(ns) for v, ns in adj.items()}
        self._edges = None

    @classmethod
    def from_adjacency(cls, adj: Dict[int, Iterable[int]]) -> "Graph":
        """Build from a symmetric adjacency mapping (both directions listed)."""
        edges = set()
        for u, ns in adj.items():
            for v in ns:
                if v not in adj or u not in adj[v]:
                    raise ValueError(f"adjacency is not symmetric at ({u}, {v})")
                if u == v:
                    raise ValueError(f"self-loop at vertex {u}")
                edges.add((min(u, v), max(u, v)))
        return cls(adj.keys(), sorted(edges))

    # -- basic queries ---------------------------------------------------

    @property
    def vertices(self) -> List[int]:
        return sorted(self._adj)

    @property
    def edges(self) -> List[Edge]:
        if self._edges is None:
            self._edges = sorted((u, v) for u in self._adj for v in self._adj[u] if u < v)
        return self._edges

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self):
        return hash((tuple(self.vertices), tuple(self.edges)))

    def __repr__(self) -> str:
        return f"Graph(n={len(self)}, m={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> Dict[int, int]:
        return {v: len(ns) for v, ns in self._adj.items()}

    def max_degree(self) -> int:
        return max((len(ns) for ns in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def adjacency(self) -> Dict[int, frozenset]:
        return dict(self._adj)

    # -- derived graphs --------------------------------------------------

    def induced(self, vertices: Iterable[int]) -> "Graph":
        keep = set(vertices)
        missing = keep - self._adj.keys()
        if missing:
            raise ValueError(f"vertices not in graph: {sorted(missing)}")
        g = Graph.__new__(Graph)
        g._adj = {v: self._adj[v] & keep for v in keep}
        g._edges = None
        return g

    def remove_vertices(self, vertices: Iterable[int]) -> "Graph":
        drop = set(vertices)
        return self.induced(v for v in self._adj if v not in drop)

    def remove_edge(self, u: int, v: int) -> "Graph":
        if not self.has_edge(u, v):
            raise ValueError(f"no edge ({u}, {v})")
        return Graph(self._adj, [e for e in self.edges if e != (min(u, v), max(u, v))])

    def with_apex(self, attach: Iterable[int], apex: Optional[int] = None) -> Tuple["Graph", int]:
        """Return the graph plus one new vertex adjacent exactly to ``attach``."""
        attach = set(attach)
        if apex is None:
            apex = max(self._adj, default=-1) + 1
        if apex in self._adj:
            raise ValueError(f"apex id {apex} already used")
        return Graph(list(self._adj) + [apex], self.edges + [(apex, a) for a in sorted(attach)]), apex

    def relabel(self, mapping: Dict[int, int]) -> "Graph":
        return Graph((mapping[v] for v in self._adj), ((mapping[u], mapping[v]) for u, v in self.edges))

    # -- connectivity ----------------------------------------------------

    def components(self) -> List[List[int]]:
        seen = set()
        comps = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def distances_from(self, sources: Iterable[int]) -> Dict[int, int]:
        dist = {s: 0 for s in sources}
        frontier = list(dist)
        while frontier:
            nxt = []
            for u in frontier:
                for w in self._adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def is_bridge(self, u: int, v: int) -> bool:
        h = self.remove_edge(u, v)
        return v not in h.distances_from([u])


class RotationSystem:
    """Clockwise cyclic neighbour order at every vertex."""

    __slots__ = ("_rot", "_pos")

    def __init__(self, rotation: Dict[int, Sequence[int]]):
        self._rot = {int(v): tuple(int(w) for w in ns) for v, ns in rotation.items()}
        self._pos = {v: {w: i for i, w in enumerate(ns)} for v, ns in self._rot.items()}

    def __getitem__(self, v: int) -> Tuple[int, ...]:
        return self._rot[v]

    def __contains__(self, v) -> bool:
        return v in self._rot

    def __eq__(self, other) -> bool:
        return isinstance(other, RotationSystem) and self._rot == other._rot

    def __repr__(self) -> str:
        return f"RotationSystem({self._rot!r})"

    def as_dict(self) -> Dict[int, Tuple[int, ...]]:
        return dict(self._rot)

    def successor(self, v: int, u: int) -> int:
        """Neighbour of ``v`` that follows ``u`` in the rotation at ``v``."""
        ns = self._rot[v]
        return ns[(self._pos[v][u] + 1) % len(ns)]

    def validate(self, graph: Graph) -> None:
        for v in graph.vertices:
            if v not in self._rot:
                raise EmbeddingIncompleteError(f"rotation has no entry for vertex {v}")
            ns = self._rot[v]
            if len(ns) != len(set(ns)) or set(ns) != graph.neighbors(v):
                raise EmbeddingIncompleteError(
                    f"rotation at vertex {v} does not match its neighbourhood"
                )

    def restrict(self, vertices: Iterable[int]) -> "RotationSystem":
        """Rotation of the induced subgraph: deleted neighbours drop out of each cycle."""
        keep = set(vertices)
        return RotationSystem({v: [w for w in ns if w in keep] for v, ns in self._rot.items() if v in keep})

    def without_edge(self, u: int, v: int) -> "RotationSystem":
        rot = dict(self._rot)
        rot[u] = tuple(w for w in rot[u] if w != v)
        rot[v] = tuple(w for w in rot[v] if w != u)
        return RotationSystem(rot)


@dataclass(frozen=True)
class Face:
    """A face of an embedding given by its boundary walk of directed edges."""

    darts: Tuple[Dart, ...]
    # isolated vertex bounded by an empty walk
    isolated: Optional[int] = None

    @property
    def length(self) -> int:
        return len(self.darts)

    def __len__(self) -> int:
        return len(self.darts)

    @property
    def walk(self) -> Tuple[int, ...]:
        """Vertices in walk order, one entry per corner (repeats possible)."""
        if self.isolated is not None:
            return (self.isolated,)
        return tuple(u for u, _ in self.darts)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.walk)


def faces(graph: Graph, rotation: RotationSystem) -> List[Face]:
    """Trace all face boundary walks of the embedding.

    The successor of dart ``(u, v)`` is ``(v, w)`` with ``w`` following ``u``
    in the rotation at ``v``.  An isolated vertex contributes one empty face
    so that Euler's formula holds per component.
    """
    rotation.validate(graph)
    seen = set()
    out: List[Face] = []
    for u, v in sorted(d for e in graph.edges for d in (e, e[::-1])):
        if (u, v) in seen:
            continue
        walk = []
        dart = (u, v)
        while dart not in seen:
            seen.add(dart)
            walk.append(dart)
            a, b = dart
            dart = (b, rotation.successor(b, a))
        out.append(Face(tuple(walk)))
    for v in graph.vertices:
        if graph.degree(v) == 0:
            out.append(Face((), isolated=v))
    return out


def euler_characteristic(graph: Graph, rotation: RotationSystem) -> int:
    return len(graph) - graph.num_edges + len(faces(graph, rotation))


def is_plane_embedding(graph: Graph, rotation: RotationSystem) -> bool:
    """True iff every component satisfies V - E + F = 2 under this rotation."""
    rotation.validate(graph)
    return all(
        euler_characteristic(graph.induced(c), rotation.restrict(c)) == 2
        for c in graph.components()
    )


def degeneracy(graph: Graph) -> Tuple[int, List[int]]:
    """Return ``(d, order)``: repeatedly delete a minimum-degree vertex (lowest id on ties)."""
    deg = graph.degrees()
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    removed = set()
    order = []
    d_max = 0
    while heap:
        d, v = heapq.heappop(heap)
        if v in removed or d != deg[v]:
            continue
        removed.add(v)
        order.append(v)
        d_max = max(d_max, d)
        for w in graph.neighbors(v):
            if w not in removed:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return d_max, order


# -- subgraph matching ---------------------------------------------------

def _pattern_order(pattern: Graph) -> List[int]:
    """Degree-sorted, connectivity-first ordering of pattern vertices."""
    remaining = set(pattern.vertices)
    order: List[int] = []
    placed = set()
    while remaining:
        best = max(
            remaining,
            key=lambda p: (len(pattern.neighbors(p) & placed), pattern.degree(p), -p),
        )
        order.append(best)
        placed.add(best)
        remaining.discard(best)
    return order


def iter_subgraph_matches(
    host: Graph,
    pattern: Graph,
    *,
    induced: bool = False,
    candidate_ok: Optional[Callable[[int, int], bool]] = None,
    ordered_groups: Sequence[Sequence[int]] = (),
    order: Optional[Sequence[int]] = None,
) -> Iterator[Dict[int, int]]:
    """Yield injective maps pattern -> host carrying pattern edges to host edges.

    ``candidate_ok(p, h)`` filters single assignments.  Each group in
    ``ordered_groups`` lists interchangeable pattern vertices whose images must
    be increasing, which removes automorphic duplicates of the same image.
    Host candidates are tried in increasing id order, so the first match is
    deterministic.
    """
    if len(pattern) > len(host):
        return
    order = list(order) if order is not None else _pattern_order(pattern)
    pos = {p: i for i, p in enumerate(order)}
    earlier_nbrs = [[q for q in pattern.neighbors(p) if pos[q] < pos[p]] for p in order]
    earlier_non = [
        [q for q in order[:i] if q not in pattern.neighbors(p)] for i, p in enumerate(order)
    ]
    prev_in_group: Dict[int, int] = {}
    for group in ordered_groups:
        g = sorted(group, key=lambda p: pos[p])
        for a, b in zip(g, g[1:]):
            prev_in_group[b] = a
    pdeg = [pattern.degree(p) for p in order]
    host_vertices = host.vertices
    image: Dict[int, int] = {}
    used = set()

    def rec(i: int):
        if i == len(order):
            yield dict(image)
            return
        p = order[i]
        nb = earlier_nbrs[i]
        if nb:
            anchor = min((image[q] for q in nb), key=lambda h: host.degree(h))
            cands = sorted(host.neighbors(anchor))
        else:
            cands = host_vertices
        lo = image[prev_in_group[p]] if p in prev_in_group else None
        for h in cands:
            if h in used or host.degree(h) < pdeg[i]:
                continue
            if lo is not None and h <= lo:
                continue
            hn = host.neighbors(h)
            if any(image[q] not in hn for q in nb):
                continue
            if induced and any(image[q] in hn for q in earlier_non[i]):
                continue
            if candidate_ok is not None and not candidate_ok(p, h):
                continue
            image[p] = h
            used.add(h)
            yield from rec(i + 1)
            del image[p]
            used.discard(h)

    yield from rec(0)


def contains_subgraph(host: Graph, pattern: Graph) -> Optional[Dict[int, int]]:
    """Return a witness injection if ``pattern`` is an (ordinary) subgraph of ``host``."""
    for m in iter_subgraph_matches(host, pattern):
        return m
    return None


# -- flexgraph v1 --------------------------------------------------------

FLEXGRAPH_HEADER = "flexgraph v1"


def parse_flexgraph(text: str) -> Tuple[Graph, RotationSystem]:
    """Parse ``flexgraph v1`` text into a graph and its rotation system."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXGRAPH_HEADER:
        raise ParseError(f"expected header {FLEXGRAPH_HEADER!r}")
    rot: Dict[int, List[int]] = {}
    for ln in lines[1:]:
        if not ln.startswith("v ") or ":" not in ln:
            raise ParseError(f"bad vertex line: {ln!r}")
        head, tail = ln[2:].split(":", 1)
        try:
            v = int(head)
            ns = [int(t) for t in tail.split()]
        except ValueError as exc:
            raise ParseError(f"bad vertex line: {ln!r}") from exc
        if v in rot:
            raise ParseError(f"vertex {v} declared twice")
        if v in ns:
            raise ParseError(f"self-loop at vertex {v}")
        if len(ns) != len(set(ns)):
            raise ParseError(f"parallel edge at vertex {v}")
        rot[v] = ns
    try:
        graph = Graph.from_adjacency(rot)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return graph, RotationSystem(rot)


def format_flexgraph(graph: Graph, rotation: Optional[RotationSystem] = None) -> str:
    out = [FLEXGRAPH_HEADER]
    for v in graph.vertices:
        ns = rotation[v] if rotation is not None else sorted(graph.neighbors(v))
        out.append(f"v {v}: " + " ".join(str(w) for w in ns))
    return "\n".join(out) + "\n"


def embedded_graph_from_rotation(rotation: Dict[int, Sequence[int]]) -> Tuple[Graph, RotationSystem]:
    rot = RotationSystem(rotation)
    g = Graph.from_adjacency({v: list(ns) for v, ns in rotation.items()})
    rot.validate(g)
    return g, rot


# -- small named graphs ----------------------------------------------------

def cycle_graph(n: int, start: int = 0) -> Graph:
    vs = list(range(start, start + n))
    return Graph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def path_graph(n: int, start: int = 0) -> Graph:
    vs = list(range(start, start + n))
    return Graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(range(a + b), [(i, a + j) for i in range(a) for j in range(b)])


def k4_minus() -> Graph:
    """K4 without one edge (the diamond)."""
    return Graph(range(4), [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


def house() -> Graph:
    """A triangle and a 4-cycle sharing an edge."""
    return Graph(range(5), [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)])
