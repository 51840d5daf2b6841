"""List assignments, requests, exhaustive L-colouring and the exact satisfaction oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import DomainError, NotColorableError, ParseError, UndefinedRatioError
from .graph import Graph

Lists = Dict[int, FrozenSet[int]]
Coloring = Dict[int, int]


def make_lists(lists: Mapping[int, Sequence[int]]) -> Lists:
    return {int(v): frozenset(int(c) for c in cs) for v, cs in lists.items()}


def check_lists(graph: Graph, lists: Mapping[int, FrozenSet[int]], k: Optional[int] = None) -> None:
    """Raise ``ValueError`` unless ``lists`` covers exactly V(G) (and has size >= k)."""
    extra = set(lists) - set(graph.vertices)
    if extra:
        raise ValueError(f"lists given for vertices outside the graph: {sorted(extra)}")
    for v in graph.vertices:
        if v not in lists:
            raise ValueError(f"vertex {v} has no list")
        if k is not None and len(lists[v]) < k:
            raise ValueError(f"list at vertex {v} has size {len(lists[v])} < {k}")


def is_proper_coloring(graph: Graph, lists: Mapping[int, FrozenSet[int]], coloring: Mapping[int, int]) -> bool:
    if set(coloring) != set(graph.vertices):
        return False
    if any(coloring[v] not in lists[v] for v in graph.vertices):
        return False
    return all(coloring[u] != coloring[v] for u, v in graph.edges)


# -- fast kernel on indexed graphs with bitmask lists ----------------------

def colorable_masks(nbrs: Sequence[Sequence[int]], masks: Sequence[int]) -> bool:
    """Is the graph (vertices 0..n-1, adjacency ``nbrs``) colourable from bitmask lists?

    Depth-first search with forward checking and minimum-remaining-values
    vertex choice.
    """
    n = len(masks)
    if any(m == 0 for m in masks):
        return False

    def rec(dom: List[int], left: int) -> bool:
        if not left:
            return True
        best, best_cnt = -1, 1 << 30
        x = left
        while x:
            low = x & -x
            v = low.bit_length() - 1
            x ^= low
            cnt = dom[v].bit_count()
            if cnt < best_cnt:
                best, best_cnt = v, cnt
                if cnt == 1:
                    break
        v = best
        left2 = left & ~(1 << v)
        m = dom[v]
        while m:
            bit = m & -m
            m ^= bit
            nd = dom[:]
            ok = True
            for w in nbrs[v]:
                if left2 >> w & 1 and nd[w] & bit:
                    nd[w] &= ~bit
                    if not nd[w]:
                        ok = False
                        break
            if ok and rec(nd, left2):
                return True
        return False

    return rec(list(masks), (1 << n) - 1)


def _index(graph: Graph, lists: Mapping[int, FrozenSet[int]]):
    verts = graph.vertices
    idx = {v: i for i, v in enumerate(verts)}
    nbrs = [[idx[w] for w in graph.neighbors(v)] for v in verts]
    colors = sorted(set().union(*[lists[v] for v in verts])) if verts else []
    cidx = {c: i for i, c in enumerate(colors)}
    masks = [sum(1 << cidx[c] for c in lists[v]) for v in verts]
    return verts, nbrs, colors, masks


def is_colorable(graph: Graph, lists: Mapping[int, FrozenSet[int]]) -> bool:
    if len(graph) == 0:
        return True
    _, nbrs, _, masks = _index(graph, lists)
    return colorable_masks(nbrs, masks)


def enumerate_colorings(graph: Graph, lists: Mapping[int, FrozenSet[int]]) -> Iterator[Coloring]:
    """Yield every L-colouring once, in lexicographic order (vertices by id, colours ascending)."""
    verts = graph.vertices
    if not verts:
        yield {}
        return
    idx = {v: i for i, v in enumerate(verts)}
    later = [[idx[w] for w in graph.neighbors(v) if idx[w] > i] for i, v in enumerate(verts)]
    n = len(verts)
    assign = [0] * n

    def rec(i: int, dom: List[FrozenSet[int]]):
        if i == n:
            yield {verts[j]: assign[j] for j in range(n)}
            return
        for c in sorted(dom[i]):
            nd = dom
            ok = True
            touched = [w for w in later[i] if c in dom[w]]
            if touched:
                nd = dom[:]
                for w in touched:
                    nd[w] = nd[w] - {c}
                    if not nd[w]:
                        ok = False
                        break
            if ok:
                assign[i] = c
                yield from rec(i + 1, nd)

    yield from rec(0, [frozenset(lists[v]) for v in verts])


def count_colorings(graph: Graph, lists: Mapping[int, FrozenSet[int]]) -> int:
    return sum(1 for _ in enumerate_colorings(graph, lists))


# -- requests ----------------------------------------------------------------

@dataclass(frozen=True)
class Request:
    """A plain, widespread or weighted request.

    ``colors`` maps vertices of dom(r) to their requested colour (plain and
    widespread); ``weights`` maps ``(vertex, colour)`` to a non-negative
    rational (weighted).
    """

    kind: str
    colors: Mapping[int, int] = field(default_factory=dict)
    weights: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("plain", "widespread", "weighted"):
            raise ValueError(f"unknown request kind {self.kind!r}")
        if self.kind == "weighted":
            if any(Fraction(w) < 0 for w in self.weights.values()):
                raise ValueError("weights must be non-negative")

    @classmethod
    def plain(cls, colors: Mapping[int, int]) -> "Request":
        return cls("plain", dict(colors))

    @classmethod
    def widespread(cls, colors: Mapping[int, int]) -> "Request":
        return cls("widespread", dict(colors))

    @classmethod
    def weighted(cls, weights: Mapping[Tuple[int, int], object]) -> "Request":
        return cls("weighted", weights={(int(v), int(c)): Fraction(w) for (v, c), w in weights.items()})

    def validate(self, graph: Graph, lists: Mapping[int, FrozenSet[int]]) -> None:
        if self.kind == "weighted":
            for (v, c) in self.weights:
                if v not in graph or c not in lists[v]:
                    raise ValueError(f"weight on ({v}, {c}) but {c} is not in L({v})")
            return
        for v, c in self.colors.items():
            if v not in graph or c not in lists[v]:
                raise ValueError(f"request r({v}) = {c} is not in L({v})")
        if self.kind == "widespread" and set(self.colors) != set(graph.vertices):
            raise ValueError("a widespread request must have dom(r) = V(G)")

    def as_weights(self) -> Dict[Tuple[int, int], Fraction]:
        if self.kind == "weighted":
            return dict(self.weights)
        return {(v, c): Fraction(1) for v, c in self.colors.items()}

    def normalizer(self) -> Fraction:
        """|dom(r)| for plain/widespread requests, w(G, L) for weighted ones."""
        if self.kind == "weighted":
            return sum(self.weights.values(), Fraction(0))
        return Fraction(len(self.colors))


def score(coloring: Mapping[int, int], request: Request) -> Fraction:
    """Satisfied fraction of ``request`` under ``coloring``."""
    total = request.normalizer()
    if total == 0:
        raise UndefinedRatioError("request has empty domain or zero total weight")
    if request.kind == "weighted":
        got = sum((w for (v, c), w in request.weights.items() if coloring.get(v) == c), Fraction(0))
    else:
        got = Fraction(sum(1 for v, c in request.colors.items() if coloring.get(v) == c))
    return got / total


def max_satisfaction(
    graph: Graph, lists: Mapping[int, FrozenSet[int]], request: Request
) -> Tuple[Coloring, Fraction]:
    """Exact optimum over all L-colourings by branch and bound.

    The bound adds, for every uncoloured vertex, the largest weight among the
    colours still available to it.  Ties keep the lexicographically first
    colouring.
    """
    request.validate(graph, lists)
    total = request.normalizer()
    if total == 0:
        raise UndefinedRatioError("request has empty domain or zero total weight")
    weights = request.as_weights()
    verts = graph.vertices
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    later = [[idx[w] for w in graph.neighbors(v) if idx[w] > i] for i, v in enumerate(verts)]
    wt = [{c: weights.get((v, c), Fraction(0)) for c in lists[v]} for v in verts]

    best_val: List[Optional[Fraction]] = [None]
    best_col: List[Optional[List[int]]] = [None]
    assign = [0] * n

    def bound(i, dom):
        return sum((max((wt[j][c] for c in dom[j]), default=Fraction(0)) for j in range(i, n)), Fraction(0))

    def rec(i: int, dom: List[FrozenSet[int]], acc: Fraction):
        if i == n:
            if best_val[0] is None or acc > best_val[0]:
                best_val[0] = acc
                best_col[0] = assign[:]
            return
        if best_val[0] is not None and acc + bound(i, dom) <= best_val[0]:
            return
        # heavier colours first so good solutions are found early
        for c in sorted(dom[i], key=lambda c: (-wt[i][c], c)):
            nd = dom[:]
            ok = True
            for w in later[i]:
                if c in nd[w]:
                    nd[w] = nd[w] - {c}
                    if not nd[w]:
                        ok = False
                        break
            if ok:
                assign[i] = c
                rec(i + 1, nd, acc + wt[i][c])

    rec(0, [frozenset(lists[v]) for v in verts], Fraction(0))
    if best_col[0] is None:
        raise NotColorableError("graph is not L-colourable")
    return {verts[j]: best_col[0][j] for j in range(n)}, best_val[0] / total


def epsilon_bound(k: int, b: int) -> Tuple[Fraction, Fraction, Fraction]:
    """Return ``(p, epsilon, weak_epsilon)`` with p = k^-b, epsilon = p^(k-1), weak = epsilon / b."""
    if k < 3 or b < 1:
        raise DomainError(f"need k >= 3 and b >= 1, got k={k}, b={b}")
    p = Fraction(1, k**b)
    eps = p ** (k - 1)
    return p, eps, eps / b


# -- flexlists v1 --------------------------------------------------------------

FLEXLISTS_HEADER = "flexlists v1"


def parse_flexlists(text: str) -> Tuple[Lists, Optional[Request]]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXLISTS_HEADER:
        raise ParseError(f"expected header {FLEXLISTS_HEADER!r}")
    lists: Dict[int, FrozenSet[int]] = {}
    colors: Dict[int, int] = {}
    weights: Dict[Tuple[int, int], Fraction] = {}
    kind = None
    try:
        for ln in lines[1:]:
            tag, _, rest = ln.partition(" ")
            if tag == "L":
                v, _, cs = rest.partition(":")
                v = int(v)
                if v in lists:
                    raise ParseError(f"list for vertex {v} given twice")
                lists[v] = frozenset(int(c) for c in cs.split())
            elif tag == "R":
                v, c = rest.split()
                if int(v) in colors:
                    raise ParseError(f"vertex {v} requested twice")
                colors[int(v)] = int(c)
            elif tag == "W":
                v, c, w = rest.split()
                weights[(int(v), int(c))] = Fraction(w)
            elif tag == "kind":
                kind = rest.strip()
            else:
                raise ParseError(f"unknown line {ln!r}")
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if colors and weights:
        raise ParseError("a request is either R-lines or W-lines, not both")
    request = None
    if weights:
        request = Request.weighted(weights)
    elif colors:
        if kind is None:
            kind = "widespread" if set(colors) == set(lists) else "plain"
        request = Request(kind, colors)
    return lists, request


def format_flexlists(lists: Mapping[int, FrozenSet[int]], request: Optional[Request] = None) -> str:
    out = [FLEXLISTS_HEADER]
    for v in sorted(lists):
        out.append(f"L {v}: " + " ".join(str(c) for c in sorted(lists[v])))
    if request is not None:
        if request.kind == "weighted":
            for (v, c), w in sorted(request.weights.items()):
                out.append(f"W {v} {c} {w.numerator}/{w.denominator}")
        else:
            out.append(f"kind {request.kind}")
            for v, c in sorted(request.colors.items()):
                out.append(f"R {v} {c}")
    return "\n".join(out) + "\n"
