"""Exhaustive (F,k)-boundary-reducibility checking.

A configuration is a small pattern graph ``H`` with a boundary ``B`` and the
exact degree each core vertex has in the host graph.  Removing the colours of
the outside neighbours leaves every core vertex ``v`` with at least
``f(v) = k - deg_G(v) + deg_{H-B}(v)`` colours; (FIX) and (FORB) quantify over
all list assignments with those sizes.

The quantifier is made finite by colour renaming: an assignment is determined
up to renaming by the multiset of *colour types* (the set of vertices whose
list contains a given colour).  :func:`iter_type_assignments` walks these
multisets directly, one representative per renaming class.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .coloring import colorable_masks
from .errors import InfeasibleConfigurationError, ParseError
from .family import ForbiddenFamily, is_forbidding
from .graph import Graph


@dataclass(frozen=True)
class Configuration:
    """Pattern ``H`` with boundary ``B``, host degrees of core vertices and an optional fixed set."""

    pattern: Graph
    boundary: FrozenSet[int]
    host_degree: Mapping[int, int]
    declared_fix: Optional[FrozenSet[int]] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        object.__setattr__(self, "host_degree", dict(sorted((int(v), int(d)) for v, d in self.host_degree.items())))
        if self.declared_fix is not None:
            object.__setattr__(self, "declared_fix", frozenset(self.declared_fix))
        verts = set(self.pattern.vertices)
        if not self.boundary <= verts or self.boundary == verts:
            raise ValueError("boundary must be a proper subset of V(H)")
        core = verts - self.boundary
        if set(self.host_degree) != core:
            raise ValueError("host_degree must be given for exactly the core vertices")
        for v, d in self.host_degree.items():
            if d < self.pattern.degree(v):
                raise ValueError(f"host degree of {v} is below its drawn degree")
        if self.declared_fix is not None and not self.declared_fix <= core:
            raise ValueError("declared fix set must lie in V(H) - B")

    @property
    def core(self) -> List[int]:
        return sorted(set(self.pattern.vertices) - self.boundary)

    @property
    def core_graph(self) -> Graph:
        return self.pattern.induced(self.core)

    def key(self):
        """Hashable structural key (labels included)."""
        return (
            tuple(self.pattern.vertices),
            tuple(self.pattern.edges),
            tuple(sorted(self.boundary)),
            tuple(self.host_degree.items()),
        )

    def __hash__(self):
        return hash((self.key(), self.declared_fix))

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.key() == other.key() and self.declared_fix == other.declared_fix


def residual_list_sizes(config: Configuration, k: int) -> Dict[int, int]:
    """f(v) = k - deg_G(v) + deg_{H-B}(v) for every core vertex."""
    core = config.core_graph
    sizes = {v: k - config.host_degree[v] + core.degree(v) for v in config.core}
    bad = [v for v, s in sizes.items() if s <= 0]
    if bad:
        raise InfeasibleConfigurationError(
            f"configuration {config.name or ''} leaves no colour at {bad} for k={k}".replace("  ", " ")
        )
    return sizes


# -- canonical enumeration -----------------------------------------------------

def iter_type_assignments(sizes: Sequence[int]) -> Iterator[List[int]]:
    """Yield one bitmask list assignment per colour-renaming class.

    ``sizes[i]`` is the exact list size of vertex ``i``.  Each yielded value
    is a list of colour bitmasks over at most ``sum(sizes)`` colours.  Vertex
    ``i`` either reuses ``x`` colours from each existing type class or opens
    new colours; distinct choices give distinct type multisets, so no two
    yielded assignments are renamings of each other.
    """
    n = len(sizes)
    if any(s < 0 for s in sizes):
        raise ValueError("list sizes must be non-negative")
    # a class is [member vertex bitmask, count]
    classes: List[Tuple[int, int]] = []

    def leaf() -> List[int]:
        masks = [0] * n
        color = 0
        for sig, cnt in classes:
            block = ((1 << cnt) - 1) << color
            color += cnt
            x = sig
            while x:
                low = x & -x
                masks[low.bit_length() - 1] |= block
                x ^= low
        return masks

    def distribute(i: int, j: int, need: int, snapshot: List[Tuple[int, int]]):
        # vertex i takes x colours from snapshot class j, then moves to class j + 1
        if j == len(snapshot):
            if need:
                classes.append((1 << i, need))
            yield from vertex(i + 1)
            if need:
                classes.pop()
            return
        sig, cnt = snapshot[j]
        bit = 1 << i
        for x in range(min(cnt, need), -1, -1):
            if x == 0:
                yield from distribute(i, j + 1, need, snapshot)
            elif x == cnt:
                classes[j] = (sig | bit, cnt)
                yield from distribute(i, j + 1, need - x, snapshot)
                classes[j] = (sig, cnt)
            else:
                classes[j] = (sig, cnt - x)
                classes.append((sig | bit, x))
                yield from distribute(i, j + 1, need - x, snapshot)
                classes.pop()
                classes[j] = (sig, cnt)

    def vertex(i: int):
        if i == n:
            yield leaf()
            return
        snapshot = list(classes)
        yield from distribute(i, 0, sizes[i], snapshot)

    yield from vertex(0)


def enumerate_f_assignments(sizes: Mapping[int, int]) -> Iterator[Dict[int, FrozenSet[int]]]:
    """One representative list assignment (colours 1, 2, ...) per renaming class."""
    verts = sorted(sizes)
    if any(sizes[v] < 1 for v in verts):
        raise ValueError("all list sizes must be at least 1")
    for masks in iter_type_assignments([sizes[v] for v in verts]):
        yield {v: _mask_colors(m) for v, m in zip(verts, masks)}


def _mask_colors(mask: int) -> FrozenSet[int]:
    out = []
    c = 1
    while mask:
        if mask & 1:
            out.append(c)
        mask >>= 1
        c += 1
    return frozenset(out)


# -- checks -------------------------------------------------------------------

@dataclass
class ReducibilityReport:
    name: str
    k: int
    family: str
    mode: str
    sizes: Dict[int, int]
    fix_set: List[int]
    forb_ok: bool
    base_colorable: bool
    strong: bool
    weak: bool
    forbidding_sets: List[List[int]] = field(default_factory=list)
    witnesses: List[dict] = field(default_factory=list)
    declared_fix: Optional[List[int]] = None
    declared_fix_ok: Optional[bool] = None

    @property
    def verdict(self) -> bool:
        return self.strong if self.mode == "strong" else self.weak

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "k": self.k,
            "family": self.family,
            "mode": self.mode,
            "verdict": self.verdict,
            "strong": self.strong,
            "weak": self.weak,
            "fix_set": self.fix_set,
            "forb_ok": self.forb_ok,
            "base_colorable": self.base_colorable,
            "sizes": {str(v): s for v, s in sorted(self.sizes.items())},
            "forbidding_sets": self.forbidding_sets,
            "witnesses": self.witnesses,
            "declared_fix": self.declared_fix,
            "declared_fix_ok": self.declared_fix_ok,
        }


class _Kernel:
    """Core graph of a configuration in indexed form, ready for the colouring kernel.

    With ``reduce_degrees`` a vertex whose list is longer than its number of
    remaining neighbours is dropped before enumerating (it can always be
    coloured last); dropping repeats until no such vertex is left.
    """

    def __init__(self, config: Configuration, k: int, reduce_degrees: bool = True):
        self.verts = config.core
        self.idx = {v: i for i, v in enumerate(self.verts)}
        core = config.core_graph
        self.nbrs = [[self.idx[w] for w in core.neighbors(v)] for v in self.verts]
        self.sizes = residual_list_sizes(config, k)
        self.reduce_degrees = reduce_degrees

    def _survivors(self, sizes: Dict[int, int]) -> List[int]:
        alive = set(range(len(self.verts)))
        if not self.reduce_degrees:
            return sorted(alive)
        deg = {i: len(self.nbrs[i]) for i in alive}
        stack = [i for i in alive if sizes[self.verts[i]] > deg[i]]
        while stack:
            i = stack.pop()
            if i not in alive:
                continue
            alive.discard(i)
            for j in self.nbrs[i]:
                if j in alive:
                    deg[j] -= 1
                    if sizes[self.verts[j]] > deg[j]:
                        stack.append(j)
        return sorted(alive)

    def first_failure(self, sizes: Dict[int, int], first: Optional[int] = None) -> Optional[Dict[int, List[int]]]:
        """First canonical assignment with these exact sizes that has no colouring."""
        alive = self._survivors(sizes)
        if not alive:
            return None
        order = sorted((self.verts[i] for i in alive), key=lambda v: (v != first, sizes[v], v))
        inv = {self.idx[v]: i for i, v in enumerate(order)}
        nbrs = [[inv[w] for w in self.nbrs[self.idx[v]] if w in inv] for v in order]
        for masks in iter_type_assignments([sizes[v] for v in order]):
            if not colorable_masks(nbrs, masks):
                bad = {v: sorted(_mask_colors(m)) for v, m in zip(order, masks)}
                # dropped vertices get fresh colours; they cannot rescue the assignment
                nxt = max((c for cs in bad.values() for c in cs), default=0) + 1
                for v in self.verts:
                    if v not in bad:
                        bad[v] = list(range(nxt, nxt + sizes[v]))
                        nxt += sizes[v]
                return bad
        return None


def _fix_task(kernel: _Kernel, v: int) -> Optional[dict]:
    sizes = dict(kernel.sizes)
    sizes[v] = 1
    bad = kernel.first_failure(sizes, first=v)
    if bad is None:
        return None
    return {"clause": "FIX", "vertex": v, "lists": {str(u): cs for u, cs in sorted(bad.items())}}


def _forb_task(kernel: _Kernel, subset: Tuple[int, ...]) -> Optional[dict]:
    sizes = dict(kernel.sizes)
    for v in subset:
        sizes[v] -= 1
    empty = [v for v in subset if sizes[v] == 0]
    if empty:
        return {
            "clause": "FORB",
            "I": list(subset),
            "empty_list_at": empty,
            "lists": {str(u): ([] if sizes[u] == 0 else list(range(1, sizes[u] + 1))) for u in kernel.verts},
        }
    bad = kernel.first_failure(sizes)
    if bad is None:
        return None
    return {"clause": "FORB", "I": list(subset), "lists": {str(u): cs for u, cs in sorted(bad.items())}}


def _run_task(args):
    kernel, kind, arg = args
    return _fix_task(kernel, arg) if kind == "FIX" else _forb_task(kernel, arg)


def forbidding_sets(config: Configuration, k: int, family: ForbiddenFamily) -> List[Tuple[int, ...]]:
    """All F-forbidding I within V(H) - B with 1 <= |I| <= k - 2, smallest first."""
    out = []
    core = config.core
    for r in range(1, min(k - 2, len(core)) + 1):
        for subset in combinations(core, r):
            if family.is_empty or is_forbidding(config.pattern, subset, family):
                out.append(subset)
    return out


def check_fix(config: Configuration, k: int, shortcuts: bool = True) -> Tuple[List[int], List[dict]]:
    """Vertices passing (FIX), plus one failing assignment per other core vertex.

    Forcing ``v`` to one colour is checked by enumerating the assignments
    with ``|L(v)| = 1`` directly, i.e. the (f ↓ v) sizes.
    """
    kernel = _Kernel(config, k, reduce_degrees=shortcuts)
    fix, witnesses = [], []
    for v in kernel.verts:
        w = _fix_task(kernel, v)
        if w is None:
            fix.append(v)
        else:
            witnesses.append(w)
    return fix, witnesses


def check_forb(
    config: Configuration, k: int, family: ForbiddenFamily, shortcuts: bool = True
) -> Tuple[bool, List[dict]]:
    """(FORB) over every forbidding set, plus unconditional colourability at full sizes."""
    report = check_reducible(config, k, family, shortcuts=shortcuts)
    return report.forb_ok, [w for w in report.witnesses if w["clause"] in ("FORB", "BASE")]


def check_reducible(
    config: Configuration,
    k: int,
    family: ForbiddenFamily,
    mode: str = "strong",
    jobs: int = 1,
    shortcuts: bool = True,
) -> ReducibilityReport:
    """Decide strong and weak (F,k)-boundary-reducibility of ``config``.

    With ``shortcuts`` (the default) two implications save enumeration:
    a vertex ``x`` with ``f(x) >= 2`` passing (FIX) settles (FORB) for ``I = {x}`` and any
    passing (FIX) settles colourability at full sizes, because in both cases
    every assignment in question is also an (f ↓ x)-assignment.  Vertices
    that can be coloured last are dropped as described in :class:`_Kernel`.
    ``shortcuts=False`` enumerates every case in full; verdicts are identical.
    """
    if mode not in ("strong", "weak"):
        raise ValueError(f"mode must be 'strong' or 'weak', not {mode!r}")
    return _check_cached(config, k, family, mode, jobs, shortcuts)


@lru_cache(maxsize=4096)
def _check_cached(config, k, family, mode, jobs, shortcuts):
    kernel = _Kernel(config, k, reduce_degrees=shortcuts)
    subsets = forbidding_sets(config, k, family)

    def run(tasks):
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(_run_task, tasks))
        return [_run_task(t) for t in tasks]

    fix_tasks = [(kernel, "FIX", v) for v in kernel.verts]
    fix_results = run(fix_tasks)
    fix_set = [t[2] for t, r in zip(fix_tasks, fix_results) if r is None]
    witnesses = [r for r in fix_results if r is not None]

    # only sound when removing one colour still leaves a list
    implied = {v for v in fix_set if kernel.sizes[v] >= 2} if shortcuts else set()
    forb_tasks = [(kernel, "FORB", s) for s in subsets if not (len(s) == 1 and s[0] in implied)]
    witnesses += [r for r in run(forb_tasks) if r is not None]

    if shortcuts and fix_set:
        base = None
    else:
        base = kernel.first_failure(kernel.sizes)
    if base is not None:
        witnesses.insert(0, {"clause": "BASE", "I": [], "lists": {str(u): cs for u, cs in sorted(base.items())}})
    forb_ok = base is None and not any(w["clause"] == "FORB" for w in witnesses)
    strong = forb_ok and fix_set == kernel.verts
    weak = forb_ok and bool(fix_set)
    declared = sorted(config.declared_fix) if config.declared_fix is not None else None
    return ReducibilityReport(
        name=config.name,
        k=k,
        family=family.name,
        mode=mode,
        sizes=dict(kernel.sizes),
        fix_set=fix_set,
        forb_ok=forb_ok,
        base_colorable=base is None,
        strong=strong,
        weak=weak,
        forbidding_sets=[list(s) for s in subsets],
        witnesses=witnesses,
        declared_fix=declared,
        declared_fix_ok=None if declared is None else (bool(declared) and set(declared) <= set(fix_set)),
    )


# -- flexconfig v1 ---------------------------------------------------------------

FLEXCONFIG_HEADER = "flexconfig v1"


def parse_flexconfig(text: str) -> Configuration:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXCONFIG_HEADER:
        raise ParseError(f"expected header {FLEXCONFIG_HEADER!r}")
    name = ""
    core: Dict[int, int] = {}
    boundary = set()
    edges = []
    fix = None
    try:
        for ln in lines[1:]:
            tok = ln.split()
            if tok[0] == "name":
                name = tok[1]
            elif tok[0] == "core":
                v = int(tok[1])
                if len(tok) != 3 or not tok[2].startswith("deg="):
                    raise ParseError(f"core line needs deg=<n>: {ln!r}")
                core[v] = int(tok[2][4:])
            elif tok[0] == "boundary":
                boundary.update(int(t) for t in tok[1:])
            elif tok[0] == "edge":
                edges.append((int(tok[1]), int(tok[2])))
            elif tok[0] == "fix":
                fix = frozenset(int(t) for t in tok[1:])
            else:
                raise ParseError(f"unknown line {ln!r}")
        if set(core) & boundary:
            raise ParseError("a vertex cannot be both core and boundary")
        pattern = Graph(sorted(set(core) | boundary), edges)
        return Configuration(pattern, frozenset(boundary), core, fix, name)
    except (ValueError, IndexError) as exc:
        raise ParseError(str(exc)) from exc


def format_flexconfig(config: Configuration) -> str:
    out = [FLEXCONFIG_HEADER]
    if config.name:
        out.append(f"name {config.name}")
    for v in config.core:
        out.append(f"core {v} deg={config.host_degree[v]}")
    for v in sorted(config.boundary):
        out.append(f"boundary {v}")
    for u, v in config.pattern.edges:
        out.append(f"edge {u} {v}")
    if config.declared_fix is not None:
        out.append("fix " + " ".join(str(v) for v in sorted(config.declared_fix)))
    return "\n".join(out) + "\n"


def report_json(report: ReducibilityReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)
