"""Matching configuration templates, greedy peeling into resolutions, and certificate checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import CertificateError, FacePredicateError, FamilyViolationError, InfeasibleConfigurationError, ParseError
from .family import ForbiddenFamily, builtin_family
from .graph import Face, Graph, RotationSystem, faces, iter_subgraph_matches
from .reducibility import Configuration, check_reducible


@dataclass(frozen=True)
class Template:
    """A configuration shape with degree bounds on its core vertices.

    ``degree`` maps each core vertex to inclusive ``(lo, hi)`` bounds on its
    degree in the graph being peeled.  ``faces`` lists vertex cycles that
    must bound a face; ``on_face`` asks a vertex to lie on a face of the
    given length.  Both need an embedding.
    """

    name: str
    pattern: Graph
    boundary: FrozenSet[int]
    degree: Mapping[int, Tuple[int, int]]
    fix: Optional[FrozenSet[int]] = None
    weak: bool = False
    symmetric: Tuple[Tuple[int, ...], ...] = ()
    faces: Tuple[Tuple[int, ...], ...] = ()
    on_face: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        core = set(self.pattern.vertices) - self.boundary
        if set(self.degree) != core:
            raise ValueError(f"template {self.name}: degree bounds needed for exactly the core vertices")
        if self.fix is not None:
            object.__setattr__(self, "fix", frozenset(self.fix))

    @property
    def core(self) -> List[int]:
        return sorted(set(self.pattern.vertices) - self.boundary)

    @property
    def uses_faces(self) -> bool:
        return bool(self.faces or self.on_face)

    def extreme_configuration(self) -> Configuration:
        """The configuration at the largest allowed degrees (the hardest case)."""
        return Configuration(
            self.pattern, self.boundary, {v: hi for v, (lo, hi) in self.degree.items()}, self.fix, self.name
        )


@dataclass(frozen=True)
class Library:
    name: str
    k: int
    family: ForbiddenFamily
    kind: str
    templates: Tuple[Template, ...]

    def verify(self) -> List[str]:
        """Names of templates that fail reducibility at their extreme degrees."""
        bad = []
        for t in self.templates:
            try:
                rep = check_reducible(t.extreme_configuration(), self.k, self.family)
            except InfeasibleConfigurationError:
                bad.append(t.name)
                continue
            ok = rep.weak if t.weak else rep.strong
            if t.fix is not None and not t.fix <= set(rep.fix_set):
                ok = False
            if not ok:
                bad.append(t.name)
        return bad


# -- matching -----------------------------------------------------------------

class _FaceIndex:
    def __init__(self, face_list: Sequence[Face]):
        self.faces = list(face_list)
        self.by_vertex: Dict[int, List[Face]] = {}
        for f in self.faces:
            for v in f.vertex_set:
                self.by_vertex.setdefault(v, []).append(f)

    def has_face(self, cycle: Sequence[int], alive=None) -> bool:
        target = set(cycle)
        for f in self.by_vertex.get(cycle[0], ()):
            if f.length == len(cycle) and f.vertex_set == target:
                if alive is None or f.vertex_set <= alive:
                    return True
        return False

    def on_face(self, v: int, length: int, alive=None) -> bool:
        return any(
            f.length == length and (alive is None or f.vertex_set <= alive) for f in self.by_vertex.get(v, ())
        )


def match_configuration(
    graph: Graph,
    template: Template,
    embedding: Optional[RotationSystem] = None,
    *,
    original_faces: Optional[Sequence[Face]] = None,
) -> Iterator[Dict[int, int]]:
    """Yield matches of ``template`` in ``graph`` satisfying all degree and face constraints.

    Face predicates are evaluated on the embedding induced on ``graph`` by
    ``embedding``; when ``original_faces`` is given they are evaluated on
    those faces instead (only faces whose vertices all survive count).
    """
    face_index = None
    alive = None
    if template.uses_faces:
        if original_faces is not None:
            face_index = _FaceIndex(original_faces)
            alive = set(graph.vertices)
        elif embedding is None:
            raise FacePredicateError(f"template {template.name} uses face predicates but no embedding was given")
        else:
            face_index = _FaceIndex(faces(graph, embedding.restrict(graph.vertices)))
    bounds = template.degree

    def ok(p: int, h: int) -> bool:
        if p in bounds:
            lo, hi = bounds[p]
            d = graph.degree(h)
            if d < lo or d > hi:
                return False
        return True

    for m in iter_subgraph_matches(graph, template.pattern, candidate_ok=ok, ordered_groups=template.symmetric):
        if face_index is not None:
            if any(not face_index.has_face([m[p] for p in cyc], alive) for cyc in template.faces):
                continue
            if any(not face_index.on_face(m[p], ln, alive) for p, ln in template.on_face.items()):
                continue
        yield m


def instantiate(graph: Graph, template: Template, match: Mapping[int, int]) -> Configuration:
    """The induced configuration in ``graph`` at ``match``, in template-local labels."""
    inv = {h: p for p, h in match.items()}
    induced = graph.induced(match.values())
    pattern = Graph(sorted(match), [(inv[u], inv[v]) for u, v in induced.edges])
    return Configuration(
        pattern,
        template.boundary,
        {p: graph.degree(match[p]) for p in template.core},
        template.fix if template.weak else None,
        template.name,
    )


# -- resolutions ----------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """One peeling step: a configuration (local labels) and its placement in the host."""

    template: str
    config: Configuration
    mapping: Mapping[int, int]

    @property
    def Q(self) -> List[int]:
        return sorted(self.mapping[v] for v in self.config.core)

    @property
    def B(self) -> List[int]:
        return sorted(self.mapping[v] for v in self.config.boundary)

    @property
    def fix(self) -> List[int]:
        local = self.config.declared_fix if self.config.declared_fix is not None else self.config.core
        return sorted(self.mapping[v] for v in local)


@dataclass
class Resolution:
    k: int
    b: int
    family: ForbiddenFamily
    kind: str
    steps: List[Step]
    residue: Optional[Step] = None

    @property
    def residue_vertices(self) -> List[int]:
        return self.residue.Q if self.residue is not None else []

    @property
    def effective_b(self) -> int:
        sizes = [len(s.Q) for s in self.steps] + [len(self.residue_vertices)]
        return max(sizes + [1])

    @property
    def fixed_vertices(self) -> List[int]:
        """Fix(G): union of the fixed sets of all steps and of the residue."""
        out = set()
        for s in self.steps:
            out.update(s.fix)
        if self.residue is not None:
            out.update(self.residue.fix)
        return sorted(out)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "b": self.b,
            "effective_b": self.effective_b,
            "family": self.family.name,
            "kind": self.kind,
            "steps": [_step_dict(s) for s in self.steps],
            "residue": _step_dict(self.residue) if self.residue is not None else None,
        }


def _step_dict(s: Step) -> dict:
    return {"template": s.template, "Q": s.Q, "B": s.B, "fix": s.fix}


@dataclass
class Stuck:
    """Returned by :func:`build_resolution` when no template matches."""

    residual: Graph
    steps: List[Step]

    def to_dict(self) -> dict:
        return {
            "stuck": True,
            "residual_vertices": self.residual.vertices,
            "residual_edges": [list(e) for e in self.residual.edges],
            "steps_done": len(self.steps),
        }


def build_resolution(
    graph: Graph,
    library: Library,
    k: Optional[int] = None,
    b_cap: int = 12,
    family: Optional[ForbiddenFamily] = None,
    embedding: Optional[RotationSystem] = None,
    face_mode: str = "current",
) -> Union[Resolution, Stuck]:
    """Greedy peeling: always take the first template (library order) with a reducible match.

    Matches are tried in increasing host-vertex order, so the result is
    deterministic.  Each candidate is instantiated as the induced subgraph
    of the current graph and re-checked for reducibility before peeling.
    """
    k = library.k if k is None else k
    family = library.family if family is None else family
    if face_mode not in ("current", "original"):
        raise ValueError("face_mode must be 'current' or 'original'")
    viol = family.violation(graph)
    if viol is not None:
        raise FamilyViolationError(f"input graph contains {viol.member}", viol)
    original_faces = None
    if face_mode == "original" and embedding is not None:
        original_faces = faces(graph, embedding)
    weak_kind = library.kind == "weak"
    current = graph
    steps: List[Step] = []
    while len(current):
        step = None
        for t in library.templates:
            if len(t.core) > b_cap:
                continue
            for m in match_configuration(current, t, embedding, original_faces=original_faces):
                cfg = instantiate(current, t, m)
                if _acceptable(cfg, t, k, family, weak_kind):
                    step = Step(t.name, cfg, dict(m))
                    break
            if step is not None:
                break
        if step is None:
            return Stuck(current, steps)
        steps.append(step)
        current = current.remove_vertices(step.Q)
    return Resolution(k, b_cap, family, library.kind, steps, None)


def resolution_from_blocks(
    graph: Graph,
    steps: Sequence[Tuple[Sequence[int], Sequence[int]]],
    residue: Sequence[int] = (),
    k: int = 3,
    b: Optional[int] = None,
    family: Optional[ForbiddenFamily] = None,
    kind: str = "strong",
    fixes: Optional[Mapping[int, Sequence[int]]] = None,
) -> Resolution:
    """Assemble a resolution from explicit ``(Q, B)`` pairs in peel order.

    Host degrees are read off the shrinking graph and labels stay those of
    ``graph``.  ``fixes`` maps a step index (0-based) to its declared fixed
    set for weak steps.  Nothing is checked here; use
    :func:`validate_resolution`.
    """
    family = builtin_family("empty") if family is None else family
    fixes = fixes or {}
    current = graph
    out = []
    for i, (Q, B) in enumerate(steps):
        verts = sorted(set(Q) | set(B))
        cfg = Configuration(
            current.induced(verts), frozenset(B), {v: current.degree(v) for v in Q}, fixes.get(i), f"step{i + 1}"
        )
        out.append(Step(cfg.name, cfg, {v: v for v in verts}))
        current = current.remove_vertices(Q)
    res = None
    if residue:
        cfg = Configuration(current.induced(residue), frozenset(), {v: current.degree(v) for v in residue}, None,
                            "residue")
        res = Step("residue", cfg, {v: v for v in residue})
    if b is None:
        b = max([len(Q) for Q, _ in steps] + [len(residue), 1])
    return Resolution(k, b, family, kind, out, res)


def _acceptable(cfg: Configuration, t: Template, k: int, family: ForbiddenFamily, weak_kind: bool) -> bool:
    try:
        rep = check_reducible(cfg, k, family)
    except InfeasibleConfigurationError:
        return False
    if t.weak:
        if not weak_kind or not rep.weak:
            return False
        return cfg.declared_fix is None or cfg.declared_fix <= set(rep.fix_set)
    return rep.strong


# -- validation ------------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: List[dict] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, clause: str, step: Optional[int], detail: str) -> None:
        self.violations.append({"clause": clause, "step": step, "detail": detail})

    def clauses(self) -> List[str]:
        return sorted({v["clause"] for v in self.violations})

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


def validate_resolution(
    graph: Graph, resolution: Resolution, family: Optional[ForbiddenFamily] = None
) -> ValidationReport:
    """Re-check every clause of a (weak) resolution against ``graph``."""
    family = resolution.family if family is None else family
    rep = ValidationReport()
    k, b = resolution.k, resolution.b
    weak_kind = resolution.kind == "weak"
    if resolution.kind not in ("strong", "weak"):
        rep.add("kind", None, f"unknown kind {resolution.kind!r}")
    viol = family.violation(graph)
    if viol is not None:
        rep.add("family", None, f"graph contains {viol.member}")

    seen = set()
    current = graph
    all_steps = list(enumerate(resolution.steps, start=1))
    for i, step in all_steps:
        _check_step(rep, i, step, current, k, b, family, weak_kind, seen, is_residue=False)
        current = current.remove_vertices(v for v in step.Q if v in current)

    res = resolution.residue
    if res is None:
        if len(current):
            rep.add("partition", None, f"vertices {current.vertices} are neither peeled nor in the residue")
    else:
        if set(res.mapping.values()) != set(current.vertices):
            rep.add("residue", None, "residue does not coincide with the remaining graph")
        _check_step(rep, None, res, current, k, b, family, weak_kind, seen, is_residue=True)
    return rep


def _check_step(rep, i, step, current, k, b, family, weak_kind, seen, is_residue):
    cfg = step.config
    label = i
    images = list(step.mapping.values())
    if set(step.mapping) != set(cfg.pattern.vertices):
        rep.add("map", label, "vertex map does not cover the configuration")
        return
    if len(set(images)) != len(images):
        rep.add("map", label, "vertex map is not injective")
        return
    missing = [h for h in images if h not in current]
    if missing:
        rep.add("partition", label, f"vertices {sorted(missing)} were already peeled")
        return
    Q = step.Q
    if not Q:
        rep.add("partition", label, "empty peeled set")
    overlap = seen & set(Q)
    if overlap:
        rep.add("partition", label, f"vertices {sorted(overlap)} peeled twice")
    seen.update(Q)
    if is_residue and cfg.boundary:
        rep.add("residue", label, "residue must have an empty boundary")
    induced = current.induced(images)
    inv = {h: p for p, h in step.mapping.items()}
    local_edges = sorted(tuple(sorted((inv[u], inv[v]))) for u, v in induced.edges)
    if local_edges != sorted(cfg.pattern.edges):
        rep.add("induced", label, "configuration is not the induced subgraph on its image")
    for p, d in cfg.host_degree.items():
        actual = current.degree(step.mapping[p])
        if actual != d:
            rep.add("degree", label, f"vertex {step.mapping[p]} has degree {actual}, certificate says {d}")
    if len(Q) > b:
        rep.add("size", label, f"|Q| = {len(Q)} exceeds b = {b}")
    try:
        red = check_reducible(cfg, k, family)
    except InfeasibleConfigurationError as exc:
        rep.add("reducible", label, str(exc))
        return
    weak_step = cfg.declared_fix is not None
    if weak_step and not weak_kind:
        rep.add("kind", label, "weak step inside a strong resolution")
    if weak_step:
        if not red.weak:
            rep.add("reducible", label, "configuration is not weakly reducible")
        if not cfg.declared_fix:
            rep.add("Fix(G)", label, "fixed set of this layer is empty")
        elif not cfg.declared_fix <= set(red.fix_set):
            rep.add("Fix(G)", label, "declared fixed vertices fail (FIX)")
    elif not red.strong:
        rep.add("reducible", label, "configuration is not boundary-reducible")


# -- flexres v1 -------------------------------------------------------------------

FLEXRES_HEADER = "flexres v1"


def _fmt_ids(ids) -> str:
    return ",".join(str(v) for v in ids)


def _step_line(tag: str, s: Step) -> str:
    cfg = s.config
    parts = [
        tag,
        s.template or "-",
        "map=" + ",".join(f"{p}:{s.mapping[p]}" for p in sorted(s.mapping)),
        "edges=" + ",".join(f"{u}-{v}" for u, v in cfg.pattern.edges),
        "boundary=" + _fmt_ids(sorted(cfg.boundary)),
        "deg=" + ",".join(f"{p}:{d}" for p, d in cfg.host_degree.items()),
    ]
    if cfg.declared_fix is not None:
        parts.append("fix=" + _fmt_ids(sorted(cfg.declared_fix)))
    parts += ["Q=" + _fmt_ids(s.Q), "B=" + _fmt_ids(s.B)]
    return " ".join(parts)


def format_flexres(resolution: Resolution) -> str:
    out = [
        FLEXRES_HEADER,
        f"k {resolution.k}",
        f"b {resolution.b}",
        f"family {resolution.family.name}",
        f"kind {resolution.kind}",
    ]
    out += [_step_line("step", s) for s in resolution.steps]
    out.append(_step_line("residue", resolution.residue) if resolution.residue is not None else "residue empty")
    return "\n".join(out) + "\n"


def _ids(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t]


def _parse_step(tok: List[str]) -> Step:
    name = tok[1]
    fields = {}
    for t in tok[2:]:
        key, _, val = t.partition("=")
        fields[key] = val
    mapping = {int(a): int(b) for a, b in (p.split(":") for p in fields["map"].split(",") if p)}
    edges = [tuple(int(x) for x in e.split("-")) for e in fields.get("edges", "").split(",") if e]
    boundary = frozenset(_ids(fields.get("boundary", "")))
    deg = {int(a): int(b) for a, b in (p.split(":") for p in fields.get("deg", "").split(",") if p)}
    fix = frozenset(_ids(fields["fix"])) if "fix" in fields else None
    cfg = Configuration(Graph(sorted(mapping), edges), boundary, deg, fix, name)
    step = Step(name, cfg, mapping)
    if "Q" in fields and _ids(fields["Q"]) != step.Q:
        raise CertificateError(f"step {name}: Q does not match the vertex map")
    if "B" in fields and _ids(fields["B"]) != step.B:
        raise CertificateError(f"step {name}: B does not match the vertex map")
    return step


def parse_flexres(text: str, family: Optional[ForbiddenFamily] = None) -> Resolution:
    """Parse a certificate; the family is looked up by name unless supplied."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXRES_HEADER:
        raise ParseError(f"expected header {FLEXRES_HEADER!r}")
    head: Dict[str, str] = {}
    steps: List[Step] = []
    residue = None
    seen_residue = False
    try:
        for ln in lines[1:]:
            tok = ln.split()
            if tok[0] in ("k", "b", "family", "kind"):
                head[tok[0]] = tok[1]
            elif tok[0] == "step":
                if seen_residue:
                    raise ParseError("step after residue")
                steps.append(_parse_step(tok))
            elif tok[0] == "residue":
                seen_residue = True
                if tok[1] != "empty":
                    residue = _parse_step(tok)
            else:
                raise ParseError(f"unknown line {ln!r}")
        if not seen_residue:
            raise ParseError("certificate has no residue line")
        if family is None:
            family = builtin_family(head["family"])
        return Resolution(int(head["k"]), int(head["b"]), family, head["kind"], steps, residue)
    except (KeyError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed certificate: {exc}") from exc


def resolution_json(resolution: Resolution) -> str:
    return json.dumps(resolution.to_dict(), indent=2, sort_keys=True)
