"""Builtin template libraries and the flexlib text format."""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus import (
    RC3_VARIANTS,
    four_cycle,
    near_triangle_star,
    path_of,
    single_vertex,
    triangle_two,
    two_triangles_at_vertex,
    two_triangles_on_edge,
)
from .errors import ParseError
from .family import ForbiddenFamily, builtin_family
from .graph import Graph
from .reducibility import Configuration
from .resolution import Library, Template


def template_from(
    cfg: Configuration,
    name: str,
    bounds: Optional[Dict[int, Tuple[int, int]]] = None,
    symmetric: Sequence[Sequence[int]] = (),
    weak: bool = False,
    fix=None,
) -> Template:
    """Exact host degrees unless ``bounds`` overrides some vertices."""
    degree = {v: (d, d) for v, d in cfg.host_degree.items()}
    degree.update(bounds or {})
    return Template(
        name, cfg.pattern, cfg.boundary, degree, fix=fix, weak=weak, symmetric=tuple(tuple(g) for g in symmetric)
    )


def low_degree_template(k: int, name: str = "RC1") -> Template:
    return template_from(single_vertex(k - 2), name, {0: (0, k - 2)})


def degenerate_library(k: int) -> Library:
    """Only the (k-2)^- vertex; enough for graphs of degeneracy at most k-2."""
    return Library(f"degenerate{k}", k, builtin_family("empty"), "strong", (low_degree_template(k),))


def thm2_library() -> Library:
    return Library(
        "thm2",
        5,
        builtin_family("k4minus"),
        "strong",
        (low_degree_template(5), template_from(triangle_two(4), "RC2", symmetric=[(0, 1)])),
    )


def thm3_library(d_max: int = 8) -> Library:
    templates = [
        low_degree_template(4),
        template_from(triangle_two(3), "L7", symmetric=[(0, 1)]),
        template_from(path_of(3, 3), "RC2", symmetric=[(0, 2)]),
    ]
    for d in range(3, d_max + 1):
        for var in RC3_VARIANTS:
            if var == "b2" and d < 4:
                continue
            A = list(range(1, d - 1))
            free = {"a": A, "a3": A[1:], "b0": A, "b1": A[1:], "b2": A[2:]}[var]
            groups = [free] if len(free) > 1 else []
            if var == "b2":
                groups.append([1, 2])
            templates.append(template_from(near_triangle_star(d, var), f"RC3{var}_d{d}", symmetric=groups))
    return Library("thm3", 4, builtin_family("thm3"), "strong", tuple(templates))


def thm4_library() -> Library:
    return Library(
        "thm4",
        4,
        builtin_family("thm4"),
        "strong",
        (
            low_degree_template(4),
            template_from(triangle_two(3), "RC2", symmetric=[(0, 1)]),
            template_from(two_triangles_at_vertex(), "RC3"),
            template_from(two_triangles_on_edge(), "RC4"),
        ),
    )


def thm5_library() -> Library:
    return Library(
        "thm5",
        5,
        builtin_family("thm5"),
        "weak",
        (
            low_degree_template(5),
            template_from(four_cycle({1: 4, 2: 4}, [3, 4], "RC2"), "RC2"),
            template_from(four_cycle({1: 4, 2: 5, 3: 4}, [4], "RC3"), "RC3", symmetric=[(1, 3)]),
            template_from(four_cycle({1: 4, 2: 5, 3: 5, 4: 5}, [], "RC4"), "RC4", symmetric=[(2, 4)], weak=True,
                          fix=(2, 3, 4)),
            template_from(path_of(4, 4), "RC5"),
        ),
    )


BUILTIN_LIBRARIES = ("thm2", "thm3", "thm4", "thm5")


def builtin_library(name: str, d_max: int = 8) -> Library:
    if name == "thm2":
        return thm2_library()
    if name == "thm3":
        return thm3_library(d_max)
    if name == "thm4":
        return thm4_library()
    if name == "thm5":
        return thm5_library()
    m = re.fullmatch(r"degenerate(\d+)", name)
    if m:
        return degenerate_library(int(m.group(1)))
    raise KeyError(f"unknown library {name!r}")


# -- flexlib v1 --------------------------------------------------------------------

FLEXLIB_HEADER = "flexlib v1"
_DEG = re.compile(r"deg(=|<=|>=)(\d+)(?:\.\.(\d+))?$")


def _parse_bound(tok: str) -> Tuple[int, int]:
    m = _DEG.match(tok)
    if not m:
        raise ParseError(f"bad degree constraint {tok!r}")
    op, a, b = m.group(1), int(m.group(2)), m.group(3)
    if op == "=":
        return (a, int(b) if b else a)
    if op == "<=":
        return (0, a)
    raise ParseError("open-ended degree bounds (deg>=) are not allowed on core vertices")


def parse_flexlib(text: str, family: Optional[ForbiddenFamily] = None) -> Library:
    """Parse a template library.

    Inside a ``template NAME`` block: ``core v deg=n`` (or ``deg<=n``,
    ``deg=a..b``), ``boundary ids``, ``edge u v``, ``symmetric ids``,
    ``fix ids`` (marks the template weak), ``face ids`` and
    ``onface v len``; the block closes with ``end``.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXLIB_HEADER:
        raise ParseError(f"expected header {FLEXLIB_HEADER!r}")
    head = {"name": "custom", "kind": "strong"}
    templates: List[Template] = []
    cur = None
    try:
        for ln in lines[1:]:
            tok = ln.split()
            if cur is None:
                if tok[0] in ("name", "k", "family", "kind"):
                    head[tok[0]] = tok[1]
                elif tok[0] == "template":
                    cur = {"name": tok[1], "deg": {}, "boundary": set(), "edges": [], "sym": [], "fix": None,
                           "faces": [], "onface": {}}
                else:
                    raise ParseError(f"unknown line {ln!r}")
                continue
            key = tok[0]
            if key == "core":
                cur["deg"][int(tok[1])] = _parse_bound(tok[2])
            elif key == "boundary":
                cur["boundary"].update(int(t) for t in tok[1:])
            elif key == "edge":
                cur["edges"].append((int(tok[1]), int(tok[2])))
            elif key == "symmetric":
                cur["sym"].append(tuple(int(t) for t in tok[1:]))
            elif key == "fix":
                cur["fix"] = frozenset(int(t) for t in tok[1:])
            elif key == "face":
                cur["faces"].append(tuple(int(t) for t in tok[1:]))
            elif key == "onface":
                cur["onface"][int(tok[1])] = int(tok[2])
            elif key == "end":
                verts = set(cur["deg"]) | cur["boundary"] | {x for e in cur["edges"] for x in e}
                templates.append(
                    Template(
                        cur["name"],
                        Graph(sorted(verts), cur["edges"]),
                        frozenset(cur["boundary"]),
                        cur["deg"],
                        fix=cur["fix"],
                        weak=cur["fix"] is not None,
                        symmetric=tuple(cur["sym"]),
                        faces=tuple(cur["faces"]),
                        on_face=cur["onface"],
                    )
                )
                cur = None
            else:
                raise ParseError(f"unknown template line {ln!r}")
        if cur is not None:
            raise ParseError(f"template {cur['name']!r} is missing 'end'")
        if family is None:
            family = builtin_family(head.get("family", "empty"))
        return Library(head["name"], int(head["k"]), family, head["kind"], tuple(templates))
    except (KeyError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed library: {exc}") from exc


def format_flexlib(library: Library) -> str:
    out = [FLEXLIB_HEADER, f"name {library.name}", f"k {library.k}", f"family {library.family.name}",
           f"kind {library.kind}"]
    for t in library.templates:
        out.append(f"template {t.name}")
        for v in t.core:
            lo, hi = t.degree[v]
            out.append(f"core {v} deg={lo}" if lo == hi else (f"core {v} deg<={hi}" if lo == 0 else f"core {v} deg={lo}..{hi}"))
        if t.boundary:
            out.append("boundary " + " ".join(map(str, sorted(t.boundary))))
        for u, v in t.pattern.edges:
            out.append(f"edge {u} {v}")
        for g in t.symmetric:
            out.append("symmetric " + " ".join(map(str, g)))
        if t.fix is not None:
            out.append("fix " + " ".join(map(str, sorted(t.fix))))
        for f in t.faces:
            out.append("face " + " ".join(map(str, f)))
        for v, ln in sorted(t.on_face.items()):
            out.append(f"onface {v} {ln}")
        out.append("end")
    return "\n".join(out) + "\n"
