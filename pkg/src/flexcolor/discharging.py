"""Exact discharging on embedded plane graphs: charges, ordered rules, audits."""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .errors import DisconnectedGraphError, EmbeddingIncompleteError, ParseError
from .graph import Face, Graph, RotationSystem, faces, is_plane_embedding

Element = Tuple[str, int]  # ("v", vertex id) or ("f", face index)

_OPS = {"=": operator.eq, "==": operator.eq, ">=": operator.ge, "<=": operator.le, ">": operator.gt,
        "<": operator.lt, "!=": operator.ne}


@dataclass(frozen=True)
class Affine:
    a: Fraction
    c: Fraction

    def __call__(self, x: int) -> Fraction:
        return self.a * x + self.c


@dataclass(frozen=True)
class ChargeSpec:
    name: str
    vertex_charge: Affine
    face_charge: Affine
    expected_total: Fraction


# -- embedded structure -----------------------------------------------------------------

class PlaneStructure:
    """Faces, corners and the derived relations that rule predicates read."""

    def __init__(self, graph: Graph, rotation: RotationSystem):
        rotation.validate(graph)
        self.graph = graph
        self.faces: List[Face] = faces(graph, rotation)
        # corners: one per dart, the vertex at the tail of the dart
        self.face_corners: List[List[int]] = [[u for u, _ in f.darts] for f in self.faces]
        self.vertex_corners: Dict[int, List[int]] = {v: [] for v in graph.vertices}
        for i, cs in enumerate(self.face_corners):
            for v in cs:
                self.vertex_corners[v].append(i)
        self._pendent: Dict[int, List[int]] = {}

    def face_len(self, i: int) -> int:
        return self.faces[i].length

    def pendent_faces(self, v: int) -> List[int]:
        """3-faces through a 3-neighbour of ``v`` that do not contain ``v`` (each once)."""
        if v not in self._pendent:
            out = set()
            for w in self.graph.neighbors(v):
                if self.graph.degree(w) != 3:
                    continue
                for i in self.vertex_corners[w]:
                    if self.face_len(i) == 3 and v not in self.faces[i].vertex_set:
                        out.add(i)
            self._pendent[v] = sorted(out)
        return self._pendent[v]

    def face_degree_vector(self, i: int) -> List[int]:
        return sorted(self.graph.degree(v) for v in self.face_corners[i])


# -- predicates ---------------------------------------------------------------------------

Pred = Callable[[PlaneStructure, int], bool]

_DEG = re.compile(r"^(deg|len)(==|=|>=|<=|>|<|!=)(\d+)$")
_TOUCH = re.compile(r"^touch\{deg(==|=|>=|<=|>|<|!=)(\d+)\}(==|=|>=|<=|>|<|!=)(\d+)$")
_FACEVEC = re.compile(r"^facevec\{([0-9+,]+)\}(==|=|>=|<=|>|<|!=)(\d+)$")
_SHORT = re.compile(r"^face(\d+)(\+?)$")


def _vec_matches(degrees: Sequence[int], pattern: Sequence[Tuple[int, bool]]) -> bool:
    if len(degrees) != len(pattern):
        return False
    for perm in set(permutations(pattern)):
        if all((d >= n) if plus else (d == n) for d, (n, plus) in zip(degrees, perm)):
            return True
    return False


def parse_condition(token: str, side: str) -> Pred:
    """Compile one predicate token for a vertex or face element."""
    m = _DEG.match(token)
    if m:
        what, op, n = m.group(1), _OPS[m.group(2)], int(m.group(3))
        if what == "deg" and side == "vertex":
            return lambda ps, v: op(ps.graph.degree(v), n)
        if what == "len" and side == "face":
            return lambda ps, f: op(ps.face_len(f), n)
        raise ParseError(f"{token!r} does not apply to a {side}")
    m = _SHORT.match(token)
    if m and side == "face":
        n, plus = int(m.group(1)), bool(m.group(2))
        return (lambda ps, f: ps.face_len(f) >= n) if plus else (lambda ps, f: ps.face_len(f) == n)
    m = _TOUCH.match(token)
    if m and side == "face":
        inner, d, outer, cnt = _OPS[m.group(1)], int(m.group(2)), _OPS[m.group(3)], int(m.group(4))
        return lambda ps, f: outer(sum(1 for v in ps.face_corners[f] if inner(ps.graph.degree(v), d)), cnt)
    m = _FACEVEC.match(token)
    if m and side == "vertex":
        pattern = []
        for part in m.group(1).split(","):
            plus = part.endswith("+")
            pattern.append((int(part.rstrip("+")), plus))
        op, cnt = _OPS[m.group(2)], int(m.group(3))

        def pred(ps, v, pattern=tuple(pattern)):
            hits = {i for i in ps.vertex_corners[v] if _vec_matches(ps.face_degree_vector(i), pattern)}
            return op(len(hits), cnt)

        return pred
    raise ParseError(f"unknown condition {token!r} for a {side}")


# -- rules ---------------------------------------------------------------------------------

REMAINDER = "uniform-remainder"


@dataclass(frozen=True)
class DischargingRule:
    """Sender class, receiver class (incident or pendent) and an amount per receiver.

    A fixed amount goes to every receiver corner (a face meeting a vertex
    twice gets it twice); pendent receivers count once per face.  The
    remainder directive splits the sender's charge, as it stood before the
    rule, evenly over the same receiver list.
    """

    name: str
    sender: str
    sender_conds: Tuple[str, ...]
    receiver: str
    receiver_conds: Tuple[str, ...]
    amount: Union[Fraction, str]
    relation: str = "incident"

    def __post_init__(self):
        if {self.sender, self.receiver} != {"vertex", "face"}:
            raise ParseError("a rule moves charge between a vertex and a face")
        if self.relation not in ("incident", "pendent"):
            raise ParseError(f"unknown relation {self.relation!r}")
        if self.relation == "pendent" and self.sender != "vertex":
            raise ParseError("pendent receivers only make sense for vertex senders")
        if not isinstance(self.amount, Fraction) and self.amount != REMAINDER:
            raise ParseError(f"bad amount {self.amount!r}")
        for t in self.sender_conds:
            parse_condition(t, self.sender)
        for t in self.receiver_conds:
            parse_condition(t, self.receiver)

    def text(self) -> str:
        amt = self.amount if isinstance(self.amount, str) else _q(self.amount)
        rel = " pendent" if self.relation == "pendent" else ""
        return " ".join(["rule", self.name, self.sender, *self.sender_conds, "->", self.receiver,
                         *self.receiver_conds]) + f"{rel} : {amt}"


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- charge states ------------------------------------------------------------------------------

@dataclass
class ChargeState:
    charges: Dict[Element, Fraction]
    phase: str = "initial"

    def total(self) -> Fraction:
        return sum(self.charges.values(), Fraction(0))

    def copy(self, phase: str) -> "ChargeState":
        return ChargeState(dict(self.charges), phase)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "total": _q(self.total()),
            "vertices": {str(i): _q(c) for (kind, i), c in sorted(self.charges.items()) if kind == "v"},
            "faces": {str(i): _q(c) for (kind, i), c in sorted(self.charges.items()) if kind == "f"},
        }


def initial_charges(graph: Graph, embedding: RotationSystem, spec: ChargeSpec,
                    structure: Optional[PlaneStructure] = None) -> ChargeState:
    if not graph.is_connected():
        raise DisconnectedGraphError("charge identities need a connected plane graph")
    if not is_plane_embedding(graph, embedding):
        raise EmbeddingIncompleteError("rotation system is not a plane embedding")
    ps = structure or PlaneStructure(graph, embedding)
    charges: Dict[Element, Fraction] = {}
    for v in graph.vertices:
        charges[("v", v)] = spec.vertex_charge(graph.degree(v))
    for i, f in enumerate(ps.faces):
        charges[("f", i)] = spec.face_charge(f.length)
    return ChargeState(charges, "initial")


@dataclass
class DischargeRun:
    spec: ChargeSpec
    rules: List[DischargingRule]
    phases: List[ChargeState]
    inapplicable: List[dict] = field(default_factory=list)
    transfers: List[int] = field(default_factory=list)

    @property
    def initial(self) -> ChargeState:
        return self.phases[0]

    @property
    def final(self) -> ChargeState:
        return self.phases[-1]

    def conserved(self) -> bool:
        t = self.initial.total()
        return all(p.total() == t for p in self.phases)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.name,
            "expected_total": _q(self.spec.expected_total),
            "euler_ok": self.initial.total() == self.spec.expected_total,
            "conserved": self.conserved(),
            "phases": [p.to_dict() for p in self.phases],
            "transfers": {r.name: n for r, n in zip(self.rules, self.transfers)},
            "inapplicable": self.inapplicable,
            "audit": [f"{k}{i}" for k, i in audit(self.final)],
        }


def _receivers(ps: PlaneStructure, rule: DischargingRule, sender: int, rpreds) -> List[Element]:
    if rule.sender == "vertex":
        pool = ps.pendent_faces(sender) if rule.relation == "pendent" else ps.vertex_corners[sender]
        return [("f", i) for i in pool if all(p(ps, i) for p in rpreds)]
    return [("v", v) for v in ps.face_corners[sender] if all(p(ps, v) for p in rpreds)]


def apply_rules(
    state: ChargeState,
    rules: Sequence[DischargingRule],
    graph: Graph,
    embedding: RotationSystem,
    structure: Optional[PlaneStructure] = None,
    spec: Optional[ChargeSpec] = None,
) -> DischargeRun:
    """Apply ``rules`` in order; each rule reads the state as it was before the rule."""
    ps = structure or PlaneStructure(graph, embedding)
    phases = [state]
    inapplicable = []
    counts = []
    current = state
    for j, rule in enumerate(rules, start=1):
        spreds = [parse_condition(t, rule.sender) for t in rule.sender_conds]
        rpreds = [parse_condition(t, rule.receiver) for t in rule.receiver_conds]
        snapshot = current.charges
        nxt = current.copy(f"after {rule.name}")
        senders = graph.vertices if rule.sender == "vertex" else range(len(ps.faces))
        tag = "v" if rule.sender == "vertex" else "f"
        n = 0
        for s in senders:
            if not all(p(ps, s) for p in spreds):
                continue
            recv = _receivers(ps, rule, s, rpreds)
            if rule.amount == REMAINDER:
                if not recv:
                    inapplicable.append({"rule": rule.name, "sender": f"{tag}{s}"})
                    continue
                share = snapshot[(tag, s)] / len(recv)
            else:
                share = rule.amount
            for r in recv:
                nxt.charges[(tag, s)] -= share
                nxt.charges[r] += share
                n += 1
        counts.append(n)
        phases.append(nxt)
        current = nxt
    final = current.copy("final")
    phases.append(final)
    return DischargeRun(spec or ChargeSpec("custom", Affine(Fraction(0), Fraction(0)), Affine(Fraction(0), Fraction(0)),
                                           state.total()), list(rules), phases, inapplicable, counts)


def audit(final: ChargeState) -> List[Element]:
    """Elements left with negative charge, vertices first, then faces."""
    return sorted((e for e, c in final.charges.items() if c < 0), key=lambda e: (e[0] != "v", e[1]))


def run_discharging(graph: Graph, embedding: RotationSystem, spec: ChargeSpec,
                    rules: Sequence[DischargingRule]) -> DischargeRun:
    ps = PlaneStructure(graph, embedding)
    init = initial_charges(graph, embedding, spec, ps)
    return apply_rules(init, rules, graph, embedding, ps, spec)


# -- flexcharge v1 ---------------------------------------------------------------------------

FLEXCHARGE_HEADER = "flexcharge v1"


def _frac(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {tok!r}") from exc


def parse_rule(line: str) -> DischargingRule:
    """``rule NAME SENDER conds -> RECEIVER conds [pendent] : AMOUNT``."""
    head, sep, amount = line.rpartition(":")
    if not sep:
        raise ParseError(f"rule without amount: {line!r}")
    left, arrow, right = head.partition("->")
    if not arrow:
        raise ParseError(f"rule without '->': {line!r}")
    ltok, rtok = left.split(), right.split()
    if len(ltok) < 3 or ltok[0] != "rule" or not rtok:
        raise ParseError(f"bad rule line: {line!r}")
    relation = "incident"
    rconds = rtok[1:]
    if "pendent" in rconds:
        relation = "pendent"
        rconds = [t for t in rconds if t != "pendent"]
    amount = amount.strip()
    amt: Union[Fraction, str] = REMAINDER if amount in (REMAINDER, "all") else _frac(amount)
    return DischargingRule(ltok[1], ltok[2], tuple(ltok[3:]), rtok[0], tuple(rconds), amt, relation)


def parse_flexcharge(text: str) -> Tuple[ChargeSpec, List[DischargingRule]]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != FLEXCHARGE_HEADER:
        raise ParseError(f"expected header {FLEXCHARGE_HEADER!r}")
    name, vc, fc, total = "custom", None, None, None
    rules = []
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "name":
            name = tok[1]
        elif tok[0] == "vertex" and len(tok) == 3:
            vc = Affine(_frac(tok[1]), _frac(tok[2]))
        elif tok[0] == "face" and len(tok) == 3:
            fc = Affine(_frac(tok[1]), _frac(tok[2]))
        elif tok[0] == "total" and len(tok) == 2:
            total = _frac(tok[1])
        elif tok[0] == "rule":
            rules.append(parse_rule(ln))
        else:
            raise ParseError(f"unknown line {ln!r}")
    if vc is None or fc is None or total is None:
        raise ParseError("spec needs 'vertex', 'face' and 'total' lines")
    return ChargeSpec(name, vc, fc, total), rules


def format_flexcharge(spec: ChargeSpec, rules: Sequence[DischargingRule]) -> str:
    out = [
        FLEXCHARGE_HEADER,
        f"name {spec.name}",
        f"vertex {spec.vertex_charge.a} {spec.vertex_charge.c}",
        f"face {spec.face_charge.a} {spec.face_charge.c}",
        f"total {spec.expected_total}",
    ]
    out += [r.text() for r in rules]
    return "\n".join(out) + "\n"


_BUILTIN_TEXT = {
    "thm2": """flexcharge v1
name thm2
vertex 1 -4
face 1 -4
total -8
rule D1 vertex deg>=5 -> face len=3 : 1/2
""",
    "thm3": """flexcharge v1
name thm3
vertex 1 -2
face 0 -2
total -4
rule D1 vertex deg=3 -> face : 1/3
rule D2a vertex deg>=4 -> face len=3 : 2/3
rule D2b vertex deg>=4 -> face len=3 pendent : 1/3
rule D2c vertex deg>=4 -> face len>=4 : uniform-remainder
""",
    "thm4": """flexcharge v1
name thm4
vertex 0 -2
face 1 -2
total -4
rule D1 face len>=6 -> vertex : uniform-remainder
rule D2A1 face len=3 touch{deg=3}>=1 -> vertex deg=3 : 4/7
rule D2A2 face len=3 touch{deg=3}>=1 -> vertex deg=4 : uniform-remainder
rule D2B1 face len=3 touch{deg=3}=0 -> vertex deg=4 facevec{3,4,4}>=1 : 3/7
rule D2B2 face len=3 touch{deg=3}=0 -> vertex deg=4 facevec{3,4,5+}>=1 : 1/7
rule D2B3 face len=3 touch{deg=3}=0 -> vertex deg=4 facevec{4+,4+,4+}>=2 : 2/7
""",
    "thm5": """flexcharge v1
name thm5
vertex 1 -2
face 0 -2
total -4
rule D1 vertex deg>=6 -> face : 2/3
rule D2a vertex deg=5 -> face len=3 : 2/3
rule D2b vertex deg=5 -> face len>=4 : 1/2
rule D3a vertex deg=4 -> face len=3 : 2/3
rule D3b vertex deg=4 -> face len>=4 : 1/3
""",
    "obs9": """flexcharge v1
name obs9
vertex 1 -4
face 1 -4
total -8
rule R1 face len>=5 -> vertex : 1/5
rule R2 vertex -> face len=3 : uniform-remainder
""",
}

BUILTIN_SPECS = tuple(_BUILTIN_TEXT)


def builtin_spec(name: str) -> Tuple[ChargeSpec, List[DischargingRule]]:
    if name not in _BUILTIN_TEXT:
        raise KeyError(f"unknown charge spec {name!r}; known: {list(_BUILTIN_TEXT)}")
    return parse_flexcharge(_BUILTIN_TEXT[name])


def builtin_spec_text(name: str) -> str:
    builtin_spec(name)
    return _BUILTIN_TEXT[name]
