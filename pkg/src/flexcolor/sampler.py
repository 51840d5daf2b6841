"""The layered random colouring driven by a resolution, its exact law, and bound checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .coloring import Request, enumerate_colorings, epsilon_bound, is_proper_coloring, score
from .errors import BudgetExceededError, CertificateError
from .family import ForbiddenFamily, is_forbidding
from .graph import Graph
from .resolution import Resolution

Coloring = Dict[int, int]
ColoringKey = Tuple[Tuple[int, int], ...]

DEFAULT_BUDGET = 10 ** 7


def _blocks(resolution: Resolution) -> List[List[int]]:
    """Vertex blocks in colouring order: residue first, then steps M..1."""
    out = []
    if resolution.residue is not None:
        out.append(resolution.residue.Q)
    out.extend(s.Q for s in reversed(resolution.steps))
    return out


class _Extender:
    """Enumerates L'-colourings of one block given the colours already placed."""

    def __init__(self, graph: Graph, lists: Mapping[int, FrozenSet[int]], block: Sequence[int]):
        self.block = list(block)
        self.sub = graph.induced(block)
        inside = set(block)
        self.outer = {y: sorted(w for w in graph.neighbors(y) if w not in inside) for y in block}
        self.lists = lists
        self._memo: Dict[tuple, List[Tuple[int, ...]]] = {}

    def reduced_lists(self, psi: Mapping[int, int]) -> Dict[int, FrozenSet[int]]:
        out = {}
        for y in self.block:
            used = {psi[w] for w in self.outer[y] if w in psi}
            out[y] = self.lists[y] - used
        return out

    def extensions(self, psi: Mapping[int, int]) -> List[Tuple[int, ...]]:
        lp = self.reduced_lists(psi)
        key = tuple(tuple(sorted(lp[y])) for y in self.block)
        ext = self._memo.get(key)
        if ext is None:
            ext = [tuple(c[y] for y in self.block) for c in enumerate_colorings(self.sub, lp)]
            self._memo[key] = ext
        return ext


class LayeredSampler:
    """Reusable sampler for one (graph, lists, resolution) triple."""

    def __init__(self, graph: Graph, lists: Mapping[int, FrozenSet[int]], resolution: Resolution):
        blocks = _blocks(resolution)
        covered = sorted(v for b in blocks for v in b)
        if covered != graph.vertices:
            raise CertificateError("resolution blocks do not partition the graph")
        self.graph = graph
        self.lists = lists
        self.extenders = [_Extender(graph, lists, b) for b in blocks]

    def sample(self, seed: int, trial: int = 0) -> Coloring:
        rng = np.random.Generator(np.random.Philox(key=[seed & (2 ** 64 - 1), trial]))
        psi: Coloring = {}
        for ext in self.extenders:
            options = ext.extensions(psi)
            if not options:
                raise CertificateError(f"no valid extension to block {ext.block}; the resolution is not valid")
            choice = options[int(rng.integers(len(options)))]
            psi.update(zip(ext.block, choice))
        return psi


def sample_coloring(
    graph: Graph, lists: Mapping[int, FrozenSet[int]], resolution: Resolution, seed: int, trial: int = 0
) -> Coloring:
    """One draw.  Trial ``t`` under ``seed`` always returns the same colouring."""
    return LayeredSampler(graph, lists, resolution).sample(seed, trial)


# -- exact law ------------------------------------------------------------------------

@dataclass
class ColoringDistribution:
    vertices: List[int]
    support: Dict[ColoringKey, Fraction]

    def total(self) -> Fraction:
        return sum(self.support.values(), Fraction(0))

    def marginals(self) -> Dict[int, Dict[int, Fraction]]:
        out: Dict[int, Dict[int, Fraction]] = {v: {} for v in self.vertices}
        for key, pr in self.support.items():
            for v, c in key:
                out[v][c] = out[v].get(c, Fraction(0)) + pr
        return out

    def avoidance(self, subset: Iterable[int], color: int) -> Fraction:
        """Prob[no vertex of ``subset`` gets ``color``]."""
        subset = set(subset)
        return sum(
            (pr for key, pr in self.support.items() if all(c != color for v, c in key if v in subset)), Fraction(0)
        )

    def expected_score(self, request: Request) -> Fraction:
        return sum((pr * score(dict(key), request) for key, pr in self.support.items()), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "support": [
                {"coloring": {str(v): c for v, c in key}, "probability": _q(pr)} for key, pr in sorted(self.support.items())
            ],
            "marginals": marginals_dict(self.marginals()),
        }


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def marginals_dict(table: Mapping[int, Mapping[int, object]]) -> dict:
    return {
        str(v): {str(c): (_q(p) if isinstance(p, Fraction) else p) for c, p in sorted(row.items())}
        for v, row in sorted(table.items())
    }


def exact_distribution(
    graph: Graph, lists: Mapping[int, FrozenSet[int]], resolution: Resolution, budget: int = DEFAULT_BUDGET
) -> ColoringDistribution:
    """Exact law of :func:`sample_coloring`, by recursion over the blocks."""
    sampler = LayeredSampler(graph, lists, resolution)
    bound = 1
    for ext in sampler.extenders:
        # counts multiply over components; stop as soon as the product is over budget
        for comp in ext.sub.components():
            cap = budget // bound
            n = 0
            for _ in enumerate_colorings(ext.sub.induced(comp), {y: lists[y] for y in comp}):
                n += 1
                if n > cap:
                    raise BudgetExceededError(f"extension tree may exceed {budget} leaves")
            bound *= max(1, n)
    support: Dict[ColoringKey, Fraction] = {}
    extenders = sampler.extenders

    def rec(level: int, psi: Coloring, pr: Fraction) -> None:
        if level == len(extenders):
            key = tuple(sorted(psi.items()))
            support[key] = support.get(key, Fraction(0)) + pr
            return
        ext = extenders[level]
        options = ext.extensions(psi)
        if not options:
            raise CertificateError(f"no valid extension to block {ext.block}; the resolution is not valid")
        share = pr / len(options)
        for choice in options:
            nxt = dict(psi)
            nxt.update(zip(ext.block, choice))
            rec(level + 1, nxt, share)

    rec(0, {}, Fraction(1))
    return ColoringDistribution(graph.vertices, support)


# -- bounds --------------------------------------------------------------------------

@dataclass
class BoundReport:
    k: int
    b: int
    p: Fraction
    epsilon: Fraction
    total_ok: bool
    min_fix_marginal: Optional[Fraction]
    min_avoidance_ratio: Optional[Fraction]
    checked_sets: int
    violations: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total_ok and not self.violations

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "b": self.b,
            "p": _q(self.p),
            "epsilon": _q(self.epsilon),
            "total_is_one": self.total_ok,
            "min_fix_marginal": _q(self.min_fix_marginal) if self.min_fix_marginal is not None else None,
            "min_avoidance_over_bound": _q(self.min_avoidance_ratio) if self.min_avoidance_ratio is not None else None,
            "forbidding_sets_checked": self.checked_sets,
            "ok": self.ok,
            "violations": self.violations,
        }


def graph_forbidding_sets(graph: Graph, family: ForbiddenFamily, max_size: int) -> List[Tuple[int, ...]]:
    out = []
    for r in range(1, max_size + 1):
        for subset in combinations(graph.vertices, r):
            if is_forbidding(graph, subset, family):
                out.append(subset)
    return out


def verify_bounds(
    dist: ColoringDistribution,
    graph: Graph,
    lists: Mapping[int, FrozenSet[int]],
    family: ForbiddenFamily,
    k: int,
    b: int,
    fix: Optional[Iterable[int]] = None,
) -> BoundReport:
    """Check the marginal bound on ``fix`` (default: all vertices) and the avoidance bound.

    A violation here means a bug in the sampler or in the resolution checks,
    not a counterexample to the underlying lemma.
    """
    p, eps, _ = epsilon_bound(k, b)
    fix = graph.vertices if fix is None else sorted(fix)
    marg = dist.marginals()
    violations = []
    min_m = None
    for v in fix:
        for c in sorted(lists[v]):
            m = marg[v].get(c, Fraction(0))
            min_m = m if min_m is None else min(min_m, m)
            if m < eps:
                violations.append({"claim": "marginal", "vertex": v, "color": c, "value": _q(m), "bound": _q(eps),
                                   "note": "implementation bug"})
    colors = sorted(set().union(*lists.values())) if lists else []
    sets = graph_forbidding_sets(graph, family, k - 2)
    min_r = None
    for subset in sets:
        need = p ** len(subset)
        for c in colors:
            a = dist.avoidance(subset, c)
            r = a / need
            min_r = r if min_r is None else min(min_r, r)
            if a < need:
                violations.append({"claim": "avoidance", "set": list(subset), "color": c, "value": _q(a),
                                   "bound": _q(need), "note": "implementation bug"})
    return BoundReport(k, b, p, eps, dist.total() == 1, min_m, min_r, len(sets), violations)


# -- Monte Carlo -----------------------------------------------------------------------

def estimate_marginals(
    graph: Graph, lists: Mapping[int, FrozenSet[int]], resolution: Resolution, n_samples: int, seed: int
) -> Dict[int, Dict[int, float]]:
    """Empirical Prob[phi(v)=c] over trials 0..n_samples-1; every sample is checked for properness."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    sampler = LayeredSampler(graph, lists, resolution)
    counts = {v: {c: 0 for c in sorted(lists[v])} for v in graph.vertices}
    for t in range(n_samples):
        phi = sampler.sample(seed, t)
        if not is_proper_coloring(graph, lists, phi):
            raise AssertionError(f"trial {t} produced an improper colouring {phi}")
        for v, c in phi.items():
            counts[v][c] += 1
    return {v: {c: n / n_samples for c, n in row.items()} for v, row in counts.items()}


def satisfaction(coloring: Mapping[int, int], request: Request) -> Fraction:
    """Matched fraction of a request (by count or weight)."""
    return score(coloring, request)
