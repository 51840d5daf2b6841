"""Command-line front end.

Exit codes: 0 success, 1 ``--expect`` mismatch or builder stuck, 2 parse or
input error, 3 infeasible configuration, 4 family violation, 5 corrupt
certificate, 6 disconnected graph, 7 size guard or enumeration budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .coloring import check_lists, epsilon_bound, is_proper_coloring, max_satisfaction, parse_flexlists
from .corpus import configuration_corpus, graph_index, graph_text
from .discharging import builtin_spec, parse_flexcharge, run_discharging
from .errors import (
    BudgetExceededError,
    CertificateError,
    DisconnectedGraphError,
    FamilyViolationError,
    InfeasibleConfigurationError,
    NotColorableError,
    ParseError,
    SizeGuardError,
    UndefinedRatioError,
)
from .family import ForbiddenFamily, builtin_family, parse_flexfamily
from .graph import parse_flexgraph
from .library import builtin_library, parse_flexlib
from .reducibility import check_reducible, parse_flexconfig
from .resolution import Stuck, build_resolution, format_flexres, parse_flexres, validate_resolution
from .sampler import LayeredSampler, exact_distribution, marginals_dict, verify_bounds

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_FAMILY, EXIT_CERT, EXIT_DISCONNECTED, EXIT_GUARD = range(8)


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"cannot read {path}: {exc.strerror}") from exc


def _load_graph(spec: str):
    if spec.startswith("corpus:"):
        name = spec[len("corpus:"):]
        if name not in graph_index():
            raise _Exit(EXIT_PARSE, f"unknown bundled graph {name!r}")
        return parse_flexgraph(graph_text(name))
    return parse_flexgraph(_read(spec))


def _load_family(spec: Optional[str]) -> Optional[ForbiddenFamily]:
    if spec is None:
        return None
    if os.path.exists(spec):
        return parse_flexfamily(_read(spec))
    try:
        return builtin_family(spec.removeprefix("builtin:"))
    except KeyError as exc:
        raise _Exit(EXIT_PARSE, f"unknown family {spec!r} (not a file or builtin name)") from exc


def _emit(obj: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        return
    for key in sorted(obj):
        val = obj[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        sys.stdout.write(f"{key}: {val}\n")


# -- commands -------------------------------------------------------------------------------

def cmd_check_config(args) -> int:
    k, family_name = args.k, args.family
    if args.config.startswith("corpus:"):
        name = args.config[len("corpus:"):]
        entries = {c.name: c for c in configuration_corpus()}
        if name not in entries:
            raise _Exit(EXIT_PARSE, f"unknown bundled configuration {name!r}")
        entry = entries[name]
        cfg = entry.config
        k = entry.k if k is None else k
        family_name = entry.family if family_name is None else family_name
    else:
        cfg = parse_flexconfig(_read(args.config))
    if k is None:
        raise _Exit(EXIT_PARSE, "--k is required")
    family = _load_family(family_name or "empty")
    rep = check_reducible(cfg, k, family, mode=args.mode, jobs=args.jobs)
    out = {"report": rep.to_dict(), "verdict": rep.verdict}
    code = EXIT_OK
    if args.expect is not None:
        want = args.expect == "true"
        out["expect"] = want
        out["expect_ok"] = rep.verdict == want
        code = EXIT_OK if rep.verdict == want else EXIT_MISMATCH
    _emit(out, args.format)
    return code


def _load_library(spec: str, family: Optional[ForbiddenFamily], d_max: int):
    if spec.startswith("builtin:"):
        try:
            lib = builtin_library(spec[len("builtin:"):], d_max=d_max)
        except KeyError as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from exc
    else:
        lib = parse_flexlib(_read(spec))
    if family is not None:
        lib = type(lib)(lib.name, lib.k, family, lib.kind, lib.templates)
    return lib


def cmd_resolve(args) -> int:
    graph, rot = _load_graph(args.graph)
    family = _load_family(args.family)
    lib = _load_library(args.library, family, args.d_max)
    k = lib.k if args.k is None else args.k
    if lib.k != k:
        lib = type(lib)(lib.name, k, lib.family, lib.kind, lib.templates)
    bad = lib.verify()
    if bad:
        raise _Exit(EXIT_PARSE, f"library templates fail reducibility: {bad}")
    res = build_resolution(graph, lib, k=k, b_cap=args.bcap, embedding=rot, face_mode=args.face_mode)
    if isinstance(res, Stuck):
        _emit({"success": False, **res.to_dict()}, args.format)
        return EXIT_MISMATCH
    report = validate_resolution(graph, res)
    text = format_flexres(res)
    b = res.effective_b
    p, eps, weps = epsilon_bound(k, b)
    out = {
        "success": True,
        "valid": report.valid,
        "steps": len(res.steps),
        "kind": res.kind,
        "family": res.family.name,
        "k": k,
        "b_cap": args.bcap,
        "effective_b": b,
        "p": _q(p),
        "epsilon": _q(eps),
        "weak_epsilon": _q(weps),
        "fix_size": len(res.fixed_vertices),
        "templates": sorted({s.template for s in res.steps}),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out["certificate"] = args.out
    else:
        out["certificate_text"] = text
    _emit(out, args.format)
    return EXIT_OK if report.valid else EXIT_CERT


def _load_run_inputs(args):
    graph, _ = _load_graph(args.graph)
    lists, request = parse_flexlists(_read(args.lists))
    try:
        check_lists(graph, lists)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc
    family = _load_family(args.family)
    res = parse_flexres(_read(args.resolution), family)
    report = validate_resolution(graph, res)
    if not report.valid:
        raise _Exit(EXIT_CERT, "certificate does not validate: " + json.dumps(report.violations, sort_keys=True))
    return graph, lists, request, res


def cmd_sample(args) -> int:
    graph, lists, _, res = _load_run_inputs(args)
    sampler = LayeredSampler(graph, lists, res)
    samples = []
    proper = True
    for t in range(args.samples):
        phi = sampler.sample(args.seed, t)
        proper &= is_proper_coloring(graph, lists, phi)
        samples.append({str(v): c for v, c in sorted(phi.items())})
    _emit({"seed": args.seed, "samples": samples, "all_proper": proper}, args.format)
    return EXIT_OK if proper else EXIT_CERT


def cmd_marginals(args) -> int:
    graph, lists, _, res = _load_run_inputs(args)
    sampler = LayeredSampler(graph, lists, res)
    counts = {v: {c: 0 for c in sorted(lists[v])} for v in graph.vertices}
    proper = True
    for t in range(args.samples):
        phi = sampler.sample(args.seed, t)
        proper &= is_proper_coloring(graph, lists, phi)
        for v, c in phi.items():
            counts[v][c] += 1
    table = {v: {c: Fraction(n, args.samples) for c, n in row.items()} for v, row in counts.items()}
    sums_ok = all(sum(row.values()) == 1 for row in table.values())
    _emit({"seed": args.seed, "samples": args.samples, "marginals": marginals_dict(table), "all_proper": proper,
           "rows_sum_to_one": sums_ok}, args.format)
    return EXIT_OK if proper else EXIT_CERT


def cmd_exact(args) -> int:
    graph, lists, request, res = _load_run_inputs(args)
    dist = exact_distribution(graph, lists, res, budget=args.budget)
    b = res.effective_b
    bounds = verify_bounds(dist, graph, lists, res.family, res.k, b, res.fixed_vertices)
    out = {
        "effective_b": b,
        "total": _q(dist.total()),
        "support_size": len(dist.support),
        "marginals": marginals_dict(dist.marginals()),
        "fix": res.fixed_vertices,
        "bounds": bounds.to_dict(),
    }
    if request is not None:
        request.validate(graph, lists)
        out["expected_satisfaction"] = _q(dist.expected_score(request))
    _emit(out, args.format)
    return EXIT_OK if bounds.ok else EXIT_MISMATCH


def cmd_discharge(args) -> int:
    graph, rot = _load_graph(args.graph)
    if args.spec.startswith("builtin:"):
        try:
            spec, rules = builtin_spec(args.spec[len("builtin:"):])
        except KeyError as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from exc
    else:
        spec, rules = parse_flexcharge(_read(args.spec))
    run = run_discharging(graph, rot, spec, rules)
    out = run.to_dict()
    if not args.phases:
        out["phases"] = [out["phases"][0], out["phases"][-1]]
    _emit(out, args.format)
    return EXIT_OK


def cmd_oracle(args) -> int:
    graph, _ = _load_graph(args.graph)
    if len(graph) > args.max_vertices:
        raise SizeGuardError(f"{len(graph)} vertices exceeds the oracle guard of {args.max_vertices}")
    lists, request = parse_flexlists(_read(args.lists))
    if args.request:
        _, request = parse_flexlists(_read(args.request))
    if request is None:
        raise _Exit(EXIT_PARSE, "no request given (R or W lines)")
    try:
        check_lists(graph, lists)
        phi, val = max_satisfaction(graph, lists, request)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc
    _emit({"kind": request.kind, "best_coloring": {str(v): c for v, c in sorted(phi.items())},
           "score": _q(val)}, args.format)
    return EXIT_OK


def cmd_corpus(args) -> int:
    configs = [
        {"name": c.name, "k": c.k, "family": c.family, "strong": c.strong, "weak": c.weak,
         "fix_set": list(c.fix_set) if c.fix_set else None, "note": c.provenance}
        for c in configuration_corpus()
    ]
    _emit({"graphs": graph_index(), "configurations": configs}, args.format)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flexcolor", description="Flexible list colouring toolkit.")
    p.add_argument("--version", action="version", version=f"flexcolor {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("check-config", help="decide boundary-reducibility of a configuration")
    sp.add_argument("--config", required=True, help="flexconfig file or corpus:NAME")
    sp.add_argument("--k", type=int)
    sp.add_argument("--family", help="flexfamily file or builtin family name")
    sp.add_argument("--mode", choices=("strong", "weak"), default="strong")
    sp.add_argument("--expect", choices=("true", "false"))
    common(sp)
    sp.set_defaults(func=cmd_check_config)

    sp = sub.add_parser("resolve", help="peel a graph into a resolution certificate")
    sp.add_argument("--graph", required=True, help="flexgraph file or corpus:NAME")
    sp.add_argument("--library", required=True, help="builtin:thm2|thm3|thm4|thm5|degenerateK or flexlib file")
    sp.add_argument("--k", type=int)
    sp.add_argument("--family")
    sp.add_argument("--bcap", type=int, default=12)
    sp.add_argument("--d-max", type=int, default=8)
    sp.add_argument("--face-mode", choices=("current", "original"), default="current")
    sp.add_argument("--out", help="write the flexres certificate here")
    common(sp)
    sp.set_defaults(func=cmd_resolve)

    for name, func, help_ in (
        ("sample", cmd_sample, "draw colourings from the layered process"),
        ("marginals", cmd_marginals, "empirical colour frequencies"),
        ("exact", cmd_exact, "exact law and bound checks"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--lists", required=True)
        sp.add_argument("--resolution", required=True)
        sp.add_argument("--family", help="override the certificate's family")
        sp.add_argument("--samples", type=int, default=1 if name == "sample" else 10000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=10 ** 7)
        common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("discharge", help="run a discharging spec on an embedded graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--spec", required=True, help="builtin:thm2|thm3|thm4|thm5|obs9 or flexcharge file")
    sp.add_argument("--embedding-required", action="store_true", help="accepted for compatibility; always enforced")
    sp.add_argument("--phases", action="store_true", help="include every intermediate phase")
    common(sp)
    sp.set_defaults(func=cmd_discharge)

    sp = sub.add_parser("oracle", help="exact best satisfaction of a request")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--lists", required=True)
    sp.add_argument("--request", help="separate flexlists file holding the request")
    sp.add_argument("--max-vertices", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("corpus", help="list bundled graphs and configurations")
    common(sp)
    sp.set_defaults(func=cmd_corpus)
    return p


_ERROR_CODES = (
    (ParseError, EXIT_PARSE),
    (InfeasibleConfigurationError, EXIT_INFEASIBLE),
    (FamilyViolationError, EXIT_FAMILY),
    (CertificateError, EXIT_CERT),
    (DisconnectedGraphError, EXIT_DISCONNECTED),
    (SizeGuardError, EXIT_GUARD),
    (BudgetExceededError, EXIT_GUARD),
    (NotColorableError, EXIT_MISMATCH),
    (UndefinedRatioError, EXIT_PARSE),
)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        sys.stderr.write(f"flexcolor: {exc}\n")
        return exc.code
    except Exception as exc:
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                sys.stderr.write(f"flexcolor: {type(exc).__name__}: {exc}\n")
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
