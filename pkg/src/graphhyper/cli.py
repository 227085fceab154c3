"""Command-line interface emitting JSON reports.

Exit codes:
    0  success, every requested assertion passed
    1  a requested assertion failed (method disagreement, identity false)
    2  usage or input error (bad arguments, unreadable or malformed graph)
    3  a resource guard refused the computation
    4  blocked: the requested value cannot be derived from available data

Resource guards can be overridden through ``GRAPHHYPER_GUARDS``, a comma
separated list such as ``groebner_timeout=30,count_guard=1e8``; ``none``
disables a guard.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .conditions import NonRegularEdgeError, assess, condition_verdict, verdict_applicability
from .feynman import FixtureRegistry, compute_C, default_registry
from .graphpoly import GuardError, psi_enumerate, psi_matrix_tree, psi_recursion
from .groebner import GroebnerResourceError
from .multigraph import (
    CanonicalizationError,
    EdgeClass,
    Multigraph,
    canonical_key,
    classify_edge,
    multiply_edge,
)
from .pointcount import DEFAULT_PRIMES, count_affine, verify_doubling_star, verify_triple_recursion

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_BLOCKED = 4

GUARD_ENV = "GRAPHHYPER_GUARDS"
GUARD_DEFAULTS = {
    "groebner_timeout": None,
    "groebner_max_variables": 8,
    "groebner_max_degree": 5,
    "groebner_max_pairs": 200_000,
    "count_guard": 10**9,
    "enumerate_max_edges": 20,
    "matrix_tree_max_edges": 16,
}


class UsageError(ValueError):
    pass


def load_guards(env: dict | None = None) -> dict:
    guards = dict(GUARD_DEFAULTS)
    raw = (env if env is not None else os.environ).get(GUARD_ENV, "")
    for item in filter(None, (s.strip() for s in raw.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in guards:
            raise UsageError(f"{GUARD_ENV}: unknown guard setting {item!r}")
        value = value.strip().lower()
        if value == "none":
            guards[name] = None
        else:
            try:
                number = float(value)
            except ValueError:
                raise UsageError(f"{GUARD_ENV}: {name} needs a number or 'none'") from None
            guards[name] = number if name == "groebner_timeout" else int(number)
    return guards


def _groebner_guards(guards: dict) -> dict:
    return {
        "timeout": guards["groebner_timeout"],
        "max_variables": guards["groebner_max_variables"],
        "max_degree": guards["groebner_max_degree"],
        "max_pairs": guards["groebner_max_pairs"],
    }


def read_graph(path: str) -> Multigraph:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if text.lstrip().startswith("{"):
            return Multigraph.from_json(text)
        return Multigraph.from_text(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _key(g: Multigraph) -> str | None:
    try:
        return canonical_key(g).decode()
    except CanonicalizationError:
        return None


def _edge(g: Multigraph, e: str | None) -> str:
    if e is None:
        raise UsageError("--edge is required")
    if e not in g:
        raise UsageError(f"unknown edge {e!r}; edges are {', '.join(g.edge_ids)}")
    return e


def _primes(text: str | None) -> list[int]:
    if not text:
        return list(DEFAULT_PRIMES)
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError("--primes takes a comma separated list of integers") from None


# ---------------------------------------------------------------------------
# commands; each returns (results, trace, timing, exit code)


def cmd_psi(args, g, guards):
    routes = {
        "enum": lambda: psi_enumerate(g, max_edges=guards["enumerate_max_edges"] or 10**9),
        "matrixtree": lambda: psi_matrix_tree(g, max_edges=guards["matrix_tree_max_edges"] or 10**9),
        "recursion": lambda: psi_recursion(g),
    }
    names = list(routes) if args.method == "all" else [args.method]
    results, timing = {}, {}
    polys = []
    for name in names:
        start = time.perf_counter()
        r = routes[name]()
        timing[f"{name}_ms"] = round((time.perf_counter() - start) * 1000, 3)
        polys.append(r.polynomial)
        results[name] = {"polynomial": str(r.polynomial), "forest_count": r.forest_count}
    results["polynomial"] = str(polys[0])
    code = EXIT_OK
    if len(polys) > 1:
        agree = all(p == polys[0] for p in polys)
        results["agreement"] = agree
        code = EXIT_OK if agree else EXIT_ASSERTION
    return results, [], timing, code


def cmd_classify(args, g, guards):
    edges = [_edge(g, args.edge)] if args.edge else list(g.edge_ids)
    out = {}
    for e in edges:
        a = assess(g, e, **_groebner_guards(guards)) if args.applicability else None
        entry = {"class": classify_edge(g, e).value}
        if a is not None:
            entry["applicability"] = a.status.value
        out[e] = entry
    return {"edges": out}, [], {}, EXIT_OK


def cmd_conditions(args, g, guards):
    e = _edge(g, args.edge)
    try:
        verdict = condition_verdict(g, e, **_groebner_guards(guards))
    except NonRegularEdgeError as exc:
        raise UsageError(str(exc)) from None
    a = verdict_applicability(verdict)
    record = verdict.to_dict()
    timing = record.pop("timing")
    record["applicability"] = a.value
    return record, list(verdict.notes), timing, EXIT_OK


def cmd_feynman(args, g, guards):
    registry = FixtureRegistry.load(args.fixtures) if args.fixtures else default_registry()
    if args.multi_edge is not None:
        g = multiply_edge(g, _edge(g, args.edge), args.multi_edge)
    result = compute_C(g, registry)
    results = {"C": str(result.C) if result.C is not None else None, "edges": len(g.edges)}
    if result.C is None:
        results["blocked"] = result.blocker
        return results, result.trace.to_dict(), {}, EXIT_BLOCKED
    results["coefficients"] = list(result.C.coeffs)
    return results, result.trace.to_dict(), {}, EXIT_OK


def cmd_count(args, g, guards):
    records, timing = [], {}
    for p in _primes(args.primes):
        r = count_affine(g, p, method=args.method, workers=args.workers, guard=guards["count_guard"] or 10**30)
        d = r.to_dict()
        timing[f"p{p}_elapsed_ms"] = d.pop("elapsed_ms")
        records.append({"graph_key": _key(g), **d})
    return {"counts": records}, [], timing, EXIT_OK


def cmd_verify(args, g, guards):
    if not args.star and args.triple is None:
        raise UsageError("verify needs --star and/or --triple M")
    edges = [_edge(g, args.edge)] if args.edge else None
    results: dict = {}
    ok = True
    for p in _primes(args.primes):
        entry = {}
        if args.star:
            star_edges = edges or [
                e for e in g.edge_ids if classify_edge(g, e) not in (EdgeClass.BRIDGE, EdgeClass.LOOP)
            ]
            star = {e: verify_doubling_star(g, e, p) for e in star_edges}
            entry["star"] = star
            ok &= all(star.values())
        if args.triple is not None:
            tri_edges = edges or [e for e in g.edge_ids if classify_edge(g, e) == EdgeClass.REGULAR]
            tri = {e: verify_triple_recursion(g, e, p, args.triple) for e in tri_edges}
            entry["triple"] = tri
            ok &= all(tri.values())
        results[str(p)] = entry
    results["all_passed"] = ok
    return results, [], {}, EXIT_OK if ok else EXIT_ASSERTION


def cmd_fixtures(args, guards):
    registry = FixtureRegistry.load(args.fixtures) if args.fixtures else default_registry()
    if args.action == "list":
        rows = [
            {"name": x.name, "key": x.key, "C": str(x.C), "provenance": x.provenance.value}
            for x in sorted(registry, key=lambda x: (x.name, x.key))
        ]
        return {"entries": rows}, [], {}, EXIT_OK
    if args.action == "show":
        if not args.name:
            raise UsageError("fixtures show needs a fixture name or key")
        for x in registry:
            if args.name in (x.name, x.key):
                return x.to_dict(), [], {}, EXIT_OK
        raise UsageError(f"no fixture named {args.name!r}")
    raise UsageError(f"unknown fixtures action {args.action!r}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphhyper", description="Graph hypersurface toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--format", choices=("json", "text"), default="json", help="output rendering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psi", help="graph polynomial")
    p.add_argument("graph")
    p.add_argument("--method", choices=("enum", "matrixtree", "recursion", "all"), default="recursion")

    p = sub.add_parser("classify", help="edge classification")
    p.add_argument("graph")
    p.add_argument("--edge")
    p.add_argument("--applicability", action="store_true", help="also report deletion-contraction applicability")

    p = sub.add_parser("conditions", help="condition I/II verdict for a regular edge")
    p.add_argument("graph")
    p.add_argument("--edge", required=True)

    p = sub.add_parser("feynman", help="Chern-class polynomial C_G(t)")
    p.add_argument("graph")
    p.add_argument("--multi-edge", type=int, dest="multi_edge", help="replace --edge by this many parallel copies")
    p.add_argument("--edge")
    p.add_argument("--fixtures", help="fixture registry JSON (default: shipped fixtures)")

    p = sub.add_parser("count", help="F_p point counts")
    p.add_argument("graph")
    p.add_argument("--primes")
    p.add_argument("--method", choices=("auto", "shortcut", "full"), default="auto")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", help="check counting identities")
    p.add_argument("graph")
    p.add_argument("--primes")
    p.add_argument("--edge")
    p.add_argument("--star", action="store_true", help="doubling identity for the edge(s)")
    p.add_argument("--triple", type=int, metavar="M", help="triple recursion starting at multiplicity M")

    p = sub.add_parser("fixtures", help="inspect the fixture registry")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--fixtures")
    return parser


COMMANDS = {
    "psi": cmd_psi,
    "classify": cmd_classify,
    "conditions": cmd_conditions,
    "feynman": cmd_feynman,
    "count": cmd_count,
    "verify": cmd_verify,
}


def _render_text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{value}")
    return lines


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    """Execute a command and return (report, exit code)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report: dict = {"command": args.command, "argv": argv}
    try:
        guards = load_guards()
        if args.command == "fixtures":
            report["graph_key"] = None
            results, trace, timing, code = cmd_fixtures(args, guards)
        else:
            g = read_graph(args.graph)
            report["graph_key"] = _key(g)
            results, trace, timing, code = COMMANDS[args.command](args, g, guards)
    except (GuardError, GroebnerResourceError, CanonicalizationError) as exc:
        return {**report, "error": str(exc), "exit_code": EXIT_GUARD}, EXIT_GUARD
    except ValueError as exc:
        return {**report, "error": str(exc), "exit_code": EXIT_USAGE}, EXIT_USAGE
    timing = dict(timing)
    timing["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    report.update(
        {"results": results, "trace": trace, "version": __version__, "exit_code": code, "timing": timing}
    )
    return report, code


def render(report: dict, fmt: str = "json") -> str:
    if fmt == "text":
        return "\n".join(_render_text(report))
    return json.dumps(report, indent=2)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    report, code = run(argv)
    fmt = build_parser().parse_args(argv).format
    out = sys.stderr if code in (EXIT_USAGE, EXIT_GUARD) else sys.stdout
    print(render(report, fmt), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
