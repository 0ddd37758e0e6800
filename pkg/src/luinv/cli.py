"""Command-line front end.

Subcommands: enumerate (label listings), eval (invariant values on state
files, both engines), graph (DOT/JSON/formula views, class decompositions,
expressibility), verify (property-check suites).

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .closedform import alternate_writings, closed_form, formula_text
from .contract import eval_mixed, eval_pure
from .errors import ResourceLimitError
from .graphs import build_graph, dot_export, expressible_ordering, graph_to_json
from .perms import (
    canonical_form,
    enumerate_orbits,
    format_label,
    is_transitive,
    parse_label,
)
from .states import DensityMatrix, PureState, load_state, set_dim_limit
from .verify import render_table, reports_to_json, run_suite

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

#: Engine disagreement beyond this (relative) makes `eval` exit nonzero.
EVAL_MISMATCH_TOL = 1e-8


def _arity(args) -> int:
    if args.r is not None:
        return args.r
    if args.k is not None:
        return args.k - 1 if args.kind == "pure" else args.k
    raise ValueError("specify --r, or --k together with --kind")


def cmd_enumerate(args) -> int:
    r = _arity(args)
    labels = enumerate_orbits(args.m, r)
    if args.generators_only:
        labels = [lab for lab in labels if is_transitive(lab.rep)]
    if args.count:
        print(len(labels))
        return EXIT_OK
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "m": args.m,
            "r": r,
            "labels": [
                {"label": format_label(lab.rep), "transitive": is_transitive(lab.rep)}
                for lab in labels
            ],
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    for lab in labels:
        flag = "transitive" if is_transitive(lab.rep) else "-"
        print(f"{format_label(lab.rep):<24} {flag}")
    return EXIT_OK


def cmd_eval(args) -> int:
    state = load_state(args.state)
    if args.kind == "pure" and not isinstance(state, PureState):
        raise ValueError("state file holds a mixed state but --kind pure was given")
    if args.kind == "mixed" and not isinstance(state, DensityMatrix):
        raise ValueError("state file holds a pure state but --kind mixed was given")
    m = args.m if args.m is not None else 3
    sigma = parse_label(args.label, m)
    expected_r = state.k - 1 if args.kind == "pure" else state.k
    if sigma.r != expected_r:
        raise ValueError(
            f"label has {sigma.r} entries but the {args.kind} state needs {expected_r}"
        )
    if args.kind == "pure":
        via_contract = eval_pure(sigma, state)
    else:
        via_contract = eval_mixed(sigma, state)
    via_closed = closed_form(sigma, args.kind, state)
    diff = abs(via_contract - via_closed) / max(abs(via_contract), abs(via_closed), 1e-300)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "label": format_label(sigma),
        "kind": args.kind,
        "m": sigma.m,
        "value": [via_contract.real, via_contract.imag],
        "contract": [via_contract.real, via_contract.imag],
        "closed_form": [via_closed.real, via_closed.imag],
        "relative_difference": diff,
    }
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"label        : {doc['label']} ({args.kind}, grade {sigma.m})")
        print(f"contract     : {via_contract:.15g}")
        print(f"closed form  : {via_closed:.15g}")
        print(f"difference   : {diff:.3e} (relative)")
    return EXIT_OK if diff <= EVAL_MISMATCH_TOL else EXIT_VERIFY


def cmd_graph(args) -> int:
    sigma = parse_label(args.label, args.m)
    kind = args.kind
    if kind == "pure":
        if sigma.r != args.k - 1:
            raise ValueError(f"pure label needs k-1 = {args.k - 1} entries, got {sigma.r}")
        drawn = sigma.embed()
    else:
        if sigma.r != args.k:
            raise ValueError(f"mixed label needs k = {args.k} entries, got {sigma.r}")
        drawn = sigma
    g = build_graph(drawn)

    if args.decompose:
        if kind != "pure":
            raise ValueError("--decompose applies to pure labels")
        writings = alternate_writings(sigma, "pure")
        for w in writings:
            print(f"{format_label(w.label.rep):<24} {w.text}")
        return EXIT_OK

    emitted = False
    if args.formula:
        lab = canonical_form(drawn)
        print(formula_text(lab.rep, kind))
        emitted = True
    if args.expressible:
        order = expressible_ordering(g)
        print("none" if order is None else ",".join(str(v) for v in order))
        emitted = True
    if args.json:
        print(graph_to_json(g))
        emitted = True
    if not emitted:
        sys.stdout.write(dot_export(g))
    return EXIT_OK


def cmd_verify(args) -> int:
    dims = tuple(int(x) for x in args.dims.split(",")) if args.dims else (2, 2)
    reports = run_suite(args.suite, seed=args.seed, dims=dims)
    print(render_table(reports))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fp:
            fp.write(reports_to_json(reports))
            fp.write("\n")
        print(f"report written to {args.report}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="luinv",
        description="Enumerate, evaluate, draw and verify local-unitary "
        "invariant polynomials of grades 1-3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--dim-limit", type=int, default=None,
        help="raise the total-dimension resource guard (default 4096)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list invariant labels")
    p.add_argument("--m", type=int, required=True, help="grade (1..8)")
    p.add_argument("--r", type=int, default=None, help="tuple arity")
    p.add_argument("--k", type=int, default=None, help="subsystem count (with --kind)")
    p.add_argument("--kind", choices=("pure", "mixed"), default="mixed",
                   help="with --k: pure labels have r=k-1, mixed r=k")
    p.add_argument("--generators-only", action="store_true",
                   help="only transitive labels (algebraically independent generators)")
    p.add_argument("--count", action="store_true", help="print the cardinality only")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("eval", help="evaluate an invariant on a state file")
    p.add_argument("--label", required=True, help='e.g. "s,t" or "[2,1,3],[1,2,3]"')
    p.add_argument("--kind", choices=("pure", "mixed"), required=True)
    p.add_argument("--m", type=int, default=None, help="grade (default 3)")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("graph", help="graph/formula views of one invariant")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--kind", choices=("pure", "mixed"), default="pure")
    p.add_argument("--decompose", action="store_true",
                   help="list all conjugation classes of the two-sided class "
                   "with their formulas (pure labels)")
    p.add_argument("--formula", action="store_true", help="print the closed-form text")
    p.add_argument("--expressible", action="store_true",
                   help="print an adjacent-loop cyclic ordering or 'none'")
    p.add_argument("--json", action="store_true", help="JSON graph dump instead of DOT")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="run property-check suites")
    p.add_argument("--suite", default="all",
                   help="counts, lu, closed, independence, classes, purification, or all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", default=None, help='subsystem dims, e.g. "2,2"')
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        if args.dim_limit is not None:
            set_dim_limit(args.dim_limit)
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
