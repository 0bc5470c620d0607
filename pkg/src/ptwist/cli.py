"""Command line: ``ptwist run``, ``ptwist suite`` and ``ptwist explain``.

Exit codes: 0 all tasks pass, 1 some task failed or was inconclusive,
2 parse error (including unreadable files), 3 validation error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .runner import dumps, run, run_suite
from .scenario import RESERVED_TASKS, TASKS, ScenarioError, load_scenario, parse_field

EXIT_OK, EXIT_TASK, EXIT_PARSE, EXIT_VALIDATION = 0, 1, 2, 3

# task -> (mathematics, code path, statement cited)
EXPLAIN = {
    "classify": (
        "Compute Ext*(E, E) with Yoneda products; P^n-object iff it is k[h]/(h^{n+1}) with |h| = 2, "
        "spherical(d) iff it is k in degrees 0 and d.",
        "ptwist.homext.classify",
        "definition of P^n-objects and spherical objects via their Ext rings",
    ),
    "ext_dims": (
        "Graded dimensions of H*(Hom(M, N)) for semifree M.",
        "ptwist.homext.ext_dims",
        "Ext groups as cohomology of the Hom complex",
    ),
    "cohomology_dims": (
        "Graded dimensions of the cohomology of the underlying complex of a module.",
        "ptwist.homext.cohomology_dims",
        "cohomology of a DG module",
    ),
    "spherical_twist": (
        "T_E(F) = Cone(Hom*(E, F) (x) E -> F) with the evaluation map.",
        "ptwist.twistops.spherical_twist",
        "spherical twist as the cone of evaluation",
    ),
    "p_twist": (
        "P_E(F) = Cone(Cone(beta) -> F) with beta(w (x) x) = (w o h) (x) x - w (x) h(x).",
        "ptwist.twistops.p_twist",
        "the P-twist as a double cone built from h",
    ),
    "double_twist": (
        "T_E(T_E(F)).",
        "ptwist.twistops.double_twist",
        "for a P^1-object the square of the spherical twist is the P-twist",
    ),
    "minimal_model": (
        "Cancel generator pairs joined by an invertible scalar differential entry; "
        "returns the reduced module and quasi-isomorphisms to and from it.",
        "ptwist.equivlab.minimal_model",
        "P_E(E) is isomorphic to E[-2n] via staircase cancellation",
    ),
    "find_quasi_iso": (
        "Random closed degree-0 maps tested for acyclic cone; a cohomology mismatch proves non-equivalence.",
        "ptwist.equivlab.find_quasi_iso",
        "isomorphism in the derived category",
    ),
    "euler_pairing": (
        "chi(M, N) = sum (-1)^i dim Ext^i(M, N).",
        "ptwist.equivlab.euler_pairing",
        "the P-twist acts as the identity on K-theory",
    ),
    "ambient_profile": (
        "Ext of C = Cone(h: E[-2] -> E)[1] against E, compared with the long exact sequence prediction.",
        "ptwist.degen.ambient_ext_profile",
        "Ext of the pushforward is k in degrees 0 and 2n+1",
    ),
    "spherical_after_pushforward": (
        "Whether the ambient profile is {0: 1, 2n+1: 1}.",
        "ptwist.degen.spherical_after_pushforward",
        "the pushforward of a P^n-object with nonzero obstruction is spherical",
    ),
    "intertwining": (
        "Reserved: needs an ambient module category; scenarios using it are rejected.",
        "-",
        "pushforward intertwines the P-twist with a spherical twist",
    ),
}


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(exc: ScenarioError) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_PARSE if exc.category == "parse" else EXIT_VALIDATION


def cmd_run(args) -> int:
    try:
        if args.field:
            parse_field(args.field)
        sc = load_scenario(args.file, seed=args.seed, field=args.field)
    except ScenarioError as exc:
        return _error(exc)
    report = run(sc, timings=args.timings)
    _write(dumps(report), args.out)
    return EXIT_OK if report["summary"]["all_pass"] else EXIT_TASK


def cmd_suite(args) -> int:
    try:
        if args.field:
            parse_field(args.field)
        report = run_suite(seed=args.seed, field=args.field, timings=args.timings)
    except ScenarioError as exc:
        return _error(exc)
    _write(dumps(report), args.out)
    s = report["summary"]
    print(f"{s['pass']}/{s['total']} tasks passed in {s['scenarios']} scenarios", file=sys.stderr)
    return EXIT_OK if s["all_pass"] else EXIT_TASK


def cmd_explain(args) -> int:
    entry = EXPLAIN.get(args.task)
    if entry is None:
        print(f"unknown task {args.task!r}; known: {', '.join(sorted(EXPLAIN))}", file=sys.stderr)
        return EXIT_PARSE
    math, code, cite = entry
    status = "reserved" if args.task in RESERVED_TASKS else "available"
    print(f"{args.task} ({status})\n  math: {math}\n  code: {code}\n  cites: {cite}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptwist", description="P-twist and spherical twist workbench")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        sp.add_argument("--field", default=None, help="q or fp:PRIME")
        sp.add_argument("--out", default=None, help="write the JSON report here")
        sp.add_argument("--timings", action="store_true", help="add wall times (breaks byte-identical reports)")

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("file")
    common(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run the built-in acceptance scenarios")
    common(s)
    s.set_defaults(func=cmd_suite)

    e = sub.add_parser("explain", help="describe a task")
    e.add_argument("task", choices=sorted(set(TASKS) | set(RESERVED_TASKS)), metavar="task")
    e.set_defaults(func=cmd_explain)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
