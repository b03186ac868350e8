"""Command-line entry point ``detpres``.

Subcommands print one JSON document to stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 usage or I/O error, 2 hypothesis violation,
3 invariant failure or failed suite.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from ..decomposer import BOTH, FAST, PAPER, decompose_pair_skew, decompose_pair_sym, default_verification
from ..errors import DetCompatViolated, DetPresError, HypothesisViolation, InvariantFailure, UsageError
from ..field import make_field
from ..maps import AnalyticMap, CanonicalCongruence, canonical_pair, map_from_json, random_canonical
from ..matrix import Matrix, identity
from ..space import SKEW_SPACE, SYM, Space
from ..verify import EXHAUSTIVE, SAMPLED, Verification
from .classify import classify_linear_preservers
from .suites import run_suite, suite_names

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("detpres")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_map(path: str):
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    try:
        return map_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DetPresError):
            raise
        raise UsageError(f"{path} is not a map file: {exc!r}") from None


def _verification(args) -> Verification | None:
    if args.mode is None:
        return None
    if args.mode == SAMPLED:
        if args.seed is None:
            raise UsageError("--seed is required with --mode sampled")
        return Verification(SAMPLED, args.samples, args.seed)
    return Verification(EXHAUSTIVE)


def cmd_decompose(args) -> int:
    phi, psi = _load_map(args.phi), _load_map(args.psi)
    if phi.space != psi.space or phi.field != psi.field:
        raise UsageError("phi and psi files declare different spaces or fields")
    strict = not args.explore
    v = _verification(args) or default_verification(psi.space, psi.field)
    try:
        if psi.space.kind == SYM:
            result = decompose_pair_sym(phi, psi, args.path, v, strict)
        else:
            result = decompose_pair_skew(phi, psi, args.path, v, strict)
    except InvariantFailure as exc:
        _emit({"error": type(exc).__name__, "message": str(exc), "exploration": args.explore})
        return EXIT_INVARIANT
    _emit(result.to_json())
    return EXIT_OK


def _parse_rows(F, text: str) -> list:
    rows = json.loads(text)
    return [[F.parse(x) for x in r] for r in rows]


def cmd_generate(args) -> int:
    F = make_field("rational") if args.field == "rational" else make_field("prime", args.p)
    sp = Space(args.space, args.n)
    if args.random:
        if args.seed is None:
            raise UsageError("--seed is required with --random")
        form = random_canonical(sp, F, random.Random(args.seed), with_x0=sp.kind == SYM)
    else:
        beta = F.parse(args.beta)
        u = Matrix(F, _parse_rows(F, args.u)) if args.u else identity(F, sp.n)
        x0 = sp.zero(F)
        if args.x0:
            x0 = Matrix(F, _parse_rows(F, args.x0), sp.structure)
        form = CanonicalCongruence(beta, u, x0)
    if form.u.n != sp.n or form.x0.n != sp.n:
        raise UsageError("u and x0 must be n x n")
    if sp.kind == SKEW_SPACE and not form.x0.is_zero():
        raise UsageError("skew pairs are generated with x0 = 0 (phi = psi)")
    phi, psi = canonical_pair(form.beta, form.u, form.x0)
    if sp.kind == SKEW_SPACE:
        psi = AnalyticMap(form)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {}
        for name, t in (("phi", phi), ("psi", psi)):
            obj = t.materialize().to_json() if args.materialize else t.to_json()
            paths[name] = str(out / f"{name}.json")
            Path(paths[name]).write_text(json.dumps(obj, indent=1))
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc}") from None
    _emit({"phi": paths["phi"], "psi": paths["psi"], "canonical": form.to_json(),
           "materialized": bool(args.materialize)})
    return EXIT_OK


def cmd_suite(args) -> int:
    params = {"n": args.n, "p": args.p, "count": args.count, "seed": args.seed, "samples": args.samples,
              "space": args.space}
    report = run_suite(args.name, params, args.shards)
    _emit(report.to_json())
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_classify(args) -> int:
    report = classify_linear_preservers(args.space, args.n, make_field("prime", args.p), args.shards)
    _emit(report.to_json())
    return EXIT_OK if report.passed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="detpres", description="Decompose and verify determinant-compatible map pairs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decompose", help="recover canonical data for a pair of map files")
    d.add_argument("--phi", required=True)
    d.add_argument("--psi", required=True)
    g = d.add_mutually_exclusive_group()
    g.add_argument("--strict", action="store_true", help="require |F| >= n^2 + 1 (default)")
    g.add_argument("--explore", action="store_true", help="run below the field-size bound; results are labelled")
    d.add_argument("--mode", choices=[EXHAUSTIVE, SAMPLED])
    d.add_argument("--seed", type=int)
    d.add_argument("--samples", type=int, default=10_000)
    d.add_argument("--path", choices=[PAPER, FAST, BOTH], default=PAPER)
    d.set_defaults(func=cmd_decompose)

    gen = sub.add_parser("generate", help="write phi.json / psi.json from canonical data")
    gen.add_argument("--space", choices=[SYM, SKEW_SPACE], default=SYM)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=int)
    gen.add_argument("--field", choices=["prime", "rational"], default="prime")
    gen.add_argument("--beta", default="1")
    gen.add_argument("--u", help='rows as JSON, e.g. [["1","2"],["0","1"]]')
    gen.add_argument("--x0", help="rows as JSON")
    gen.add_argument("--random", action="store_true", help="draw (beta, u, x0) at random")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--materialize", action="store_true", help="write full tables instead of analytic data")
    gen.set_defaults(func=cmd_generate)

    s = sub.add_parser("suite", help="run a named verification suite")
    s.add_argument("name", help=", ".join(suite_names()))
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--count", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--space", choices=[SYM, SKEW_SPACE])
    s.set_defaults(func=cmd_suite)

    c = sub.add_parser("classify", help="brute-force the linear determinant preservers")
    c.add_argument("--space", choices=[SYM, SKEW_SPACE], default=SYM)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--shards", type=int, default=1)
    c.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HypothesisViolation as exc:
        body = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, DetCompatViolated) and exc.witness:
            body["witness"] = [w.to_json() for w in exc.witness]
        _emit(body)
        print(f"detpres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except InvariantFailure as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        print(f"detpres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, ZeroDivisionError) as exc:
        print(f"detpres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
