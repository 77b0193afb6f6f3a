"""Command-line entry point.

Subcommands and their machine output (always on stdout):

``check --kb F [--data F]``
    Nothing on success. Exit 2 with the witness on stderr when the knowledge
    base is inconsistent.
``classify --kb F``
    One ``A SUB B`` line per entailed subsumption between distinct concept
    names of the input (``A SUB bot`` marks an unsatisfiable name).
``saturate --kb F [--data F]``
    JSON object::

        {"individuals": {ind: {concept: [[lo, hi], ...]}},
         "roles": {role: [[subject, object, [[lo, hi], ...]], ...]},
         "representatives": [t, ...]}

    Interval bounds are integers or the strings ``"-inf"`` / ``"inf"``.
``rewrite --kb F --query F [--emit text|json] [--temporal]``
    For a single NCQ: every rewriting, one per line (filters print as
    implications with ``->``), or a JSON list of rewritings. For a temporal
    query, or with ``--temporal``: the formula skeleton with each leaf replaced
    by the disjunction of its rewritings, preceded by a ``# N = ...`` line.
``answer --kb F [--data F] --query F [--engine rewrite|oracle] [--format json|csv]
[--only-tem] [--oracle-depth D] [--window W]``
    The answer set.
``fuzz --seeds N [--start S] [--temporal] [--out DIR]``
    Seeded equivalence trials between the pipeline and the oracle. Stops at the
    first failing seed and writes a repro bundle under ``DIR``.

Exit codes: 0 success, 1 usage or parse error, 2 inconsistent knowledge base,
3 oracle refusal, 4 internal invariant violation (including a fuzz mismatch).
``MWQ_COLOR=never|auto`` controls colouring of diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .classifier import classify_kb
from .errors import InconsistentKBError, InvariantViolation, MwqError, OracleRefusal
from .fuzzing import run_trial, write_repro
from .kb import BOT, FRESH_PREFIX, TOP
from .normalizer import normalize
from .pipeline import answer_query, check_consistency, load_kb, load_query
from .queries import Leaf, compute_n, render_full_query
from .rewriter import all_rewritings, rewriting_to_json
from .saturation import build_temporal_structure, saturate
from .temporal import lift_rewrite, skeleton
from .textio import write_answers

EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_REFUSAL = 3
EXIT_INVARIANT = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _use_color() -> bool:
    mode = os.environ.get("MWQ_COLOR", "auto")
    return mode != "never" and sys.stderr.isatty()


def _diag(label: str, message: str) -> None:
    prefix = f"\033[31m{label}:\033[0m" if _use_color() else f"{label}:"
    print(f"{prefix} {message}", file=sys.stderr)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------- subcommands


def cmd_check(args) -> int:
    check_consistency(load_kb(args.kb, args.data))
    return 0


def cmd_classify(args) -> int:
    kb = load_kb(args.kb)
    table = classify_kb(normalize(kb))
    names = sorted(c for c in table.concepts if not c.startswith(FRESH_PREFIX) and c not in (TOP, BOT))
    for a in names:
        if table.unsatisfiable(a):
            print(f"{a} SUB {BOT}")
            continue
        for b in names:
            if a != b and table.subsumed(a, b):
                print(f"{a} SUB {b}")
    return 0


def cmd_saturate(args) -> int:
    kb = load_kb(args.kb, args.data)
    if not kb.temporal:
        raise MwqError("saturate needs time-stamped data")
    nkb = normalize(kb)
    table = classify_kb(nkb)
    ext = saturate(nkb, table)
    structure = build_temporal_structure(nkb, table)
    out = ext.to_json()
    out["representatives"] = list(structure.reps)
    print(_dump(out))
    return 0


def cmd_rewrite(args) -> int:
    kb = load_kb(args.kb, args.data)
    q = load_query(args.query)
    table = classify_kb(normalize(kb))
    if args.temporal or not isinstance(q.formula, Leaf):
        lifted = lift_rewrite(q, table)
        n = compute_n(q.formula)
        if args.emit == "json":
            print(_dump({"n": n, "skeleton": skeleton(lifted), "query": render_full_query(q)}))
        else:
            print(f"# N = {n}")
            print(skeleton(lifted))
        return 0
    rewritings = all_rewritings(q.formula.query, table)
    if args.emit == "json":
        print(_dump([rewriting_to_json(r) for r in rewritings]))
    else:
        for r in rewritings:
            print(r)
    return 0


def cmd_answer(args) -> int:
    kb = load_kb(args.kb, args.data)
    q = load_query(args.query)
    check_consistency(kb)
    answers = answer_query(
        q, kb, engine=args.engine, only_tem=args.only_tem, oracle_depth=args.oracle_depth, window=args.window
    )
    text = write_answers(answers, args.format)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


def cmd_fuzz(args) -> int:
    for seed in range(args.start, args.start + args.seeds):
        result = run_trial(seed, temporal=args.temporal)
        if not result.ok:
            path = write_repro(result, args.out)
            _diag("mismatch", f"seed {seed}: {'; '.join(result.problems)}; repro in {path}")
            print(_dump({"failed_seed": seed, "repro": str(path), "trials": seed - args.start + 1}))
            return EXIT_INVARIANT
    print(_dump({"failed_seed": None, "trials": args.seeds}))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwq", description="Minimal-world query answering over (temporal) EL knowledge bases.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="exit 0 if consistent, 2 otherwise")
    p.add_argument("--kb", required=True)
    p.add_argument("--data")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="print entailed subsumptions between concept names")
    p.add_argument("--kb", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("saturate", help="dump the saturated temporal extensions as JSON")
    p.add_argument("--kb", required=True)
    p.add_argument("--data")
    p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("rewrite", help="print the rewritings of a query")
    p.add_argument("--kb", required=True)
    p.add_argument("--data")
    p.add_argument("--query", required=True)
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.add_argument("--temporal", action="store_true", help="print the temporal skeleton even for a single NCQ")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("answer", help="answer a query")
    p.add_argument("--kb", required=True)
    p.add_argument("--data")
    p.add_argument("--query", required=True)
    p.add_argument("--engine", choices=("rewrite", "oracle"), default="rewrite")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--only-tem", action="store_true", help="restrict temporal answers to time points of the data")
    p.add_argument("--oracle-depth", type=int)
    p.add_argument("--window", type=int, help="oracle window around the data (temporal only)")
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("fuzz", help="seeded equivalence trials against the oracle")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--temporal", action="store_true")
    p.add_argument("--out", default="fuzz-repro")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        _diag("error", str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InconsistentKBError as exc:
        _diag("inconsistent", exc.witness)
        return EXIT_INCONSISTENT
    except OracleRefusal as exc:
        _diag("refused", str(exc))
        return EXIT_REFUSAL
    except InvariantViolation as exc:
        _diag("invariant violated", str(exc))
        return EXIT_INVARIANT
    except MwqError as exc:
        _diag("error", str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _diag("error", f"{exc.filename}: {exc.strerror}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
