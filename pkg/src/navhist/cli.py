"""Command-line entry point.

Exit codes: 0 success, 1 finding (assertion failure, divergence, property
violation), 2 usage or syntax error, 3 invariant violation in an input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .catalog import counterexample_catalog, run_case
from .history import InvalidHistory, doc_line, is_well_formed
from .render import render_ascii, render_dot
from .semantics import PATCHED, PRESETS, PatchSet, preset
from .textio import (
    StructuredFormatError,
    TraceSyntaxError,
    format_action,
    history_to_obj,
    load_any,
    serialize_trace,
    to_structured,
    trace_to_obj,
)
from .trace import format_ids, replay
from .verification import (
    DEFAULT_SCHEMA,
    FrameSchema,
    canonical,
    differential_run,
    enumerate_reachable,
    known_shapes,
    random_trace,
    sweep,
    trace_states,
)

EXIT_OK, EXIT_FINDING, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _semantics(args) -> PatchSet:
    if getattr(args, "patches", None) is not None:
        nums = [int(x) for x in args.patches.split(",") if x.strip()] if args.patches.strip() else []
        try:
            return PatchSet.from_numbers(nums)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return preset(args.preset) if args.preset else PATCHED


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands ----------------------------------------------------------------------


def cmd_run(args) -> int:
    trace = load_any(_read(args.trace))
    patches = _semantics(args)
    run = replay(trace, patches)
    if args.format == "structured":
        report = {
            "report": "run",
            "preset": patches.name,
            "trace": trace_to_obj(trace),
            "steps": [
                {"index": s.index, "action": format_action(s.action), "result": s.summary(),
                 "failure": str(s.failure) if s.failure else None}
                for s in run.steps
            ],
            "final": history_to_obj(run.final),
            "ok": run.ok,
        }
        _emit(to_structured(report))
    elif args.format == "dot":
        _emit(render_dot(run.final))
    else:
        _emit(f"preset: {patches.name}")
        for s in run.steps:
            if args.show_states or s.failure or s.error:
                _emit(f"[{s.index}] {format_action(s.action)} -> {s.summary()}")
            if s.failure:
                _emit(f"    FAILED: expected {s.failure.expected}; actual {s.failure.actual}")
        _emit(f"final: {doc_line(run.final)}")
        _emit(f"active: {format_ids(run.final.active())}")
        _emit(f"well-formed: {str(is_well_formed(run.final)).lower()}")
        _emit("ok" if run.ok else f"{len(run.failures)} assertion failure(s)" + (", replay error" if run.error else ""))
    return EXIT_OK if run.ok else EXIT_FINDING


def cmd_diff(args) -> int:
    trace = load_any(_read(args.trace))
    left, right = preset(args.left), preset(args.right)
    div = differential_run(trace, left, right)
    if args.format == "structured":
        report = {"report": "diff", "left": left.name, "right": right.name, "divergence": None}
        if div is not None:
            report["divergence"] = {
                "index": div.index, "action": format_action(div.action),
                "left": div.left, "right": div.right, "note": div.note or None,
            }
        _emit(to_structured(report))
    elif div is None:
        _emit(f"no divergence between {left.name} and {right.name}")
    else:
        _emit(div.describe())
    return EXIT_OK if div is None else EXIT_FINDING


def cmd_fundamental(args) -> int:
    patches = _semantics(args)
    schema = FrameSchema.parse(args.schema) if args.schema else DEFAULT_SCHEMA
    if args.random is not None:
        states = set()
        for k in range(args.random):
            for h in trace_states(random_trace(args.seed + k, schema, patches), patches):
                states.add(canonical(h))
        mode = f"random {args.random} seed {args.seed}"
    else:
        states = enumerate_reachable(schema, patches)
        mode = "exhaustive"
    report = sweep(states, patches, schema)
    witnesses = report.witnesses
    if args.witness_dir:
        out = Path(args.witness_dir)
        out.mkdir(parents=True, exist_ok=True)
        for n, w in enumerate(witnesses):
            header = f"# {patches.name}: {w.describe()}\n"
            (out / f"witness-{n:04d}.trace").write_text(header + serialize_trace(w.trace()), encoding="utf-8")

    if args.format == "structured":
        doc = {
            "report": "fundamental",
            "preset": patches.name,
            "mode": mode,
            "schema": list(schema.__dict__.values()),
            "states": report.states,
            "not_well_formed": report.not_well_formed,
            "pairs_checked": report.pairs_checked,
            "witnesses": len(witnesses),
            "mechanisms": dict(sorted(report.mechanisms().items())),
            "known_shapes": known_shapes(report),
            "first_witness": None,
        }
        if witnesses:
            doc["first_witness"] = {
                "description": witnesses[0].describe(),
                "trace": serialize_trace(witnesses[0].trace()),
            }
        _emit(to_structured(doc))
    else:
        _emit(f"preset: {patches.name}  mode: {mode}  schema: {','.join(map(str, schema.__dict__.values()))}")
        _emit(f"states: {report.states}  not well-formed: {report.not_well_formed}  pairs checked: {report.pairs_checked}")
        _emit(f"witnesses: {len(witnesses)} in {len(report.violating_states)} state(s)")
        for name, count in sorted(report.mechanisms().items()):
            _emit(f"  {name}: {count}")
        if witnesses:
            shapes = known_shapes(report)
            _emit("known shapes: " + ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in shapes.items()))
        if witnesses:
            _emit(f"first witness: {witnesses[0].describe()}")
            _emit("replay with:")
            for line in serialize_trace(witnesses[0].trace()).splitlines():
                _emit(f"  {line}")
    return EXIT_FINDING if witnesses else EXIT_OK


def cmd_counterexample(args) -> int:
    try:
        case = counterexample_catalog(args.index)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    patches = _semantics(args)
    result = run_case(case, patches)
    if args.format == "structured":
        doc = {
            "report": "counterexample",
            "index": case.index,
            "preset": patches.name,
            "initial": history_to_obj(case.initial),
            "scenarios": [
                {
                    "label": r.label,
                    "actual": [history_to_obj(h) for h in r.states],
                    "expected": None if r.expected is None else [history_to_obj(h) for h in r.expected],
                    "matches": r.matches,
                }
                for r in result.scenarios
            ],
            "findings": result.findings,
        }
        _emit(to_structured(doc))
    else:
        _emit(f"counterexample {case.index}: {case.title}  (preset {patches.name})")
        _emit(f"initial:  {doc_line(case.initial)}")
        if case.expected_well_formed is not None:
            _emit(f"initial well-formed: {str(is_well_formed(case.initial)).lower()}")
        for r in result.scenarios:
            _emit(f"{r.label}:")
            for n, summary in enumerate(r.summaries):
                _emit(f"  actual   {summary}")
                if r.expected is not None:
                    _emit(f"  expected {doc_line(r.expected[n])}")
            if r.matches is not None:
                _emit(f"  {'matches' if r.matches else 'DOES NOT MATCH'} the expected states")
        for f in result.findings:
            _emit(f"finding: {f}")
        if not result.findings:
            _emit("no findings under this preset")
    return EXIT_FINDING if result.findings or result.mismatches else EXIT_OK


def cmd_render(args) -> int:
    h = load_any(_read(args.history)).initial
    if args.format == "dot":
        _emit(render_dot(h))
    elif args.format == "structured":
        _emit(to_structured(h))
    else:
        _emit(render_ascii(h))
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _add_semantics(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", choices=sorted(PRESETS), help="semantics preset (default: patched)")
    g.add_argument("--patches", help="explicit patch numbers, e.g. 1,2,3,4")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="navhist", description="Executable navigation-history semantics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="replay a trace and check its assertions")
    p.add_argument("trace")
    _add_semantics(p)
    p.add_argument("--show-states", action="store_true", help="print the state after every action")
    p.add_argument("--format", choices=("text", "structured", "dot"), default="text")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diff", help="replay a trace under two presets and report the first divergence")
    p.add_argument("trace")
    p.add_argument("--left", choices=sorted(PRESETS), default="spec")
    p.add_argument("--right", choices=sorted(PRESETS), default="patched")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("fundamental", help="check the fundamental property over reachable histories")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every reachable state (default)")
    mode.add_argument("--random", type=int, metavar="N", help="sample N random traces instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema", help="children,depth,navs,actions (default 2,2,2,6)")
    p.add_argument("--witness-dir", help="write each witness as a replayable trace file here")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    _add_semantics(p)
    p.set_defaults(func=cmd_fundamental)

    p = sub.add_parser("counterexample", help="replay a catalogued counterexample")
    p.add_argument("index", type=int)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    _add_semantics(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("render", help="draw a history")
    p.add_argument("history")
    p.add_argument("--format", choices=("ascii", "dot", "structured"), default="ascii")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"navhist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TraceSyntaxError, StructuredFormatError) as exc:
        print(f"navhist: syntax error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidHistory as exc:
        for v in exc.violations:
            print(f"navhist: invalid history: {v}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"navhist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
