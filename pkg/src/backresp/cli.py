"""Command-line entry point: ``backresp {analyze,sample,generate,validate}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import tsr, zoo
from .coop import DEFAULT_PLAYER_CAP, MissingCounterexample, PlayerCapExceeded, Variant
from .report import DEFAULT_DIGITS, render
from .responsibility import BudgetTooSmall, estimate, exact, optimistic_fast, plan_for_time, plan_samples
from .ts import ValidationError, make_grouping
from .weights import WeightError, make_weights, parse_weights

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_PLAN = 0, 2, 3, 4


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        self.code = code
        super().__init__(message)


def _default_threads() -> int:
    env = os.environ.get("RESP_THREADS")
    if env and env.isdigit() and int(env) > 0:
        return int(env)
    return os.cpu_count() or 1


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CLIError(f"cannot read {path}: {e.strerror}") from None


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_model(args):
    model = tsr.loads(_read_text(args.input), complete_sinks=args.complete_sinks)
    if model.counterexample is None:
        raise MissingCounterexample()
    grouping = None
    if args.use_groups:
        grouping = model.grouping or make_grouping(model.system)
    return model, grouping


def _weights(choice: str, n: int, allow_negative: bool):
    if choice.startswith("custom:"):
        wv = parse_weights(_read_text(choice[len("custom:"):]), allow_negative)
        if wv.n != n:
            raise WeightError(f"custom weights have {wv.n} entries, model has {n} players")
        return wv
    return make_weights(choice, n)


def cmd_analyze(args) -> int:
    model, grouping = _load_model(args)
    ts, rho = model.system, model.counterexample
    variant = Variant(args.mode)
    n = len(grouping) if grouping else ts.num_states
    weights = _weights(args.index, n, args.allow_negative_weights)
    if args.engine == "fast":
        if variant is not Variant.OPTIMISTIC:
            raise CLIError("--engine fast only supports --mode optimistic")
        if grouping is not None:
            raise CLIError("--engine fast works on individual states; drop --use-groups")
        report = optimistic_fast(ts, rho, weights)
    else:
        report = exact(ts, rho, variant, weights, grouping, cap=args.cap, workers=args.threads)
    _write(render(report, args.output, args.digits), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    model, grouping = _load_model(args)
    ts, rho = model.system, model.counterexample
    variant = Variant(args.mode)
    n = len(grouping) if grouping else ts.num_states
    weights = _weights(args.index, n, args.allow_negative_weights)
    if args.samples is not None:
        plan = plan_samples(weights, args.samples, args.seed)
    else:
        plan = plan_for_time(ts, rho, variant, weights, args.time_budget, args.seed, grouping)
    report = estimate(ts, rho, variant, weights, plan, grouping, workers=args.threads)
    _write(render(report, args.output, args.digits), args.out)
    return EXIT_OK


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise CLIError(f"--param expects key=value, got {text!r}")
    return key, int(val) if val.lstrip("-").isdigit() else val


def cmd_generate(args) -> int:
    params = dict(_param(p) for p in args.param)
    try:
        model = zoo.generate(args.family, **params)
    except TypeError as e:
        raise CLIError(f"bad parameter for {args.family}: {e}") from None
    except zoo.ParamOutOfRange as e:
        raise CLIError(str(e)) from None
    if args.format == "json":
        text = json.dumps(tsr.model_to_json(model), sort_keys=True) + "\n"
    else:
        text = tsr.emit_tsr(model)
    _write(text, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = tsr.loads(_read_text(args.input), complete_sinks=args.complete_sinks)
    ts = model.system
    print(f"ok: {ts.num_states} states, {ts.num_transitions} transitions, {len(ts.bad)} bad")
    if model.counterexample is not None:
        print(f"ok: counterexample of length {len(model.counterexample)}")
    else:
        print("note: no counterexample")
    if model.grouping is not None:
        print(f"ok: {len(model.grouping)} groups")
    for w in ts.warnings():
        print(f"warning: {w}")
    return EXIT_OK


def _add_model_args(p):
    p.add_argument("--input", "-i", default="-", help="TSR or JSON model file ('-' for stdin)")
    p.add_argument("--mode", choices=[v.value for v in Variant], default="pessimistic")
    p.add_argument("--index", default="shapley", help="shapley, banzhaf or custom:<file>")
    p.add_argument("--use-groups", action="store_true", help="treat state groups as players")
    p.add_argument("--output", choices=["table", "json", "csv"], default="table")
    p.add_argument("--out", "-o", help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--complete-sinks", action="store_true", help="add self-loops to states without successors")
    p.add_argument("--allow-negative-weights", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="backresp", description="Backward responsibility for safety counterexamples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="exact responsibility")
    _add_model_args(p)
    p.add_argument("--engine", choices=["exact", "fast"], default="exact")
    p.add_argument("--cap", type=int, default=DEFAULT_PLAYER_CAP, help="maximum player count for the exact engine")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="stochastic estimate")
    _add_model_args(p)
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--samples", type=int)
    budget.add_argument("--time-budget", type=float, metavar="SECONDS")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("generate", help="write an example model")
    p.add_argument("family", choices=sorted(zoo.FAMILIES))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--format", choices=["tsr", "json"], default="tsr")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("input")
    p.add_argument("--complete-sinks", action="store_true")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        args.threads = 1
    try:
        return args.func(args)
    except PlayerCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except BudgetTooSmall as e:
        print(f"error: BudgetTooSmall: {e}", file=sys.stderr)
        return EXIT_PLAN
    except ValidationError as e:
        for issue in e.issues:
            print(f"error: {issue}", file=sys.stderr)
        return EXIT_INPUT
    except (CLIError, WeightError, MissingCounterexample) as e:
        print(f"error: {e}", file=sys.stderr)
        return getattr(e, "code", EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
