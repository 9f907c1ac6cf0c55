"""Command-line entry point.

Exit status: 0 accepted / found, 1 rejected / nothing found, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import formats
from .minsky import run, validate_machine
from .reduction import CodeError, compile_machine, generate_witness
from .render import render_svg
from .solver import bounded_solve
from .validator import FUTURE, STANDARD, is_plan

DEFAULT_MAX_STEPS = 10_000


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _machine(path: str):
    machine = formats.parse_machine(_read(path))
    problem = validate_machine(machine)
    if problem is not None:
        raise InputError(f"{path}: {problem.message}")
    return machine


def _semantics(args) -> str:
    return FUTURE if args.future else STANDARD


def cmd_validate(args) -> int:
    domain = formats.parse_domain(_read(args.domain))
    plan = formats.parse_plan(_read(args.plan), domain)
    report = is_plan(domain, plan, _semantics(args))
    print(f"semantics: {_semantics(args)}")
    print(report.summary())
    return 0 if report.verdict else 1


def cmd_compile(args) -> int:
    _emit(formats.serialize_domain(compile_machine(_machine(args.machine))), args.output)
    return 0


def cmd_simulate(args) -> int:
    comp = run(_machine(args.machine), args.max_steps)
    if comp is None:
        print(f"no halting computation within {args.max_steps} steps")
        return 1
    print(f"halting computation, {len(comp) - 1} steps")
    for i, conf in enumerate(comp.configurations):
        via = f"  via {comp.transitions[i - 1]}" if i else ""
        print(f"{i}: {conf}{via}")
    return 0


def cmd_witness(args) -> int:
    machine = _machine(args.machine)
    comp = run(machine, args.max_steps)
    if comp is None:
        print(f"no halting computation within {args.max_steps} steps")
        return 1
    domain = compile_machine(machine)
    plan = generate_witness(machine, comp)
    report = is_plan(domain, plan, _semantics(args))
    print(f"computation steps: {len(comp) - 1}")
    print(f"tokens: {len(plan['xM'])}")
    print(f"semantics: {_semantics(args)}")
    print(report.summary())
    if args.output:
        Path(args.output).write_text(formats.serialize_plan(plan), encoding="utf-8")
    if args.domain_output:
        Path(args.domain_output).write_text(formats.serialize_domain(domain), encoding="utf-8")
    return 0 if report.verdict else 1


def cmd_solve(args) -> int:
    domain = formats.parse_domain(_read(args.domain))
    plan = bounded_solve(domain, args.bound, _semantics(args))
    if plan is None:
        print(f"no plan with at most {args.bound} tokens per timeline")
        return 1
    _emit(formats.serialize_plan(plan), args.output)
    return 0


def cmd_render(args) -> int:
    plan = formats.parse_plan(_read(args.plan))
    _emit(render_svg(plan), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densetp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a plan against a domain")
    p.add_argument("domain")
    p.add_argument("plan")
    p.add_argument("--future", action="store_true", help="use the future semantics for trigger rules")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile-minsky", help="compile a two-counter machine into a domain")
    p.add_argument("machine")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="search for a halting computation")
    p.add_argument("machine")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("witness", help="simulate, compile, build a timed witness and validate it")
    p.add_argument("machine")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--future", action="store_true")
    p.add_argument("-o", "--output", help="write the witness plan here")
    p.add_argument("--domain-output", help="write the compiled domain here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("solve", help="bounded plan synthesis")
    p.add_argument("domain")
    p.add_argument("--bound", type=int, required=True, help="maximum tokens per timeline")
    p.add_argument("--future", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("render", help="draw a plan as SVG")
    p.add_argument("plan")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (InputError, formats.FormatError, CodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
