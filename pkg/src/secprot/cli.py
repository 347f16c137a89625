"""Command-line front end: ``secprot check|synth|verify|export``.

Exit status is 0 on success, 1 when the property asked about is false
(unsolvable, verification failed) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .core import Plant, PlantError, Relabeled
from .io import export_dot, parse_plant, parse_policy, print_policy
from .synth import SynthesisResult, rcmc
from .verify import format_path, is_m_securely_reachable, least_k, verify_policy

OK, FALSE, USAGE = 0, 1, 2


class _InputError(Exception):
    pass


def _use_color(stream: TextIO) -> bool:
    flag = os.environ.get("SECPROT_COLOR")
    if flag in ("0", "1"):
        return flag == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, good: bool, stream: TextIO) -> str:
    if not _use_color(stream):
        return text
    code = "32" if good else "31"
    return f"\x1b[{code}m{text}\x1b[0m"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_plant(path: str) -> Plant:
    return parse_plant(_read(path))


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _display(plant: Plant, event: str) -> str:
    cls = plant.alphabet.classes.get(event)
    return cls.original + "'" if isinstance(cls, Relabeled) else event


def cmd_check(args: argparse.Namespace) -> int:
    plant = _load_plant(args.plant)
    out = sys.stdout
    if args.k is not None:
        secure = is_m_securely_reachable(plant, args.k, args.m)
        print(_paint("true" if secure else "false", secure, out))
        return OK if secure else FALSE
    k = least_k(plant, args.m)
    if k is None:
        print(_paint("unsolvable", False, out))
        return FALSE
    print(_paint(f"least k = {k}", True, out))
    return OK


def _round_report(result: SynthesisResult) -> str:
    lines = []
    for j, rnd in enumerate(result.rounds):
        lines.append(f"# round {j}: k={rnd.k}")
        order = result.plant.states
        for q in order:
            events = rnd.policy[q]
            if events:
                ranked = sorted(events, key=rnd.plant.alphabet.index)
                lines.append(f"#   {q}: {', '.join(ranked)}")
    return "\n".join(lines) + "\n" if lines else ""


def _unsolvable_report(result: SynthesisResult) -> str:
    msg = f"unsolvable: round {result.failed_round} has no nonempty supervisor at any cost level"
    if result.witness:
        host = result.final_plant or result.plant
        parts = [result.witness[0][0]]
        for (_, event), (nxt, _) in zip(result.witness, result.witness[1:]):
            parts.append(f"-{_display(host, event)}-> {nxt}")
        msg += "\nuncontrollable path to secret: " + " ".join(parts)
    return msg


def cmd_synth(args: argparse.Namespace) -> int:
    plant = _load_plant(args.plant)
    result = rcmc(plant, args.m)
    doc = print_policy(result)
    report = _round_report(result) if args.rounds else ""
    if args.output in (None, "-"):
        sys.stdout.write(report + doc)
    else:
        _write(args.output, doc)
        sys.stdout.write(report)
    if not result.solvable:
        print(_paint(_unsolvable_report(result), False, sys.stderr), file=sys.stderr)
        return FALSE
    return OK


def cmd_verify(args: argparse.Namespace) -> int:
    plant = _load_plant(args.plant)
    doc = parse_policy(_read(args.policy))
    ok, path = verify_policy(plant, doc.policy, args.m)
    if ok:
        print(_paint("OK", True, sys.stdout))
        return OK
    print(_paint("FAIL", False, sys.stdout))
    if path is not None:
        print("witness: " + format_path(plant.initial, path))
    return FALSE


def cmd_export(args: argparse.Namespace) -> int:
    plant = _load_plant(args.plant)
    policy = parse_policy(_read(args.policy)).policy if args.policy else None
    _write(args.output, export_dot(plant, policy))
    return OK


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secprot",
        description="Synthesize and audit minimum-cost protection policies for secret states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide m-secure reachability or the least cost index")
    p.add_argument("plant")
    p.add_argument("--m", type=_positive, default=1, help="number of protections (default 1)")
    p.add_argument("--k", type=_nonnegative, help="test this cost index instead of searching")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="synthesize a protection policy")
    p.add_argument("plant")
    p.add_argument("--m", type=_positive, default=1)
    p.add_argument("-o", "--output", help="policy file (default stdout)")
    p.add_argument("--rounds", action="store_true", help="also print each round's policy and k")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check a policy against a plant")
    p.add_argument("plant")
    p.add_argument("policy")
    p.add_argument("--m", type=_positive, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write a Graphviz DOT rendering")
    p.add_argument("plant")
    p.add_argument("--policy")
    p.add_argument("-o", "--output", help="DOT file (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_InputError, PlantError) as exc:
        print(f"secprot: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
