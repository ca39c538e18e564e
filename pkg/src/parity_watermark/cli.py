"""Batch command-line interface.

Exit codes: 0 success, 2 I/O or parse failure, 3 validation or dimension
failure, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import pnm_io
from .adversary import Verdict, li_attack
from .errors import FormatError, ValidationError
from .harness import (
    COMPONENTS,
    builtin_paper_scenario,
    exhaustive_sweep,
    fix_all_but,
    paper_match_flags,
    run_counterexample,
    verify_attack_outcome_theorem,
)
from .scheme import EmbedRule, embed, extract_blind_parity, extract_informed

EXIT_OK = 0
EXIT_IO = 2
EXIT_INVALID = 3
EXIT_MISMATCH = 4


class _Usage(Exception):
    pass


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode("ascii")
    Path(path).write_bytes(data)


def cmd_embed(args: argparse.Namespace) -> int:
    host = pnm_io.read_pgm(_read(args.host))
    wm = pnm_io.read_pbm(_read(args.watermark))
    result = embed(host, wm, EmbedRule(args.rule))
    _write(args.out, pnm_io.write_pgm(result.watermarked))
    if args.emit_checkbit:
        _write(args.emit_checkbit, pnm_io.format_check_bit(result.check_bit))
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    target = pnm_io.read_pgm(_read(args.target))
    original = pnm_io.read_pgm(_read(args.original_host))
    attacker = pnm_io.read_pgm(_read(args.attacker_host))
    trace = li_attack(target, original, attacker)
    _write(args.out, pnm_io.write_pgm(trace.attacked))
    print(f"b {int(trace.b)} b_tilde {int(trace.b_tilde)} action {trace.action.value}")
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    marked = pnm_io.read_pgm(_read(args.watermarked))
    dims = (args.rows, args.cols)
    if args.mode == "informed":
        if not args.reference or (args.checkbit is None and args.b is None):
            raise _Usage("informed extraction needs --reference and --checkbit or --b")
        reference = pnm_io.read_pgm(_read(args.reference))
        b = args.b if args.b is not None else pnm_io.read_check_bit(_read(args.checkbit))
        bits = extract_informed(marked, reference, b, dims)
    else:
        bits = extract_blind_parity(marked, dims)
    _write(args.out, pnm_io.write_pbm(bits))
    return EXIT_OK


def cmd_verify_paper(args: argparse.Namespace) -> int:
    if args.scenario:
        scenario = pnm_io.read_scenario(_read(args.scenario))
        custom = True
    else:
        scenario = builtin_paper_scenario()
        custom = False
    compare = not custom or args.expect_paper
    report = run_counterexample(scenario, compare_with_paper=compare)
    sys.stdout.write(pnm_io.format_counterexample_report(report))
    if not compare:
        return EXIT_OK
    flags = report.paper_match or paper_match_flags(report)
    ok = all(flags.values()) and report.verdict.verdict is Verdict.ORIGINAL_SURVIVES
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_sweep(args: argparse.Namespace) -> int:
    fix = {}
    if args.fix_all_but or args.fix:
        base = pnm_io.read_scenario(_read(args.scenario)) if args.scenario else builtin_paper_scenario()
        if args.fix_all_but and args.fix:
            raise _Usage("use either --fix or --fix-all-but, not both")
        if args.fix_all_but:
            fix = fix_all_but(base, *args.fix_all_but)
        else:
            fix = {name: getattr(base, name) for name in args.fix}
    wm_shape = (args.wm_rows or args.height, args.wm_cols or args.width)
    report = exhaustive_sweep(
        args.width, args.height, args.depth, EmbedRule(args.rule), fix, wm_shape=wm_shape, workers=args.workers
    )
    sys.stdout.write(pnm_io.format_sweep_report(report))
    return EXIT_OK


def cmd_theorem(args: argparse.Namespace) -> int:
    wm_shape = (args.wm_rows or args.height, args.wm_cols or args.width)
    result = verify_attack_outcome_theorem(
        args.width, args.height, args.depth, EmbedRule(args.rule), wm_shape=wm_shape, workers=args.workers
    )
    print(f"holds {'true' if result.holds else 'false'}")
    print(f"instances {result.instances}")
    if result.counterexample is not None:
        c = result.counterexample
        for key in ("host", "watermark", "attacker_host", "expected", "extracted"):
            print(f"counterexample.{key} {pnm_io.format_grid(getattr(c, key))}")
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parity-wm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    rules = [r.value for r in EmbedRule]

    p = sub.add_parser("embed", help="embed a PBM watermark into a PGM host")
    p.add_argument("--host", required=True)
    p.add_argument("--watermark", required=True)
    p.add_argument("--rule", choices=rules, default="complement")
    p.add_argument("--out", required=True)
    p.add_argument("--emit-checkbit", metavar="PATH")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("attack", help="run the three-step parity attack")
    p.add_argument("--target", required=True)
    p.add_argument("--original-host", required=True)
    p.add_argument("--attacker-host", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("extract", help="recover a watermark as PBM")
    p.add_argument("--mode", choices=["informed", "blind"], required=True)
    p.add_argument("--watermarked", required=True)
    p.add_argument("--reference", help="original host (informed mode)")
    p.add_argument("--checkbit", help="check-bit file written by embed (informed mode)")
    p.add_argument("--b", type=int, choices=[0, 1], help="check bit given inline")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify-paper", help="reproduce the published counterexample")
    p.add_argument("--scenario", help="scenario v1 file instead of the builtin one")
    p.add_argument(
        "--expect-paper",
        action="store_true",
        help="require a custom scenario to reproduce the published values",
    )
    p.set_defaults(func=cmd_verify_paper)

    for name, func, help_ in (
        ("sweep", cmd_sweep, "tally attack verdicts over a small domain"),
        ("theorem", cmd_theorem, "check the attack-outcome theorem exhaustively"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--width", type=int, required=True)
        p.add_argument("--height", type=int, required=True)
        p.add_argument("--depth", type=int, required=True)
        p.add_argument("--rule", choices=rules, default="complement")
        p.add_argument("--wm-rows", type=int)
        p.add_argument("--wm-cols", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=func)
        if name == "sweep":
            p.add_argument("--scenario", help="source of fixed components (default: builtin)")
            p.add_argument("--fix", action="append", choices=COMPONENTS, default=[])
            p.add_argument("--fix-all-but", action="append", choices=COMPONENTS, default=[])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, FormatError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
