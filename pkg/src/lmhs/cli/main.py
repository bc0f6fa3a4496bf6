"""lmhs command line.

    lmhs cicy --all
    lmhs constants gamma1 nu --cutoffs 2^8..2^13
    lmhs verify d3 --table
    lmhs asymptotics --d 1 --t-min 1e-9 --t-max 1e-4 --samples 8 --fix-leading
    lmhs recognize --value -7.2123414 --err 1e-9 --base zeta3

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
configuration or usage error.  Configuration is read from a flat
``key = value`` file (--config or LMHS_CONFIG), then LMHS_* environment
variables, then flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError, LmhsError, NotCalabiYau, UnknownGeometry
from . import suites
from .config import load_config, parse_ladder
from .report import combine

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--tolerance", type=float, help="override every suite tolerance")
    p.add_argument("--cutoffs", help="series cutoff ladder, e.g. 256,512,1024 or 2^8..2^14")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output_format", action="store_const", const="json")
    fmt.add_argument("--table", dest="output_format", action="store_const", const="table")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmhs", description="Limiting period data and zeta-value identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cicy", help="Chern data and limiting period matrices of complete intersections")
    _common(p)
    p.add_argument("names", nargs="*", help="table names such as P4[5]")
    p.add_argument("--all", action="store_true")
    p.add_argument("--weights", help="comma-separated weights")
    p.add_argument("--degrees", help="comma-separated degrees")

    p = sub.add_parser("constants", help="gamma_n, gamma~_n and the multi-index constants")
    _common(p)
    p.add_argument("names", nargs="*", help="gamma1..gamma6, gamma_tilde0..3, beta, delta, psi, nu, nu_prime, or all")

    p = sub.add_parser("verify", help="run a verification suite")
    _common(p)
    p.add_argument("suite", choices=suites.SUITES + ("all",))

    p = sub.add_parser("asymptotics", help="log-polynomial asymptotics of the period near t = 0")
    _common(p)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--t-min", default="1e-9")
    p.add_argument("--t-max", default="1e-4")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--fix-leading", action="store_true")

    p = sub.add_parser("recognize", help="recognize value ~ (p/q) * base")
    _common(p)
    p.add_argument("--value", required=True)
    p.add_argument("--err", default="0")
    p.add_argument("--base", default="1")
    p.add_argument("--max-den", type=int, default=1000)
    return parser


def _config(args):
    overrides = {}
    if args.precision_bits is not None:
        overrides["precision_bits"] = args.precision_bits
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    if args.cutoffs is not None:
        overrides["cutoffs"] = parse_ladder(args.cutoffs)
    if args.out is not None:
        overrides["out"] = args.out
    if args.output_format is not None:
        overrides["output_format"] = args.output_format
    return load_config(args.config, overrides=overrides)


def _ints(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def run(args) -> list:
    cfg = _config(args)
    if args.command == "cicy":
        if args.weights or args.degrees:
            if not (args.weights and args.degrees):
                raise ConfigError("--weights and --degrees go together")
            return [suites.cicy_suite(cfg, weights=_ints(args.weights), degrees=_ints(args.degrees))]
        names = None if args.all or not args.names else args.names
        return [suites.cicy_suite(cfg, names=names or (cfg.geometry.split(",") if cfg.geometry else None))]
    if args.command == "constants":
        names = list(args.names)
        if names == ["all"]:
            names = list(suites.GAMMA_NAMES) + sorted(suites.NAMED_SPECS)
        return [suites.constants_suite(cfg, names)]
    if args.command == "verify":
        chosen = suites.SUITES if args.suite == "all" else (args.suite,)
        return [suites.VERIFY[name](cfg) for name in chosen]
    if args.command == "asymptotics":
        if not 1 <= args.d <= 6:
            raise ConfigError("--d must be between 1 and 6")
        return [suites.asymptotics_suite(cfg, args.d, args.t_min, args.t_max, args.samples, args.fix_leading)]
    if args.command == "recognize":
        return [suites.recognize_suite(cfg, args.value, args.err, args.base, args.max_den)]
    raise ConfigError(f"unknown command {args.command}")


def emit(reports: list, fmt: str, out: str | None) -> None:
    if fmt == "table":
        text = "".join(r.table() for r in reports)
    elif len(reports) == 1:
        text = reports[0].dumps()
    else:
        text = json.dumps(combine(reports), indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        reports = run(args)
    except (ConfigError, UnknownGeometry, NotCalabiYau, KeyError) as exc:
        print(f"lmhs: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LmhsError as exc:
        print(f"lmhs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    emit(reports, cfg.output_format, cfg.out)
    for r in reports:
        for c in r.failures():
            print(f"FAIL {r.suite}/{c.id} [{c.anchor}] {c.note}".rstrip(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
