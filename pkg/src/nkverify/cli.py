"""Command-line entry point.

Exit codes: 0 all checks passed, 2 at least one check or certificate failed,
1 configuration or runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from nkverify.errors import ConfigError, NKVerifyError
from nkverify.report import (
    canonical_json,
    emit_report,
    load_config,
    run_certify_tamed,
    run_nijenhuis_baseline,
    run_verify_nk,
    validate_report,
)

log = logging.getLogger("nkverify")

RUNNERS = {
    "verify-nk": run_verify_nk,
    "certify-tamed": run_certify_tamed,
    "nijenhuis-baseline": run_nijenhuis_baseline,
}


def _tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r}: {value!r} is not a number") from None


def _rotation(text: str):
    if text in ("identity", "random"):
        return text
    try:
        return json.loads(Path(text).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(f"rotation: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nkverify", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("verify-nk", "check the nearly Kaehler conditions and measure lambda"),
        ("certify-tamed", "certify non-integrability of sampled tamed structures"),
        ("nijenhuis-baseline", "measure |N| of the nearly Kaehler J (floor calibration)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, help="JSON config file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int, help="tamed fields, or rotated structures with --rotation random")
        p.add_argument("--points", type=int, help="points per field or structure")
        p.add_argument("--rho", type=float)
        p.add_argument("--fd-step", dest="fd_step", type=float)
        p.add_argument("--rotation", type=_rotation, help="identity, random, or a JSON file with a 7x7 matrix")
        p.add_argument("--workers", type=int)
        p.add_argument("--json-out", dest="output_path", help="report path (default: stdout)")
        p.add_argument("--tol", action="append", type=_tol, default=[], metavar="NAME=VALUE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = load_config(
            args.config,
            seed=args.seed,
            samples=args.samples,
            points=args.points,
            rho=args.rho,
            fd_step=args.fd_step,
            rotation=args.rotation,
            workers=args.workers,
            output_path=args.output_path,
            tolerances=dict(args.tol),
        )
        report, code = RUNNERS[args.command](config)
        validate_report(report)
        if config.output_path:
            emit_report(report, config.output_path)
        else:
            sys.stdout.write(canonical_json(report))
        if code == 1:
            for err in report["errors"]:
                print(f"nkverify: sample {err['index']}: {err['error']}: {err['message']}", file=sys.stderr)
            return 1
    except (ConfigError, OSError) as exc:
        print(f"nkverify: error: {exc}", file=sys.stderr)
        return 1
    except NKVerifyError as exc:
        print(f"nkverify: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    summary = report["summary"]
    log.info("summary: %s", {k: v for k, v in summary.items() if not isinstance(v, dict)})
    if code == 2:
        print(f"nkverify: {args.command}: checks FAILED: "
              f"{[k for k, v in report['verdicts']['checks'].items() if not v]}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
