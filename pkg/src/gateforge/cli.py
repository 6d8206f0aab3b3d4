"""``gateforge <command> --spec FILE [--out FILE] [--steps N] [--tolerance X]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import SpecValidationError
from .jobs import COMMANDS, EXIT_INPUT, error_payload, render_report, run_job, validate_spec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gateforge",
        description="Synthesize and check NOT-gate interaction Hamiltonians.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--spec", type=Path, required=True, help="JSON job spec")
    parser.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    parser.add_argument("--steps", type=int, default=None, help="time slices for evolve")
    parser.add_argument("--tolerance", type=float, default=None, help="pass/fail threshold")
    return parser


def _load(path: Path):
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError([(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)]) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    try:
        document = _load(args.spec)
        if isinstance(document, dict):
            document["command"] = args.command
            if args.steps is not None:
                document["steps"] = args.steps
            if args.tolerance is not None:
                document["tolerance"] = args.tolerance
        spec = validate_spec(document)
    except (OSError, SpecValidationError) as exc:
        print(f"gateforge: {exc}", file=sys.stderr)
        report = {"status": "error", "error": error_payload(exc)}
        _emit(render_report(report), out)
        return EXIT_INPUT

    if out is None and spec.output_path is not None:
        out = Path(spec.output_path)
    code, report = run_job(spec)
    if code == EXIT_INPUT:
        err = report["error"]
        print(f"gateforge: {err['type']}: {err['message']}", file=sys.stderr)
    _emit(render_report(report), out)
    return code


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
