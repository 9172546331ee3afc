"""Command-line entry point: plotgen <csv...> --out figure.png [--markers file].

Exit codes: 0 on success, 1 on file or schema errors (one-line reason on
stderr), 2 on usage errors (from argparse).
"""

from __future__ import annotations

import argparse
import sys
import warnings

from .render import PlotGenError, PlotSpec, render

__all__ = ["main", "build_parser", "parse_markers"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description=(
            "Draw success-rate-vs-test-count curves from sweep CSV files, "
            "one curve per (algorithm, q) group."
        ),
    )
    parser.add_argument("csvs", nargs="+", help="sweep CSV files")
    parser.add_argument(
        "--out",
        required=True,
        help="output image path (format taken from the extension)",
    )
    parser.add_argument(
        "--markers",
        default=None,
        help=(
            "key=value file; each numeric value draws a labeled vertical "
            "line (non-numeric values are skipped with a warning)"
        ),
    )
    return parser


def parse_markers(path) -> dict[str, float]:
    """Read a key=value file into vertical-marker positions.

    Tolerates spaces around '=', blank lines and # comments, and skips
    entries whose value is not a number — so the output of the bounds
    command can be used directly.
    """
    try:
        with open(path, encoding="ascii") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise PlotGenError(f"cannot read markers file {path}: {exc}") from exc
    markers: dict[str, float] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise PlotGenError(
                f"markers file {path} line {lineno}: expected key=value, "
                f"got {raw.strip()!r}"
            )
        key = key.strip()
        value = value.strip()
        try:
            markers[key] = float(value)
        except ValueError:
            warnings.warn(
                f"markers file {path} line {lineno}: skipping non-numeric "
                f"value for {key}: {value!r}",
                stacklevel=2,
            )
    return markers


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        markers = parse_markers(args.markers) if args.markers else {}
        spec = PlotSpec(
            csv_paths=tuple(args.csvs),
            out_path=args.out,
            markers=markers,
        )
        render(spec)
    except PlotGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
