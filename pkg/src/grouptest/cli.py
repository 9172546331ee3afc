"""Command-line front end: subcommands design, decode, simulate, bounds.

Exit codes: 0 on success, 1 on domain or file errors (one-line reason on
stderr), 2 on usage errors (from argparse).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds as bounds_mod
from . import design, sim
from .decode import decode_cbp, decode_comp, decode_ncbp, decode_ncomp
from .errors import GroupTestError
from .model import (
    ResultVector,
    format_bits,
    read_matrix,
    read_vector,
    write_matrix,
)

__all__ = ["main", "build_parser"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grouptest",
        description=(
            "Probabilistic group testing: random pooling designs, decoders, "
            "test-count bounds and Monte Carlo sweeps."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser(
        "design",
        help="generate a pooling matrix and print its design parameters",
    )
    p_design.add_argument("--algo", required=True, choices=design.ALGORITHMS)
    p_design.add_argument("--n", type=int, required=True, help="number of items")
    p_design.add_argument("--d", type=int, required=True, help="number of defectives")
    p_design.add_argument("--delta", type=float, default=1.0, help="error exponent (default 1)")
    p_design.add_argument("--q", type=float, default=None, help="flip probability (required for ncbp/ncomp)")
    p_design.add_argument("--T", type=int, default=None, help="override the test count")
    p_design.add_argument("--g", type=int, default=None, help="override the per-test group size (cbp/ncbp)")
    p_design.add_argument("--p", type=float, default=None, help="override the Bernoulli density (comp/ncomp)")
    p_design.add_argument("--K", type=int, default=None, help="override the repetition factor (ncbp)")
    p_design.add_argument("--alpha", type=float, default=None, help="override the density scale (ncomp)")
    p_design.add_argument("--Delta", type=float, default=None, help="override the threshold slack (ncomp)")
    p_design.add_argument("--seed", type=int, default=0)
    p_design.add_argument("--out", default=None, help="write the matrix to this path (text format)")

    p_decode = sub.add_parser("decode", help="decode a results file against a matrix file")
    p_decode.add_argument("--algo", required=True, choices=design.ALGORITHMS)
    p_decode.add_argument("--matrix", required=True, help="matrix file (text format)")
    p_decode.add_argument("--results", required=True, help="observed 0/1 outcome line")
    p_decode.add_argument("--q", type=float, default=None, help="flip probability (required for ncomp)")
    p_decode.add_argument("--Delta", type=float, default=None, help="threshold slack (required for ncomp)")
    p_decode.add_argument("--K", type=int, default=None, help="repetition factor (required for ncbp)")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo sweep and emit CSV")
    p_sim.add_argument("--config", default=None, help="key=value config file")
    p_sim.add_argument("--algo", default=None, choices=design.ALGORITHMS)
    p_sim.add_argument("--n", type=int, default=None)
    p_sim.add_argument("--d", type=int, default=None)
    p_sim.add_argument("--q", default=None, help="comma-separated flip probabilities, e.g. 0,0.05,0.1")
    p_sim.add_argument("--T", default=None, help="comma-separated test counts or start:stop:step")
    p_sim.add_argument("--trials", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--delta", type=float, default=None)
    p_sim.add_argument("--g", type=int, default=None)
    p_sim.add_argument("--p", type=float, default=None)
    p_sim.add_argument("--K", type=int, default=None)
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--Delta", type=float, default=None)
    p_sim.add_argument("--time-budget", type=float, default=None, help="wall-clock cap per cell, seconds")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--out", default=None, help="CSV path (default: standard output)")

    p_bounds = sub.add_parser("bounds", help="print lower/upper test-count bounds")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--d", type=int, required=True)
    p_bounds.add_argument("--eps", type=float, default=None, help="acceptable error probability for the lower bounds")
    p_bounds.add_argument("--delta", type=float, default=None, help="error exponent for the upper bounds")
    p_bounds.add_argument("--q", type=float, default=None, help="flip probability for the noisy bounds")

    return parser


def cmd_design(args) -> int:
    if args.algo in ("ncbp", "ncomp") and args.q is None:
        raise _usage_error(f"--q is required for --algo {args.algo}")
    rng = np.random.Generator(np.random.Philox(key=args.seed))
    lines: list[tuple[str, object]] = []
    if args.algo == "comp":
        params = design.comp_params(args.n, args.d, args.delta)
        density = args.p if args.p is not None else params.density
        tests = args.T if args.T is not None else params.tests
        lines = [("T", tests), ("p", density), ("beta", params.test_coefficient)]
        matrix = design.bernoulli_matrix(args.n, tests, density, rng)
    elif args.algo == "cbp":
        group_size = args.g if args.g is not None else design.cbp_group_size(args.n, args.d)
        tests = args.T if args.T is not None else design.cbp_test_count(args.n, args.d, args.delta)
        coefficient = 2.0 * (1.0 + args.delta) * math.e
        lines = [("T", tests), ("g", group_size), ("beta", coefficient)]
        matrix = design.cbp_matrix(args.n, tests, group_size, rng)
    elif args.algo == "ncbp":
        group_size = args.g if args.g is not None else design.cbp_group_size(args.n, args.d)
        repetition = (
            args.K
            if args.K is not None
            else design.ncbp_repetition(args.n, args.d, args.delta, args.q)
        )
        base_tests = design.cbp_test_count(args.n, args.d, args.delta)
        if args.T is not None:
            repetition = min(repetition, args.T)
            base_tests = max(1, args.T // repetition)
        total = base_tests * repetition
        coefficient = 2.0 * (1.0 + args.delta) * math.e * repetition
        lines = [("T", total), ("g", group_size), ("K", repetition), ("beta", coefficient)]
        base = design.cbp_matrix(args.n, base_tests, group_size, rng)
        matrix = design.ncbp_matrix(base, repetition)
    else:  # ncomp
        params = design.ncomp_params(args.n, args.d, args.delta, args.q)
        scale = args.alpha if args.alpha is not None else params.density_scale
        density = args.p if args.p is not None else scale / args.d
        if args.Delta is not None:
            slack = args.Delta
        elif args.alpha is not None:
            # slack is calibrated to the density scale, so recompute for an override
            slack = design.ncomp_threshold_slack(
                scale, args.q, design.exponent_ratio(args.n, args.d, args.delta)
            )
        else:
            slack = params.threshold_slack
        tests = args.T if args.T is not None else params.tests
        lines = [
            ("T", tests),
            ("p", density),
            ("alpha", scale),
            ("Delta", slack),
            ("beta", params.test_coefficient),
        ]
        matrix = design.bernoulli_matrix(args.n, tests, density, rng)
    for key, value in lines:
        print(f"{key}={_fmt(value)}")
    if args.out is not None:
        try:
            write_matrix(matrix, args.out)
        except OSError as exc:
            raise GroupTestError(f"cannot write matrix to {args.out}: {exc}") from exc
    return 0


def cmd_decode(args) -> int:
    if args.algo == "ncomp" and (args.q is None or args.Delta is None):
        raise _usage_error("--q and --Delta are required for --algo ncomp")
    if args.algo == "ncbp" and args.K is None:
        raise _usage_error("--K is required for --algo ncbp")
    try:
        matrix = read_matrix(args.matrix)
    except OSError as exc:
        raise GroupTestError(f"cannot read matrix {args.matrix}: {exc}") from exc
    try:
        observed = ResultVector(read_vector(args.results))
    except OSError as exc:
        raise GroupTestError(f"cannot read results {args.results}: {exc}") from exc
    if args.algo == "cbp":
        report = decode_cbp(matrix, observed)
    elif args.algo == "comp":
        report = decode_comp(matrix, observed)
    elif args.algo == "ncbp":
        report = decode_ncbp(matrix, observed, args.K)
    else:
        report = decode_ncomp(matrix, observed, args.q, args.Delta)
    sys.stdout.write(format_bits(report.estimate.bits))
    flagged = np.flatnonzero(report.never_tested)
    if flagged.size:
        print(
            "never-tested items: " + " ".join(str(j) for j in flagged),
            file=sys.stderr,
        )
    return 0


_SIM_CONFIG_KEYS = {
    "algorithm": ("algo", str),
    "n": ("n", int),
    "d": ("d", int),
    "q": ("q", str),
    "T": ("T", str),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "delta": ("delta", float),
    "g": ("g", int),
    "p": ("p", float),
    "K": ("K", int),
    "alpha": ("alpha", float),
    "Delta": ("Delta", float),
    "time_budget": ("time_budget", float),
}


def _merge_simulate_settings(args) -> dict:
    """Config file first, CLI flags win; conflicts are noted on stderr."""
    settings: dict = {}
    if args.config is not None:
        raw = sim.load_config(args.config)
        unknown = set(raw) - set(_SIM_CONFIG_KEYS)
        if unknown:
            raise GroupTestError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        for key, text in raw.items():
            _, coerce = _SIM_CONFIG_KEYS[key]
            try:
                settings[key] = coerce(text)
            except ValueError:
                raise GroupTestError(
                    f"config key {key}: cannot parse {text!r}"
                ) from None
    for key, (flag_name, _) in _SIM_CONFIG_KEYS.items():
        flag_value = getattr(args, flag_name.replace("-", "_"))
        if flag_value is None:
            continue
        if key in settings and settings[key] != flag_value:
            print(
                f"note: flag --{flag_name.replace('_', '-')} overrides "
                f"config {key}={settings[key]}",
                file=sys.stderr,
            )
        settings[key] = flag_value
    return settings


def cmd_simulate(args) -> int:
    settings = _merge_simulate_settings(args)
    missing = [key for key in ("algorithm", "n", "d", "q", "T", "trials") if key not in settings]
    if missing:
        raise _usage_error(
            "missing required simulate settings (flag or config): "
            + ", ".join(missing)
        )
    spec = sim.ExperimentSpec(
        algorithm=settings["algorithm"],
        n=settings["n"],
        d=settings["d"],
        q_values=sim.parse_q_values(str(settings["q"])),
        t_values=sim.parse_t_values(str(settings["T"])),
        trials=settings["trials"],
        seed=settings.get("seed", 0),
        delta=settings.get("delta", 1.0),
        group_size=settings.get("g"),
        density=settings.get("p"),
        repetition=settings.get("K"),
        density_scale=settings.get("alpha"),
        threshold_slack=settings.get("Delta"),
        time_budget=settings.get("time_budget"),
    )
    reports = sim.run_sweep(spec, workers=args.workers)
    if args.out is not None:
        sim.write_csv(reports, args.out)
    else:
        sys.stdout.write(sim.format_csv(reports))
    return 0


def cmd_bounds(args) -> int:
    if args.eps is None and args.delta is None:
        raise _usage_error("at least one of --eps or --delta is required")
    rows: list[tuple[str, str]] = [
        ("n", str(args.n)),
        ("d", str(args.d)),
    ]
    if args.eps is not None:
        eps = args.eps
        rows.append(("eps", _fmt(float(eps))))
    else:
        eps = float(args.n) ** (-args.delta)
        rows.append(("eps", f"{_fmt(eps)} (= n^-delta)"))
    if args.q is not None:
        rows.append(("q", _fmt(float(args.q))))
    rows.append(("lower_noiseless", _fmt(bounds_mod.noiseless_lower_bound(args.n, args.d, eps))))
    if args.q is not None:
        rows.append(("lower_noisy", _fmt(bounds_mod.noisy_lower_bound(args.n, args.d, eps, args.q))))
    else:
        rows.append(("lower_noisy", "(needs --q)"))
    if args.delta is not None:
        report = bounds_mod.upper_bounds(args.n, args.d, args.delta, args.q)
        rows.append(("upper_cbp", _fmt(report.upper_cbp)))
        rows.append(("upper_comp", _fmt(report.upper_comp)))
        if report.upper_ncbp is not None:
            rows.append(("upper_ncbp", _fmt(report.upper_ncbp)))
        else:
            rows.append(("upper_ncbp", "(needs --q)"))
        if report.upper_ncomp is not None:
            rows.append(("upper_ncomp", _fmt(report.upper_ncomp)))
        elif args.q == 0.0:
            rows.append(("upper_ncomp", "(q=0: use comp)"))
        else:
            rows.append(("upper_ncomp", "(needs --q)"))
    else:
        rows.append(("upper_bounds", "(need --delta)"))
    width = max(len(key) for key, _ in rows)
    for key, value in rows:
        print(f"{key.ljust(width)} = {value}")
    return 0


class _UsageError(Exception):
    pass


def _usage_error(message: str) -> _UsageError:
    return _UsageError(message)


_COMMANDS = {
    "design": cmd_design,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.error(str(exc))  # prints usage and exits 2
        raise AssertionError("unreachable")
    except GroupTestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
