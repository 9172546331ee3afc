"""Monte Carlo harness: draw instance, design matrix, measure, corrupt, decode, score.

A sweep runs one cell per (q, T) combination. Every trial inside a cell
draws a fresh input vector, a fresh matrix and fresh noise, so the measured
error probability averages over all three sources of randomness. Success
means exact support recovery; per-item false positives and negatives are
aggregated as diagnostics only.

Reproducibility: each trial uses a counter-based stream seeded as
(master seed, cell index, trial index), so results are bit-identical for
any worker count or scheduling order.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import design
from .decode import decode_cbp, decode_comp, decode_ncbp, decode_ncomp
from .errors import GroupTestError, InvalidInstanceError, InvalidNoiseError
from .model import InputVector, NoiseChannel, apply_noise, noiseless_outcome

__all__ = [
    "ExperimentSpec",
    "TrialReport",
    "CSV_HEADER",
    "run_cell",
    "run_sweep",
    "format_csv",
    "write_csv",
    "load_config",
    "parse_q_values",
    "parse_t_values",
]

CSV_HEADER = (
    "algorithm,n,d,q,T,trials,successes,success_rate,"
    "false_pos_total,false_neg_total,seed"
)


@dataclass(frozen=True)
class ExperimentSpec:
    """A full sweep description: one cell per (q, T) pair.

    Optional knobs fall back to the design module's closed-form defaults,
    resolved per cell. ``time_budget`` is a wall-clock cap in seconds per
    cell; None (the default) never truncates, keeping sweeps bit-reproducible.
    """

    algorithm: str
    n: int
    d: int
    q_values: tuple[float, ...]
    t_values: tuple[int, ...]
    trials: int
    seed: int = 0
    delta: float = 1.0
    group_size: int | None = None
    density: float | None = None
    repetition: int | None = None
    density_scale: float | None = None
    threshold_slack: float | None = None
    time_budget: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "q_values", tuple(float(q) for q in self.q_values))
        object.__setattr__(self, "t_values", tuple(int(t) for t in self.t_values))
        if self.algorithm not in design.ALGORITHMS:
            raise InvalidInstanceError(
                f"unknown algorithm {self.algorithm!r}; expected one of {design.ALGORITHMS}"
            )
        if self.d < 1 or self.d >= self.n:
            raise InvalidInstanceError(f"need 1 <= d < n, got d={self.d}, n={self.n}")
        if not self.q_values:
            raise InvalidInstanceError("at least one q value is required")
        for q in self.q_values:
            if not 0.0 <= q < 0.5:
                raise InvalidNoiseError(
                    f"flip probability must lie in [0, 0.5), got {q}"
                )
        if not self.t_values:
            raise InvalidInstanceError("at least one T value is required")
        for t in self.t_values:
            if t < 1:
                raise InvalidInstanceError(f"test counts must be >= 1, got {t}")
        if self.trials < 1:
            raise InvalidInstanceError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise InvalidInstanceError(f"seed must be nonnegative, got {self.seed}")
        if self.delta < 0:
            raise InvalidInstanceError(
                f"error exponent must be nonnegative, got {self.delta}"
            )
        if self.group_size is not None and self.group_size < 1:
            raise InvalidInstanceError(
                f"group size must be >= 1, got {self.group_size}"
            )
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise InvalidInstanceError(
                f"test density must lie in (0, 1], got {self.density}"
            )
        if self.repetition is not None and self.repetition < 1:
            raise InvalidInstanceError(
                f"repetition factor must be >= 1, got {self.repetition}"
            )
        if self.density_scale is not None and self.density_scale <= 0:
            raise InvalidInstanceError(
                f"density scale must be positive, got {self.density_scale}"
            )
        if self.threshold_slack is not None and self.threshold_slack < 0:
            raise InvalidInstanceError(
                f"threshold slack must be nonnegative, got {self.threshold_slack}"
            )
        if self.time_budget is not None and self.time_budget <= 0:
            raise InvalidInstanceError(
                f"time budget must be positive seconds, got {self.time_budget}"
            )

    def cells(self) -> list[tuple[float, int]]:
        """(q, T) combinations in deterministic sweep order: q outer, T inner."""
        return [(q, t) for q in self.q_values for t in self.t_values]


@dataclass(frozen=True)
class TrialReport:
    """Aggregated outcome of one sweep cell."""

    algorithm: str
    n: int
    d: int
    q: float
    tests: int
    trials: int
    successes: int
    false_pos_total: int
    false_neg_total: int
    seed: int
    wall_time: float
    truncated: bool = False

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class _CellParams:
    group_size: int | None = None
    density: float | None = None
    repetition: int | None = None
    base_rows: int | None = None
    threshold_slack: float | None = None


def _resolve_cell(spec: ExperimentSpec, q: float, tests: int) -> _CellParams:
    algo = spec.algorithm
    scale = (
        spec.density_scale
        if spec.density_scale is not None
        else design.NCOMP_DENSITY_SCALE
    )
    if algo == "cbp":
        return _CellParams(
            group_size=spec.group_size
            if spec.group_size is not None
            else design.cbp_group_size(spec.n, spec.d)
        )
    if algo == "comp":
        density = spec.density
        if density is None:
            density = (
                spec.density_scale / spec.d if spec.density_scale is not None else 1.0 / spec.d
            )
        return _CellParams(density=density)
    if algo == "ncbp":
        group_size = (
            spec.group_size
            if spec.group_size is not None
            else design.cbp_group_size(spec.n, spec.d)
        )
        repetition = (
            spec.repetition
            if spec.repetition is not None
            else design.ncbp_repetition(spec.n, spec.d, spec.delta, q)
        )
        # The T budget buys base_rows groups of repetition votes each; a small
        # budget shrinks the vote count before the number of distinct tests.
        repetition = min(repetition, tests)
        return _CellParams(
            group_size=group_size,
            repetition=repetition,
            base_rows=max(1, tests // repetition),
        )
    # ncomp: at q = 0 the calibrated slack is undefined; slack 0 makes the
    # threshold exact containment, the natural noiseless specialisation.
    slack = spec.threshold_slack
    if slack is None:
        if q > 0:
            slack = design.ncomp_threshold_slack(
                scale, q, design.exponent_ratio(spec.n, spec.d, spec.delta)
            )
        else:
            slack = 0.0
    density = spec.density if spec.density is not None else scale / spec.d
    return _CellParams(density=density, threshold_slack=slack)


def _trial_rng(seed: int, cell_index: int, trial: int) -> np.random.Generator:
    # Counter-based stream: (seed, cell, trial) fully determine the draws,
    # independent of how trials are scheduled across workers.
    return np.random.Generator(
        np.random.Philox(key=seed, counter=[0, 0, cell_index, trial])
    )


def run_cell(
    spec: ExperimentSpec,
    q: float,
    tests: int,
    cell_index: int,
    on_trial=None,
) -> TrialReport:
    """Run one (q, T) cell of the sweep.

    ``on_trial(trial_index, x, estimate)`` is invoked after each trial when
    given, for audits. Reports the requested T; for the repeated design the
    materialised matrix has base_rows * repetition <= T observed tests.
    """
    cell = _resolve_cell(spec, q, tests)
    algo = spec.algorithm
    n, d = spec.n, spec.d
    channel = NoiseChannel(q) if q > 0 else None
    successes = 0
    fp_total = 0
    fn_total = 0
    completed = 0
    truncated = False
    start = time.perf_counter()
    for trial in range(spec.trials):
        rng = _trial_rng(spec.seed, cell_index, trial)
        x = InputVector(n, rng.choice(n, size=d, replace=False))
        if algo == "cbp":
            matrix = design.cbp_matrix(n, tests, cell.group_size, rng)
        elif algo == "comp" or algo == "ncomp":
            matrix = design.bernoulli_matrix(n, tests, cell.density, rng)
        else:  # ncbp
            base = design.cbp_matrix(n, cell.base_rows, cell.group_size, rng)
            matrix = design.ncbp_matrix(base, cell.repetition)
        y = noiseless_outcome(matrix, x)
        if channel is not None:
            y, _ = apply_noise(y, channel, rng)
        if algo == "cbp":
            report = decode_cbp(matrix, y)
        elif algo == "comp":
            report = decode_comp(matrix, y)
        elif algo == "ncbp":
            report = decode_ncbp(base, y, cell.repetition)
        else:
            report = decode_ncomp(matrix, y, q, cell.threshold_slack)
        estimate = report.estimate
        truth = x.to_bits()
        fp = int(np.count_nonzero(estimate.bits & ~truth))
        fn = int(np.count_nonzero(truth & ~estimate.bits))
        successes += fp == 0 and fn == 0
        fp_total += fp
        fn_total += fn
        completed += 1
        if on_trial is not None:
            on_trial(trial, x, estimate)
        if (
            spec.time_budget is not None
            and completed < spec.trials
            and time.perf_counter() - start >= spec.time_budget
        ):
            truncated = True
            warnings.warn(
                f"cell (q={q}, T={tests}) hit its {spec.time_budget} s budget "
                f"after {completed} of {spec.trials} trials; results are "
                "under-sampled",
                RuntimeWarning,
                stacklevel=2,
            )
            break
    return TrialReport(
        algorithm=algo,
        n=n,
        d=d,
        q=q,
        tests=tests,
        trials=completed,
        successes=successes,
        false_pos_total=fp_total,
        false_neg_total=fn_total,
        seed=spec.seed,
        wall_time=time.perf_counter() - start,
        truncated=truncated,
    )


def _run_cell_star(args: tuple[ExperimentSpec, float, int, int]) -> TrialReport:
    return run_cell(*args)


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> list[TrialReport]:
    """Run every (q, T) cell; cell order (and thus CSV order) is deterministic."""
    if workers < 1:
        raise InvalidInstanceError(f"worker count must be >= 1, got {workers}")
    tasks = [
        (spec, q, tests, index) for index, (q, tests) in enumerate(spec.cells())
    ]
    if workers == 1 or len(tasks) == 1:
        return [run_cell(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell_star, tasks))


def _decimal(value: float) -> str:
    """Decimal literal without an exponent, for the CSV columns."""
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(float(value), ".17f").rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def format_csv(reports) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.algorithm},{r.n},{r.d},{_decimal(r.q)},{r.tests},{r.trials},"
            f"{r.successes},{_decimal(r.success_rate)},{r.false_pos_total},"
            f"{r.false_neg_total},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def write_csv(reports, path) -> None:
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(format_csv(reports))
    except OSError as exc:
        raise GroupTestError(f"cannot write CSV to {path}: {exc}") from exc


# --- config files ------------------------------------------------------------
#
# Plain key=value lines, # starts a comment. Keys mirror the simulate CLI
# flags: algorithm, n, d, q, T, trials, seed, delta, g, p, K, alpha, Delta,
# time_budget.


def parse_q_values(text: str) -> tuple[float, ...]:
    """Comma-separated flip probabilities, e.g. '0,0.05,0.1'."""
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise GroupTestError(f"cannot parse q values from {text!r}") from None


def parse_t_values(text: str) -> tuple[int, ...]:
    """Comma-separated test counts, or a start:stop:step range (stop excluded)."""
    try:
        if ":" in text:
            start, stop, step = (int(part) for part in text.split(":"))
            return tuple(range(start, stop, step))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise GroupTestError(f"cannot parse T values from {text!r}") from None


def load_config(path) -> dict[str, str]:
    """Read a key=value config file; later lines win over earlier ones."""
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise GroupTestError(
                        f"{path}: line {lineno}: expected key=value, got {raw.strip()!r}"
                    )
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise GroupTestError(f"cannot read config {path}: {exc}") from exc
    return values
