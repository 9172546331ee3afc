"""Figure generation for group-testing sweep results.

Reads the sweep CSV schema produced by the ``grouptest simulate`` command
and draws success probability against the number of tests, one curve per
(algorithm, q) group. This layer only displays what is in the file; it
never recomputes statistics.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

from matplotlib.figure import Figure

__all__ = [
    "KNOWN_COLUMNS",
    "REQUIRED_COLUMNS",
    "PlotGenError",
    "MissingColumnError",
    "PlotSpec",
    "load_rows",
    "group_series",
    "render",
]

# the full sweep schema; anything else in a header is ignored with a warning
KNOWN_COLUMNS = (
    "algorithm",
    "n",
    "d",
    "q",
    "T",
    "trials",
    "successes",
    "success_rate",
    "false_pos_total",
    "false_neg_total",
    "seed",
)

# the columns the figure actually consumes
REQUIRED_COLUMNS = ("algorithm", "q", "T", "success_rate")


class PlotGenError(Exception):
    """Base class for all errors raised by this package."""


class MissingColumnError(PlotGenError):
    """The CSV header lacks one or more required columns."""

    def __init__(self, path, columns) -> None:
        self.path = str(path)
        self.columns = tuple(columns)
        super().__init__(
            f"{self.path}: missing required columns: {', '.join(self.columns)}"
        )


@dataclass(frozen=True)
class PlotSpec:
    """What to plot: input files, grouping, optional markers, output path."""

    csv_paths: tuple[str, ...]
    out_path: str | None = None
    group_by: tuple[str, ...] = ("algorithm", "q")
    markers: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.csv_paths:
            raise PlotGenError("at least one CSV path is required")
        if not self.group_by:
            raise PlotGenError("at least one group-by column is required")


def load_rows(path, required=REQUIRED_COLUMNS) -> list[dict]:
    """Read one CSV file as dict rows, validating its header."""
    try:
        handle = open(path, newline="", encoding="ascii")
    except OSError as exc:
        raise PlotGenError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise PlotGenError(f"{path}: empty file, expected a CSV header")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise MissingColumnError(path, missing)
        unknown = [c for c in reader.fieldnames if c not in KNOWN_COLUMNS]
        if unknown:
            warnings.warn(
                f"{path}: ignoring unknown columns: {', '.join(unknown)}",
                stacklevel=2,
            )
        rows = list(reader)
    if not rows:
        warnings.warn(f"{path}: no data rows", stacklevel=2)
    return rows


def group_series(rows, group_by=("algorithm", "q")) -> dict:
    """Group rows by the given columns into (T, success_rate) point lists.

    Points within a group come back sorted by T; the sort is stable, so
    rows sharing a T keep their file order.
    """
    groups: dict[tuple[str, ...], list[tuple[float, float]]] = {}
    for row in rows:
        key = tuple(row[column] for column in group_by)
        try:
            point = (float(row["T"]), float(row["success_rate"]))
        except (TypeError, ValueError):
            raise PlotGenError(
                f"non-numeric T or success_rate in row {row}"
            ) from None
        groups.setdefault(key, []).append(point)
    for points in groups.values():
        points.sort(key=lambda p: p[0])
    return groups


def _sort_token(value: str):
    # numeric values sort numerically, everything else lexically after them
    try:
        return (0, float(value), "")
    except ValueError:
        return (1, 0.0, value)


def render(spec: PlotSpec) -> Figure:
    """Draw the figure described by ``spec`` and save it if asked to.

    Every data curve carries gid "data" and every marker line gid "marker",
    so the plotted series can be read back off the Axes programmatically.
    """
    rows: list[dict] = []
    required = tuple(dict.fromkeys(REQUIRED_COLUMNS + tuple(spec.group_by)))
    for path in spec.csv_paths:
        rows.extend(load_rows(path, required))
    groups = group_series(rows, spec.group_by)

    # with a single algorithm in play, move its name from every legend
    # entry into the title
    title = None
    hidden = None
    if "algorithm" in spec.group_by and len(spec.group_by) > 1:
        position = spec.group_by.index("algorithm")
        algorithms = {key[position] for key in groups}
        if len(algorithms) == 1:
            hidden = position
            title = next(iter(algorithms))

    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    ordered = sorted(groups, key=lambda key: tuple(_sort_token(v) for v in key))
    for key in ordered:
        points = groups[key]
        if not points:
            warnings.warn(f"skipping empty group {key}", stacklevel=2)
            continue
        parts = [
            value if column == "algorithm" else f"{column}={value}"
            for position, (column, value) in enumerate(zip(spec.group_by, key))
            if position != hidden
        ]
        ax.plot(
            [t for t, _ in points],
            [rate for _, rate in points],
            marker="o",
            label=" ".join(parts),
            gid="data",
        )
    for name in sorted(spec.markers):
        ax.axvline(
            spec.markers[name],
            linestyle="--",
            color="gray",
            label=name,
            gid="marker",
        )
    ax.set_xlabel("number of tests")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    if groups or spec.markers:
        ax.legend()
    if spec.out_path is not None:
        try:
            fig.savefig(spec.out_path)
        except OSError as exc:
            raise PlotGenError(f"cannot write {spec.out_path}: {exc}") from exc
    return fig
