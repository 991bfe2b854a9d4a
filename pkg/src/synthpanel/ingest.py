"""Counts CSV and run-config parsing, and panel validation against a treatment spec."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .panel import (
    DEFAULT_OCCUPANCY,
    DEFAULT_SEASON,
    Panel,
    TreatmentSpec,
    ValidationError,
    build_panel,
    split_periods,
)

CSV_HEADER = ("unit", "year", "month", "value")


def parse_counts_csv(stream: TextIO | str) -> list[tuple[str, int, int, float]]:
    """Read ``unit,year,month,value`` rows. Errors carry the 1-based line number."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValidationError("line 1: empty input, expected header unit,year,month,value") from None
    missing = [c for c in CSV_HEADER if c not in header]
    if missing:
        raise ValidationError(f"line 1: missing column(s) {', '.join(missing)}")
    col = {c: header.index(c) for c in CSV_HEADER}
    out = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise ValidationError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        unit = row[col["unit"]].strip()
        if not unit:
            raise ValidationError(f"line {line}: empty unit name")
        try:
            year = int(row[col["year"]].strip())
            month = int(row[col["month"]].strip())
            value = float(row[col["value"]].strip())
        except ValueError as exc:
            raise ValidationError(f"line {line}: {exc}") from None
        if not 1 <= month <= 12:
            raise ValidationError(f"line {line}: month {month} outside 1-12")
        if not math.isfinite(value):
            raise ValidationError(f"line {line}: non-finite value")
        out.append((unit, year, month, value))
    return out


def emit_counts_csv(records: Iterable[tuple[str, int, int, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for unit, year, month, value in records:
        w.writerow([unit, year, month, repr(float(value))])
    return buf.getvalue()


def load_panel(path: str) -> Panel:
    with open(path, newline="", encoding="utf-8") as fh:
        return build_panel(parse_counts_csv(fh))


@dataclass(frozen=True)
class RunConfig:
    treated_unit: str
    t0_year: int
    input_path: str | None = None
    season_months: frozenset[int] = DEFAULT_SEASON
    excluded_donors: frozenset[str] = field(default_factory=frozenset)
    fit_target: str = "per_period"
    estimator: str = "both"
    bootstrap_replications: int = 200
    bootstrap_resample_size: int = 7
    confidence_level: float = 0.95
    seed: int = 0
    occupancy: float = DEFAULT_OCCUPANCY
    output_dir: str | None = None
    trend_threshold: float | None = None
    zeta: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.bootstrap_replications < 1:
            raise ValidationError("bootstrap_replications must be >= 1")
        if self.bootstrap_resample_size < 1:
            raise ValidationError("bootstrap_resample_size must be >= 1")
        if not 0 < self.confidence_level < 1:
            raise ValidationError("confidence_level must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.estimator not in ("scm", "sdid", "both"):
            raise ValidationError(f"estimator must be scm, sdid or both, got {self.estimator!r}")
        if self.fit_target not in ("per_period", "pre_mean"):
            raise ValidationError(f"fit_target must be per_period or pre_mean, got {self.fit_target!r}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    @property
    def estimators(self) -> tuple[str, ...]:
        return ("scm", "sdid") if self.estimator == "both" else (self.estimator,)

    def treatment_spec(self) -> TreatmentSpec:
        return TreatmentSpec(self.treated_unit, self.t0_year, self.season_months,
                             self.excluded_donors, self.fit_target, self.occupancy)


def _int_set(s: str) -> frozenset[int]:
    return frozenset(int(x) for x in s.split(",") if x.strip())


def _str_set(s: str) -> frozenset[str]:
    return frozenset(x.strip() for x in s.split(",") if x.strip())


def _opt_float(s: str) -> float | None:
    return None if s.lower() in ("", "none", "default") else float(s)


_KEYS = {
    "input": ("input_path", str),
    "treated_unit": ("treated_unit", str),
    "t0_year": ("t0_year", int),
    "season_months": ("season_months", _int_set),
    "excluded_donors": ("excluded_donors", _str_set),
    "fit_target": ("fit_target", str),
    "estimator": ("estimator", str),
    "bootstrap_replications": ("bootstrap_replications", int),
    "bootstrap_resample_size": ("bootstrap_resample_size", int),
    "confidence_level": ("confidence_level", float),
    "seed": ("seed", int),
    "occupancy": ("occupancy", float),
    "output_dir": ("output_dir", str),
    "trend_threshold": ("trend_threshold", _opt_float),
    "zeta": ("zeta", _opt_float),
    "workers": ("workers", int),
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) into a RunConfig."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in _KEYS:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(val)
        except ValueError:
            raise ValidationError(f"config key {key!r}: malformed value {val!r}") from None
    for req in ("treated_unit", "t0_year"):
        if req not in values:
            raise ValidationError(f"config is missing required key {req!r}")
    return RunConfig(**values)


@dataclass(frozen=True)
class ValidationReport:
    treated_unit: str
    treated_complete: bool
    usable_donors: tuple[str, ...]
    dropped_donors: tuple[str, ...]

    @property
    def n_donors(self) -> int:
        return len(self.usable_donors)


def validate_panel(panel: Panel, spec: TreatmentSpec) -> ValidationReport:
    """Check pre-treatment completeness; list donors that must be dropped.

    Raises if the treated unit misses any in-season pre-treatment cell or if
    fewer than two donors remain. The panel itself is not modified.
    """
    pre, _ = split_periods(panel, spec)
    tr = panel.unit_index(spec.treated_unit)
    missing = np.flatnonzero(~panel.observed[tr, pre])
    if missing.size:
        y, m = panel.periods[pre[missing[0]]]
        raise ValidationError(
            f"treated unit {spec.treated_unit!r} is missing {missing.size} pre-treatment "
            f"cell(s), first at {y}-{m:02d}"
        )
    usable, dropped = [], []
    for u in spec.donors(panel):
        (usable if panel.observed[panel.unit_index(u), pre].all() else dropped).append(u)
    if len(usable) < 2:
        raise ValidationError(f"only {len(usable)} donor(s) with complete pre-treatment data")
    return ValidationReport(spec.treated_unit, True, tuple(usable), tuple(dropped))
