"""Panel data model: units observed over (year, month) periods with a mask."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_SEASON = frozenset(range(4, 11))
DEFAULT_OCCUPANCY = 1.89


class ValidationError(ValueError):
    """Input data or configuration does not satisfy a precondition."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Panel:
    """Rectangular unit x period outcome table.

    ``values[i, t]`` is meaningful only where ``observed[i, t]`` is true;
    unobserved cells hold NaN.
    """

    units: tuple[str, ...]
    periods: tuple[tuple[int, int], ...]
    values: np.ndarray
    observed: np.ndarray

    def __post_init__(self) -> None:
        units = tuple(str(u) for u in self.units)
        periods = tuple((int(y), int(m)) for y, m in self.periods)
        if len(set(units)) != len(units):
            raise ValidationError("unit identifiers must be unique")
        for (y, m) in periods:
            if not 1 <= m <= 12:
                raise ValidationError(f"month out of range in period {(y, m)}")
        if any(a >= b for a, b in zip(periods, periods[1:])):
            raise ValidationError("periods must be strictly increasing")
        values = np.asarray(self.values, dtype=float)
        observed = np.asarray(self.observed, dtype=bool)
        shape = (len(units), len(periods))
        if values.shape != shape or observed.shape != shape:
            raise ValidationError(
                f"values/observed must have shape {shape}, got {values.shape} and {observed.shape}"
            )
        if not np.all(np.isfinite(values[observed])):
            raise ValidationError("observed values must be finite")
        values = np.where(observed, values, np.nan)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "observed", _readonly(observed))

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    @property
    def years(self) -> np.ndarray:
        return np.array([y for y, _ in self.periods], dtype=int)

    @property
    def months(self) -> np.ndarray:
        return np.array([m for _, m in self.periods], dtype=int)

    def unit_index(self, unit: str) -> int:
        try:
            return self.units.index(unit)
        except ValueError:
            raise ValidationError(f"unknown unit {unit!r}") from None

    def records(self) -> list[tuple[str, int, int, float]]:
        """Observed cells as ``(unit, year, month, value)`` in panel order."""
        out = []
        for i, u in enumerate(self.units):
            for t, (y, m) in enumerate(self.periods):
                if self.observed[i, t]:
                    out.append((u, y, m, float(self.values[i, t])))
        return out

    def subset_units(self, keep: Iterable[str]) -> Panel:
        keep = list(keep)
        idx = [self.unit_index(u) for u in keep]
        return Panel(tuple(keep), self.periods, self.values[idx], self.observed[idx])

    def with_values(self, values: np.ndarray) -> Panel:
        return Panel(self.units, self.periods, values, self.observed)


@dataclass(frozen=True)
class TreatmentSpec:
    """Which unit is treated, when, and how the fit is set up.

    ``t0_year`` is the last pre-treatment year. ``fit_target`` is either
    ``"per_period"`` (match every pre-treatment year) or ``"pre_mean"``
    (match only the pre-period average).
    """

    treated_unit: str
    t0_year: int
    season_months: frozenset[int] = DEFAULT_SEASON
    excluded_donors: frozenset[str] = field(default_factory=frozenset)
    fit_target: str = "per_period"
    occupancy: float = DEFAULT_OCCUPANCY

    def __post_init__(self) -> None:
        object.__setattr__(self, "season_months", frozenset(int(m) for m in self.season_months))
        object.__setattr__(self, "excluded_donors", frozenset(str(u) for u in self.excluded_donors))
        object.__setattr__(self, "t0_year", int(self.t0_year))
        if not self.season_months or not all(1 <= m <= 12 for m in self.season_months):
            raise ValidationError("season_months must be a nonempty subset of 1..12")
        if self.fit_target not in ("per_period", "pre_mean"):
            raise ValidationError(f"fit_target must be 'per_period' or 'pre_mean', got {self.fit_target!r}")
        if self.treated_unit in self.excluded_donors:
            raise ValidationError("excluded_donors must not contain the treated unit")
        if not self.occupancy > 0:
            raise ValidationError("occupancy must be positive")

    def validate_against(self, panel: Panel) -> None:
        if self.treated_unit not in panel.units:
            raise ValidationError(f"treated unit {self.treated_unit!r} not in panel")
        years = sorted(set(panel.years.tolist()))
        if not years or not years[0] <= self.t0_year < years[-1]:
            raise ValidationError(
                f"t0_year {self.t0_year} must lie in [{years[0] if years else '?'}, "
                f"{years[-1] - 1 if years else '?'}] so both periods are nonempty"
            )

    def donors(self, panel: Panel) -> list[str]:
        """Panel units eligible as donors, in panel order."""
        return [u for u in panel.units if u != self.treated_unit and u not in self.excluded_donors]


def build_panel(records: Iterable[tuple[str, int, int, float]]) -> Panel:
    """Assemble a panel from ``(unit, year, month, value)`` records.

    Units keep first-seen order; periods are sorted. Cells without a record
    are marked unobserved.
    """
    cells: dict[tuple[str, int, int], float] = {}
    units: list[str] = []
    seen_units: set[str] = set()
    for unit, year, month, value in records:
        unit, year, month, value = str(unit), int(year), int(month), float(value)
        key = (unit, year, month)
        if key in cells:
            raise ValidationError(f"duplicate record for unit={unit!r} year={year} month={month}")
        if not math.isfinite(value):
            raise ValidationError(f"non-finite value for unit={unit!r} year={year} month={month}")
        if not 1 <= month <= 12:
            raise ValidationError(f"month {month} out of range for unit={unit!r} year={year}")
        cells[key] = value
        if unit not in seen_units:
            seen_units.add(unit)
            units.append(unit)
    periods = sorted({(y, m) for _, y, m in cells})
    col = {p: j for j, p in enumerate(periods)}
    row = {u: i for i, u in enumerate(units)}
    values = np.full((len(units), len(periods)), np.nan)
    observed = np.zeros_like(values, dtype=bool)
    for (u, y, m), v in cells.items():
        values[row[u], col[(y, m)]] = v
        observed[row[u], col[(y, m)]] = True
    return Panel(tuple(units), tuple(periods), values, observed)


def split_periods(panel: Panel, spec: TreatmentSpec) -> tuple[np.ndarray, np.ndarray]:
    """Indices of in-season pre-treatment and post-treatment periods."""
    spec.validate_against(panel)
    in_season = np.isin(panel.months, sorted(spec.season_months))
    years = panel.years
    pre = np.flatnonzero(in_season & (years <= spec.t0_year))
    post = np.flatnonzero(in_season & (years > spec.t0_year))
    if pre.size == 0:
        raise ValidationError("no in-season pre-treatment periods")
    if post.size == 0:
        raise ValidationError("no in-season post-treatment periods")
    return pre, post


@dataclass(frozen=True)
class Stats:
    mean: float
    sd: float
    min: float
    max: float
    n: int


def descriptive_stats(series: Sequence[float] | np.ndarray) -> Stats:
    """Mean, sample SD (n-1 denominator; NaN when n == 1), min, max and count."""
    x = np.asarray(series, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("descriptive_stats needs at least one value")
    sd = float(np.std(x, ddof=1)) if x.size >= 2 else math.nan
    return Stats(float(np.mean(x)), sd, float(np.min(x)), float(np.max(x)), int(x.size))
