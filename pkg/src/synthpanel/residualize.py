"""Deseasonalization against pre-treatment monthly means, yearly averaging,
and the donor-pool diagnostics (range/convex-hull check, trend screening)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .panel import Panel, TreatmentSpec, ValidationError, split_periods


@dataclass(frozen=True)
class ResidualPanel:
    """Panel of residuals plus the monthly baselines they were taken against.

    ``baselines[i, m - 1]`` is the pre-treatment mean of unit ``i`` in month
    ``m`` (NaN for months outside the season).
    """

    panel: Panel
    baselines: np.ndarray

    @property
    def units(self) -> tuple[str, ...]:
        return self.panel.units


@dataclass(frozen=True)
class YearSeries:
    """Per unit and year: mean over observed in-season months and month count."""

    units: tuple[str, ...]
    years: tuple[int, ...]
    values: np.ndarray
    counts: np.ndarray

    @property
    def observed(self) -> np.ndarray:
        return self.counts > 0

    def row(self, unit: str) -> np.ndarray:
        return self.values[self.units.index(unit)]

    def subset_units(self, keep: list[str]) -> YearSeries:
        idx = [self.units.index(u) for u in keep]
        return YearSeries(tuple(keep), self.years, self.values[idx], self.counts[idx])


def monthly_baseline(panel: Panel, spec: TreatmentSpec) -> np.ndarray:
    """Unit x 12 array of pre-treatment monthly means for in-season months."""
    pre, _ = split_periods(panel, spec)
    months = panel.months
    out = np.full((panel.n_units, 12), np.nan)
    for m in sorted(spec.season_months):
        cols = pre[months[pre] == m]
        for i, unit in enumerate(panel.units):
            mask = panel.observed[i, cols]
            if not mask.any():
                raise ValidationError(
                    f"unit {unit!r} has no pre-treatment observation for month {m}"
                )
            out[i, m - 1] = panel.values[i, cols[mask]].mean()
    return out


def residualize(panel: Panel, spec: TreatmentSpec) -> ResidualPanel:
    """Subtract each unit's pre-treatment mean for the matching calendar month.

    Out-of-season cells are masked out of the returned panel.
    """
    base = monthly_baseline(panel, spec)
    months = panel.months
    in_season = np.isin(months, sorted(spec.season_months))
    per_cell = np.where(in_season, base[:, np.clip(months, 1, 12) - 1], np.nan)
    observed = panel.observed & in_season[None, :]
    resid = np.where(observed, panel.values - per_cell, np.nan)
    return ResidualPanel(Panel(panel.units, panel.periods, resid, observed), base)


def annualize(data: ResidualPanel | Panel, spec: TreatmentSpec) -> YearSeries:
    """Average in-season observed months per unit and year.

    Accepts raw panels too, which is how level series for the hull check are
    produced. Unit-years with no observed month get count 0 and NaN.
    """
    panel = data.panel if isinstance(data, ResidualPanel) else data
    years = panel.years
    in_season = np.isin(panel.months, sorted(spec.season_months))
    uniq = sorted(set(years[in_season].tolist()))
    values = np.full((panel.n_units, len(uniq)), np.nan)
    counts = np.zeros((panel.n_units, len(uniq)), dtype=int)
    for j, y in enumerate(uniq):
        cols = np.flatnonzero(in_season & (years == y))
        obs = panel.observed[:, cols]
        counts[:, j] = obs.sum(axis=1)
        sums = np.where(obs, panel.values[:, cols], 0.0).sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            values[:, j] = np.where(counts[:, j] > 0, sums / np.maximum(counts[:, j], 1), np.nan)
    return YearSeries(panel.units, tuple(uniq), values, counts)


def _pre_years(ys: YearSeries, spec: TreatmentSpec) -> np.ndarray:
    return np.flatnonzero(np.array(ys.years) <= spec.t0_year)


@dataclass(frozen=True)
class HullReport:
    years: tuple[int, ...]
    donor_min: np.ndarray
    donor_max: np.ndarray
    treated: np.ndarray
    inside: np.ndarray

    @property
    def below_min(self) -> np.ndarray:
        """Signed distance treated - donor_min (negative means below the hull)."""
        return self.treated - self.donor_min

    @property
    def above_max(self) -> np.ndarray:
        """Signed distance donor_max - treated (negative means above the hull)."""
        return self.donor_max - self.treated

    @property
    def violations(self) -> int:
        return int(np.sum(~self.inside))

    @property
    def violation_fraction(self) -> float:
        return self.violations / len(self.years)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["year", "min", "max", "treated", "inside"])
        for k, y in enumerate(self.years):
            w.writerow([y, repr(float(self.donor_min[k])), repr(float(self.donor_max[k])),
                        repr(float(self.treated[k])), int(self.inside[k])])
        return buf.getvalue()


def convex_hull_check(ys: YearSeries, spec: TreatmentSpec) -> HullReport:
    """Check donor_min <= treated <= donor_max for every pre-treatment year.

    Strict comparison; use the signed distances to judge near misses.
    """
    donors = [u for u in ys.units if u != spec.treated_unit and u not in spec.excluded_donors]
    if len(donors) < 2:
        raise ValidationError("convex_hull_check needs at least 2 donors")
    pre = _pre_years(ys, spec)
    D = ys.subset_units(donors).values[:, pre]
    tr = ys.row(spec.treated_unit)[pre]
    lo = np.nanmin(D, axis=0)
    hi = np.nanmax(D, axis=0)
    inside = (lo <= tr) & (tr <= hi)
    return HullReport(tuple(ys.years[k] for k in pre), lo, hi, tr, inside)


@dataclass(frozen=True)
class ScreenReport:
    donors: tuple[str, ...]
    slopes: np.ndarray
    treated_slope: float
    divergence: np.ndarray
    flagged: np.ndarray
    threshold: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["unit", "slope", "divergence", "flagged"])
        for k, u in enumerate(self.donors):
            w.writerow([u, repr(float(self.slopes[k])), repr(float(self.divergence[k])),
                        int(self.flagged[k])])
        return buf.getvalue()


def _ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    return float(xc @ (y - y.mean()) / (xc @ xc))


def trend_divergence_screen(ys: YearSeries, spec: TreatmentSpec, threshold: float) -> ScreenReport:
    """Flag donors whose pre-period OLS trend departs from the treated unit's.

    Advisory only: flagged donors are not removed.
    """
    pre = _pre_years(ys, spec)
    yrs = np.array(ys.years, dtype=float)
    donors = [u for u in ys.units if u != spec.treated_unit and u not in spec.excluded_donors]

    def slope(unit: str) -> float:
        row = ys.row(unit)[pre]
        ok = np.isfinite(row)
        if ok.sum() < 2:
            raise ValidationError(f"unit {unit!r} has fewer than 2 pre-treatment years")
        return _ols_slope(yrs[pre][ok], row[ok])

    tr = slope(spec.treated_unit)
    slopes = np.array([slope(u) for u in donors])
    div = np.abs(slopes - tr)
    return ScreenReport(tuple(donors), slopes, tr, div, div > threshold, float(threshold))
