"""Synthetic control: simplex-constrained weights, synthetic paths and gaps."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .panel import TreatmentSpec, ValidationError
from .residualize import ResidualPanel, YearSeries
from .simplex import simplex_lstsq

DISPLAY_ZERO = 1e-3


@dataclass(frozen=True)
class WeightVector:
    donors: tuple[str, ...]
    weights: np.ndarray
    objective: float = float("nan")

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.donors),):
            raise ValidationError("one weight per donor required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError("weights must be nonnegative and sum to one")
        object.__setattr__(self, "donors", tuple(self.donors))
        object.__setattr__(self, "weights", w)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.donors, self.weights.tolist()))

    def display(self) -> dict[str, float]:
        """Weights with entries below 0.1% shown as zero."""
        return {d: (0.0 if w < DISPLAY_ZERO else w) for d, w in self.as_dict().items()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["donor", "weight"])
        for d, w in zip(self.donors, self.weights):
            wr.writerow([d, repr(float(w))])
        return buf.getvalue()


@dataclass(frozen=True)
class EffectEstimate:
    post_index: np.ndarray
    gaps: np.ndarray
    average: float
    pre_rmse: float
    relative: float | None = None


def _as_ids(ids: Sequence[str] | None, n: int) -> tuple[str, ...]:
    if ids is None:
        return tuple(f"donor{k}" for k in range(n))
    if len(ids) != n:
        raise ValidationError(f"{len(ids)} donor ids for {n} donor columns")
    return tuple(ids)


def solve_weights(pre_treated, pre_donors, fit_target: str = "per_period",
                  donor_ids: Sequence[str] | None = None) -> WeightVector:
    """Weights minimizing the squared pre-period distance to the treated unit.

    ``pre_donors`` is P x D. With ``fit_target="pre_mean"`` only the pre-period
    means are matched.
    """
    b = np.asarray(pre_treated, dtype=float)
    A = np.asarray(pre_donors, dtype=float)
    if A.ndim != 2 or b.ndim != 1:
        raise ValidationError("pre_treated must be a vector and pre_donors a matrix")
    if A.shape[0] != b.shape[0]:
        raise ValidationError(f"dimension mismatch: {b.shape[0]} periods vs {A.shape[0]} donor rows")
    if A.shape[1] == 0:
        raise ValidationError("no donors")
    if b.shape[0] == 0:
        raise ValidationError("no pre-treatment periods")
    if fit_target == "pre_mean":
        A, b = A.mean(axis=0, keepdims=True), b.mean(keepdims=True)
    elif fit_target != "per_period":
        raise ValidationError(f"unknown fit_target {fit_target!r}")
    sol = simplex_lstsq(A, b)
    return WeightVector(_as_ids(donor_ids, A.shape[1]), sol.weights, sol.objective)


def synthetic_path(weights: WeightVector, donors_all, donor_ids: Sequence[str] | None = None) -> np.ndarray:
    """Weighted donor average per period; ``donors_all`` is T x D."""
    Y = np.asarray(donors_all, dtype=float)
    if Y.ndim != 2 or Y.shape[1] != len(weights.donors):
        raise ValidationError("donor matrix columns do not match the weight vector")
    if donor_ids is not None and tuple(donor_ids) != weights.donors:
        raise ValidationError("donor ids are not aligned with the weight vector")
    return Y @ weights.weights


def effect_path(treated, synthetic, post, baseline: float | None = None) -> EffectEstimate:
    """Post-period gaps treated - synthetic, their mean and the pre-period RMSE.

    Periods not listed in ``post`` count as pre-treatment. ``relative`` is the
    average effect divided by ``baseline`` when one is supplied.
    """
    y = np.asarray(treated, dtype=float)
    s = np.asarray(synthetic, dtype=float)
    if y.shape != s.shape:
        raise ValidationError(f"length mismatch: {y.shape} vs {s.shape}")
    post = np.asarray(post, dtype=int)
    if post.size == 0:
        raise ValidationError("post period is empty")
    pre = np.setdiff1d(np.arange(y.size), post)
    gaps = y[post] - s[post]
    avg = float(gaps.mean())
    rmse = float(np.sqrt(np.mean((y[pre] - s[pre]) ** 2))) if pre.size else float("nan")
    rel = avg / baseline if baseline else None
    return EffectEstimate(post, gaps, avg, rmse, rel)


@dataclass(frozen=True)
class EstimationArrays:
    """Complete-case arrays for one treated unit and its donors."""

    years: tuple[int, ...]
    treated: np.ndarray
    donors: np.ndarray
    donor_ids: tuple[str, ...]
    pre: np.ndarray
    post: np.ndarray
    dropped: tuple[str, ...]


def estimation_arrays(ys: YearSeries, spec: TreatmentSpec) -> EstimationArrays:
    """Pull treated vector and T x D donor matrix from a year series.

    Donors with any unobserved year are dropped.
    """
    if spec.treated_unit not in ys.units:
        raise ValidationError(f"treated unit {spec.treated_unit!r} missing from series")
    years = np.array(ys.years)
    pre = np.flatnonzero(years <= spec.t0_year)
    post = np.flatnonzero(years > spec.t0_year)
    if pre.size == 0 or post.size == 0:
        raise ValidationError("both pre and post years are required")
    tr = ys.row(spec.treated_unit)
    if not np.all(np.isfinite(tr)):
        raise ValidationError("treated unit has unobserved years")
    ids, cols, dropped = [], [], []
    for u in ys.units:
        if u == spec.treated_unit or u in spec.excluded_donors:
            continue
        row = ys.row(u)
        if np.all(np.isfinite(row)):
            ids.append(u)
            cols.append(row)
        else:
            dropped.append(u)
    if not ids:
        raise ValidationError("no complete donors")
    return EstimationArrays(ys.years, tr.copy(), np.column_stack(cols), tuple(ids), pre, post, tuple(dropped))


@dataclass(frozen=True)
class ScmResult:
    weights: WeightVector
    years: tuple[int, ...]
    treated: np.ndarray
    synthetic: np.ndarray
    effect: EffectEstimate

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["year", "treated", "synthetic", "gap"])
        for y, a, s in zip(self.years, self.treated, self.synthetic):
            wr.writerow([y, repr(float(a)), repr(float(s)), repr(float(a - s))])
        return buf.getvalue()


def scm_fit(treated: np.ndarray, donors: np.ndarray, pre: np.ndarray, post: np.ndarray,
            fit_target: str = "per_period", donor_ids: Sequence[str] | None = None,
            baseline: float | None = None) -> tuple[WeightVector, np.ndarray, EffectEstimate]:
    w = solve_weights(treated[pre], donors[pre], fit_target, donor_ids)
    synth = donors @ w.weights
    return w, synth, effect_path(treated, synth, post, baseline)


def scm_estimate(ys: YearSeries, spec: TreatmentSpec, baseline: float | None = None) -> ScmResult:
    """Synthetic control on a yearly series; the effect is the mean yearly gap."""
    arr = estimation_arrays(ys, spec)
    w, synth, eff = scm_fit(arr.treated, arr.donors, arr.pre, arr.post, spec.fit_target,
                            arr.donor_ids, baseline)
    return ScmResult(w, arr.years, arr.treated, synth, eff)


def monthly_effect(rpanel: ResidualPanel, spec: TreatmentSpec, weights: WeightVector,
                   baseline: float | None = None) -> EffectEstimate:
    """Apply yearly-fitted weights to monthly residuals and average monthly gaps.

    Only periods observed for the treated unit and every weighted donor are used.
    """
    p = rpanel.panel
    tr = p.values[p.unit_index(spec.treated_unit)]
    Y = np.column_stack([p.values[p.unit_index(d)] for d in weights.donors])
    ok = np.isfinite(tr) & np.all(np.isfinite(Y[:, weights.weights > 0]), axis=1)
    Y = np.where(np.isfinite(Y), Y, 0.0)
    idx = np.flatnonzero(ok)
    synth = Y[idx] @ weights.weights
    post = np.flatnonzero(p.years[idx] > spec.t0_year)
    return effect_path(tr[idx], synth, post, baseline)
