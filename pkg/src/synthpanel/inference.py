"""Donor bootstrap confidence intervals and in-space placebo runs."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .panel import TreatmentSpec, ValidationError
from .residualize import YearSeries
from .scm import estimation_arrays, scm_fit
from .sdid import sdid_fit

log = logging.getLogger(__name__)

ESTIMATORS = ("scm", "sdid")


def average_effect(estimator: str, treated: np.ndarray, donors: np.ndarray, pre: np.ndarray,
                   post: np.ndarray, fit_target: str = "per_period",
                   zeta: float | None = None) -> float:
    """Average post-period effect of one estimator on plain arrays."""
    if estimator == "scm":
        return scm_fit(treated, donors, pre, post, fit_target)[2].average
    if estimator == "sdid":
        if donors.shape[1] < 2 or pre.size < 2:
            raise ValidationError("SDID needs at least 2 donors and 2 pre periods")
        return sdid_fit(treated, donors, pre, post, zeta)[-1].average
    raise ValidationError(f"unknown estimator {estimator!r}")


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Independent stream for one replicate, derived only from (seed, index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replicate,))))


@dataclass(frozen=True)
class BootstrapResult:
    estimator: str
    point: float
    effects: np.ndarray
    degenerate: np.ndarray
    lower: float
    upper: float
    level: float
    B: int
    m: int
    seed: int

    @property
    def completed(self) -> int:
        return int(np.sum(~self.degenerate))

    @property
    def n_degenerate(self) -> int:
        return int(np.sum(self.degenerate))

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def replicates_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["replicate", "effect", "degenerate"])
        for k, (e, d) in enumerate(zip(self.effects, self.degenerate)):
            w.writerow([k, "" if d else repr(float(e)), int(d)])
        return buf.getvalue()

    def summary_csv(self, header: bool = True) -> str:
        rows = [["estimator", "point", "lower", "upper", "level", "B", "B_completed"]] if header else []
        rows.append([self.estimator, repr(self.point), repr(self.lower), repr(self.upper),
                     repr(self.level), self.B, self.completed])
        return "".join(",".join(map(str, r)) + "\n" for r in rows)


def _one_replicate(k: int, *, estimator: str, treated: np.ndarray, donors: np.ndarray,
                   pre: np.ndarray, post: np.ndarray, m: int, seed: int, fit_target: str,
                   zeta: float | None) -> float:
    idx = replicate_rng(seed, k).integers(0, donors.shape[1], size=m)
    try:
        val = average_effect(estimator, treated, donors[:, idx], pre, post, fit_target, zeta)
    except (ValidationError, ValueError, np.linalg.LinAlgError) as exc:
        log.debug("replicate %d degenerate: %s", k, exc)
        return float("nan")
    return val if np.isfinite(val) else float("nan")


def bootstrap_ci(ys: YearSeries, spec: TreatmentSpec, estimator: str = "scm", B: int = 200,
                 m: int | None = None, level: float = 0.95, seed: int = 0,
                 zeta: float | None = None, workers: int = 1) -> BootstrapResult:
    """Percentile interval from re-estimating on donors drawn with replacement.

    Each replicate draws ``m`` donor columns (default: the pool size) with
    replacement; duplicates stay as separate columns. Replicates that fail
    are marked degenerate and left out of the quantiles. Results do not
    depend on ``workers``.
    """
    if estimator not in ESTIMATORS:
        raise ValidationError(f"unknown estimator {estimator!r}")
    if B < 1:
        raise ValidationError("B must be >= 1")
    if not 0 < level < 1:
        raise ValidationError("level must lie in (0, 1)")
    arr = estimation_arrays(ys, spec)
    m = arr.donors.shape[1] if m is None else int(m)
    if m < 2:
        raise ValidationError("resample size m must be >= 2")
    point = average_effect(estimator, arr.treated, arr.donors, arr.pre, arr.post, spec.fit_target, zeta)
    fn = partial(_one_replicate, estimator=estimator, treated=arr.treated, donors=arr.donors,
                 pre=arr.pre, post=arr.post, m=m, seed=int(seed), fit_target=spec.fit_target,
                 zeta=zeta)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            effects = np.array(list(ex.map(fn, range(B), chunksize=max(1, B // (4 * workers)))))
    else:
        effects = np.array([fn(k) for k in range(B)])
    degenerate = ~np.isfinite(effects)
    good = effects[~degenerate]
    alpha = 1.0 - level
    if good.size:
        lo, hi = np.quantile(good, [alpha / 2, 1 - alpha / 2], method="linear")
    else:
        lo = hi = float("nan")
    return BootstrapResult(estimator, float(point), effects, degenerate, float(lo), float(hi),
                           float(level), int(B), m, int(seed))


@dataclass(frozen=True)
class PlaceboResult:
    estimator: str
    true_effect: float
    donors: tuple[str, ...]
    effects: np.ndarray
    skipped: tuple[str, ...]

    @property
    def rank(self) -> int:
        """Rank of |true effect| among all units' |effects| (1 = largest)."""
        others = np.abs(self.effects[np.isfinite(self.effects)])
        return 1 + int(np.sum(others > abs(self.true_effect)))


def in_space_placebo(ys: YearSeries, spec: TreatmentSpec, estimator: str = "scm",
                     zeta: float | None = None) -> PlaceboResult:
    """Pretend each donor was treated, using the remaining donors as its pool."""
    arr = estimation_arrays(ys, spec)
    D = arr.donors.shape[1]
    if D < 3:
        raise ValidationError("placebo analysis needs at least 3 donors")
    true = average_effect(estimator, arr.treated, arr.donors, arr.pre, arr.post, spec.fit_target, zeta)
    effects = np.full(D, np.nan)
    skipped = []
    for j in range(D):
        rest = np.delete(arr.donors, j, axis=1)
        try:
            effects[j] = average_effect(estimator, arr.donors[:, j], rest, arr.pre, arr.post,
                                        spec.fit_target, zeta)
        except (ValidationError, ValueError, np.linalg.LinAlgError) as exc:
            log.info("placebo for %s skipped: %s", arr.donor_ids[j], exc)
            skipped.append(arr.donor_ids[j])
    return PlaceboResult(estimator, true, arr.donor_ids, effects, tuple(skipped))
