"""Synthetic difference-in-differences for a single treated unit.

Unit weights are fit with a free intercept and a ridge penalty, time weights
with a free intercept and no penalty; both live on the simplex. The estimate
is the weighted double difference between the treated unit and its synthetic
control across post periods and the time-weighted pre period.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .panel import TreatmentSpec, ValidationError
from .residualize import YearSeries
from .scm import EffectEstimate, estimation_arrays
from .simplex import simplex_lstsq


def _check(pre_donors: np.ndarray, target: np.ndarray, axis_len: int, what: str) -> None:
    if pre_donors.ndim != 2 or target.ndim != 1:
        raise ValidationError("expected a matrix and a vector")
    if target.shape[0] != axis_len:
        raise ValidationError(f"dimension mismatch in {what}: {target.shape[0]} vs {axis_len}")
    P, D = pre_donors.shape
    if P < 2 or D < 2:
        raise ValidationError(f"{what} needs at least 2 pre periods and 2 donors, got P={P}, D={D}")


def sdid_unit_weights(pre_donors, pre_treated, zeta: float) -> tuple[float, np.ndarray]:
    """Return ``(intercept, omega)`` minimizing

    ``sum_t (intercept + pre_donors[t] @ omega - pre_treated[t])**2 + zeta**2 * P * |omega|**2``

    over simplex ``omega`` and free intercept.
    """
    A = np.asarray(pre_donors, dtype=float)
    b = np.asarray(pre_treated, dtype=float)
    _check(A, b, A.shape[0], "sdid_unit_weights")
    if zeta < 0:
        raise ValidationError("zeta must be nonnegative")
    P, D = A.shape
    Ac = A - A.mean(axis=0)
    bc = b - b.mean()
    if zeta > 0:
        Ac = np.vstack([Ac, zeta * np.sqrt(P) * np.eye(D)])
        bc = np.concatenate([bc, np.zeros(D)])
    w = simplex_lstsq(Ac, bc).weights
    return float(np.mean(b - A @ w)), w


def sdid_time_weights(pre_donors, post_donor_means) -> tuple[float, np.ndarray]:
    """Return ``(intercept, lam)`` minimizing

    ``sum_i (intercept + pre_donors[:, i] @ lam - post_donor_means[i])**2``

    over simplex ``lam`` and free intercept.
    """
    A = np.asarray(pre_donors, dtype=float)
    c = np.asarray(post_donor_means, dtype=float)
    _check(A, c, A.shape[1], "sdid_time_weights")
    M = A.T
    lam = simplex_lstsq(M - M.mean(axis=0), c - c.mean()).weights
    return float(np.mean(c - M @ lam)), lam


def default_zeta(pre_donors: np.ndarray, n_post: int) -> float:
    """(n_post)^(1/4) times the SD of first differences of donor pre outcomes."""
    diffs = np.diff(np.asarray(pre_donors, dtype=float), axis=0).ravel()
    if diffs.size < 2:
        return 0.0
    return float(n_post ** 0.25 * np.std(diffs, ddof=1))


@dataclass(frozen=True)
class SdidWeights:
    donors: tuple[str, ...]
    omega: np.ndarray
    omega0: float
    pre_years: tuple[int, ...]
    lam: np.ndarray
    lam0: float
    zeta: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["kind", "id", "weight"])
        for d, w in zip(self.donors, self.omega):
            wr.writerow(["unit", d, repr(float(w))])
        for y, w in zip(self.pre_years, self.lam):
            wr.writerow(["time", y, repr(float(w))])
        return buf.getvalue()


@dataclass(frozen=True)
class SdidResult:
    weights: SdidWeights
    years: tuple[int, ...]
    treated: np.ndarray
    synthetic: np.ndarray
    effect: EffectEstimate

    @property
    def tau(self) -> float:
        return self.effect.average

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["year", "treated", "synthetic", "gap"])
        for y, a, s in zip(self.years, self.treated, self.synthetic):
            wr.writerow([y, repr(float(a)), repr(float(s)), repr(float(a - s))])
        return buf.getvalue()


def double_difference(treated: np.ndarray, donors: np.ndarray, pre: np.ndarray, post: np.ndarray,
                      omega: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Post-period gaps net of the time-weighted pre-period gap; their mean is tau."""
    diff = treated - donors @ omega
    return diff[post] - float(lam @ diff[pre])


def sdid_fit(treated: np.ndarray, donors: np.ndarray, pre: np.ndarray, post: np.ndarray,
             zeta: float | None = None, baseline: float | None = None):
    """Core estimator on arrays. Returns ``(omega0, omega, lam0, lam, zeta, synthetic, effect)``.

    ``synthetic`` is ``omega0 + donors @ omega``; post gaps are additionally
    corrected by the time-weighted pre-period difference so they average to tau.
    """
    Ypre = donors[pre]
    if zeta is None:
        zeta = default_zeta(Ypre, post.size)
    omega0, omega = sdid_unit_weights(Ypre, treated[pre], zeta)
    lam0, lam = sdid_time_weights(Ypre, donors[post].mean(axis=0))
    gaps = double_difference(treated, donors, pre, post, omega, lam)
    tau = float(gaps.mean())
    synth = omega0 + donors @ omega
    rmse = float(np.sqrt(np.mean((treated[pre] - synth[pre]) ** 2)))
    rel = tau / baseline if baseline else None
    return omega0, omega, lam0, lam, zeta, synth, EffectEstimate(post, gaps, tau, rmse, rel)


def sdid_estimate(ys: YearSeries, spec: TreatmentSpec, zeta: float | None = None,
                  baseline: float | None = None) -> SdidResult:
    """SDID average treatment effect on a yearly series.

    ``zeta=None`` uses :func:`default_zeta`.
    """
    arr = estimation_arrays(ys, spec)
    if arr.donors.shape[1] < 2:
        raise ValidationError("SDID needs at least 2 donors")
    if arr.pre.size < 2:
        raise ValidationError("SDID needs at least 2 pre-treatment periods")
    omega0, omega, lam0, lam, z, synth, eff = sdid_fit(arr.treated, arr.donors, arr.pre, arr.post,
                                                       zeta, baseline)
    w = SdidWeights(arr.donor_ids, omega, omega0, tuple(arr.years[k] for k in arr.pre), lam, lam0, z)
    return SdidResult(w, arr.years, arr.treated, synth, eff)
