"""End-to-end run: load, validate, residualize, diagnose, estimate, bootstrap."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .inference import BootstrapResult, bootstrap_ci
from .ingest import RunConfig, ValidationReport, load_panel, validate_panel
from .panel import Panel, TreatmentSpec
from .residualize import (
    HullReport,
    ScreenReport,
    YearSeries,
    annualize,
    convex_hull_check,
    residualize,
    trend_divergence_screen,
)
from .scm import ScmResult, scm_estimate
from .sdid import SdidResult, sdid_estimate

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    config: RunConfig
    spec: TreatmentSpec
    validation: ValidationReport
    levels: YearSeries
    residuals: YearSeries
    hull_levels: HullReport
    hull: HullReport
    screen: ScreenReport
    pre_level: float
    scm: ScmResult | None = None
    sdid: SdidResult | None = None
    bootstrap: dict[str, BootstrapResult] = field(default_factory=dict)

    def estimates(self) -> dict[str, ScmResult | SdidResult]:
        return {k: v for k, v in (("scm", self.scm), ("sdid", self.sdid)) if v is not None}


def diagnose(panel: Panel, cfg: RunConfig) -> RunResult:
    """Validation, residualization and the hull/trend diagnostics, no estimation."""
    spec = cfg.treatment_spec()
    report = validate_panel(panel, spec)
    if report.dropped_donors:
        log.warning("dropping donors with incomplete pre-treatment data: %s",
                    ", ".join(report.dropped_donors))
    kept = panel.subset_units((spec.treated_unit,) + report.usable_donors)
    levels = annualize(kept, spec)
    resid = annualize(residualize(kept, spec), spec)
    threshold = math.inf if cfg.trend_threshold is None else cfg.trend_threshold
    pre = np.array(levels.years) <= spec.t0_year
    return RunResult(
        config=cfg,
        spec=spec,
        validation=report,
        levels=levels,
        residuals=resid,
        hull_levels=convex_hull_check(levels, spec),
        hull=convex_hull_check(resid, spec),
        screen=trend_divergence_screen(resid, spec, threshold),
        pre_level=float(np.mean(levels.row(spec.treated_unit)[pre])),
    )


def run(cfg: RunConfig, panel: Panel | None = None, with_bootstrap: bool = False) -> RunResult:
    """Full estimation run as described by ``cfg``.

    ``panel`` overrides ``cfg.input_path`` when given.
    """
    if panel is None:
        if not cfg.input_path:
            raise FileNotFoundError("config has no 'input' path and no panel was supplied")
        panel = load_panel(cfg.input_path)
    res = diagnose(panel, cfg)
    ests = cfg.estimators
    if "scm" in ests:
        res.scm = scm_estimate(res.residuals, res.spec, baseline=res.pre_level)
    if "sdid" in ests:
        res.sdid = sdid_estimate(res.residuals, res.spec, zeta=cfg.zeta, baseline=res.pre_level)
    if with_bootstrap:
        for est in ests:
            res.bootstrap[est] = bootstrap_ci(
                res.residuals, res.spec, est, B=cfg.bootstrap_replications,
                m=cfg.bootstrap_resample_size, level=cfg.confidence_level, seed=cfg.seed,
                zeta=cfg.zeta, workers=cfg.workers,
            )
    return res
