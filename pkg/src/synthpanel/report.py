"""Run summaries, CSV export, and the downstream passenger arithmetic."""

from __future__ import annotations

import csv
import io
import os
import warnings
from dataclasses import dataclass

from .pipeline import RunResult
from .scm import ScmResult
from .sdid import SdidResult


def persons_from_effect(effect: float, occupancy: float = 1.89) -> float:
    """Vehicles per day converted to persons per day (magnitude only)."""
    if not occupancy > 0:
        raise ValueError("occupancy must be positive")
    return abs(effect) * occupancy


@dataclass(frozen=True)
class ModeShareSplit:
    """Shares of the later-year public transport ridership.

    ``baseline + growth`` is the counterfactual ridership without the new
    link; ``shift`` came from the car; ``induced`` is the remainder.
    """

    baseline: float
    growth: float
    shift: float
    induced: float

    @property
    def counterfactual(self) -> float:
        return self.baseline + self.growth

    @property
    def consistent(self) -> bool:
        return self.induced >= 0


def decompose_pt_share(pt_before: float, pt_after: float, network_growth: float,
                       shifted: float) -> ModeShareSplit:
    """Split ``pt_after`` riders into baseline, network growth, mode shift and induced.

    ``network_growth`` is the ratio applied to ``pt_before`` for the
    counterfactual. A negative induced share means the inputs are
    inconsistent; it is returned with a warning.
    """
    if not pt_after > 0:
        raise ValueError("pt_after must be positive")
    baseline = pt_before / pt_after
    growth = pt_before * (network_growth - 1.0) / pt_after
    shift = shifted / pt_after
    induced = 1.0 - (baseline + growth) - shift
    if induced < 0:
        warnings.warn(f"induced share is negative ({induced:.4f}); inputs are inconsistent",
                      stacklevel=2)
    return ModeShareSplit(baseline, growth, shift, induced)


def _gap_plot_csv(res: ScmResult | SdidResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["year", "gap", "synthetic", "treated"])
    for y, a, s in zip(res.years, res.treated, res.synthetic):
        w.writerow([y, repr(float(a - s)), repr(float(s)), repr(float(a))])
    return buf.getvalue()


def _write(path: str, text: str) -> str:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def export_run(result: RunResult, destination: str) -> list[str]:
    """Write all run artifacts into ``destination`` and return the paths.

    Per estimator: ``effects_<est>.csv`` (year,treated,synthetic,gap),
    ``weights_<est>.csv`` and ``gap_plot_<est>.csv`` (year,gap,synthetic,treated).
    Always ``hull.csv`` and ``screen.csv``. With bootstrap results also
    ``bootstrap_summary.csv`` and ``bootstrap_<est>.csv``.
    """
    try:
        os.makedirs(destination, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {destination}: {exc.strerror or exc}") from exc

    def p(name: str) -> str:
        return os.path.join(destination, name)

    written = []
    for est, res in result.estimates().items():
        written.append(_write(p(f"effects_{est}.csv"), res.to_csv()))
        written.append(_write(p(f"weights_{est}.csv"), res.weights.to_csv()))
        written.append(_write(p(f"gap_plot_{est}.csv"), _gap_plot_csv(res)))
    written.append(_write(p("hull.csv"), result.hull.to_csv()))
    written.append(_write(p("screen.csv"), result.screen.to_csv()))
    if result.bootstrap:
        lines = [b.summary_csv(header=(k == 0)) for k, b in enumerate(result.bootstrap.values())]
        written.append(_write(p("bootstrap_summary.csv"), "".join(lines)))
        for est, b in result.bootstrap.items():
            written.append(_write(p(f"bootstrap_{est}.csv"), b.replicates_csv()))
    return written


def summarize(result: RunResult) -> str:
    """Plain-text run summary."""
    spec, v = result.spec, result.validation
    out = [
        f"treated unit: {spec.treated_unit}  last pre-treatment year: {spec.t0_year}",
        f"donors used: {', '.join(v.usable_donors)}",
    ]
    if v.dropped_donors:
        out.append(f"donors dropped (incomplete): {', '.join(v.dropped_donors)}")
    out.append(f"hull check on levels: {result.hull_levels.violations}/{len(result.hull_levels.years)} "
               f"pre years outside; on residuals: {result.hull.violations}/{len(result.hull.years)}")
    flagged = [d for d, f in zip(result.screen.donors, result.screen.flagged) if f]
    if flagged:
        out.append(f"trend screen flags: {', '.join(flagged)}")
    for est, res in result.estimates().items():
        e = res.effect
        line = f"{est}: average effect {e.average:.1f}/day, pre-RMSE {e.pre_rmse:.1f}"
        if e.relative is not None:
            line += f", {100 * e.relative:.2f}% of pre-treatment level {result.pre_level:.0f}"
        line += f", ~{persons_from_effect(e.average, spec.occupancy):.0f} persons/day"
        out.append(line)
        if est == "scm":
            nz = {d: w for d, w in res.weights.display().items() if w > 0}
            out.append("  weights: " + ", ".join(f"{d} {100 * w:.1f}%" for d, w in nz.items()))
        b = result.bootstrap.get(est)
        if b is not None:
            out.append(f"  {100 * b.level:.0f}% bootstrap CI [{b.lower:.1f}; {b.upper:.1f}] "
                       f"({b.completed}/{b.B} replicates, m={b.m}, seed={b.seed})")
    return "\n".join(out)
