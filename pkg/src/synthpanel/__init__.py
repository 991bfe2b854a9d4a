"""Synthetic control and synthetic difference-in-differences for monthly panels.

Typical flow: build or load a :class:`Panel`, residualize against
pre-treatment monthly means, average by year, then estimate with
:func:`scm_estimate` / :func:`sdid_estimate` and attach donor-bootstrap
intervals with :func:`bootstrap_ci`.
"""

from .inference import BootstrapResult, PlaceboResult, bootstrap_ci, in_space_placebo
from .ingest import (
    RunConfig,
    ValidationReport,
    emit_counts_csv,
    load_panel,
    parse_config,
    parse_counts_csv,
    validate_panel,
)
from .panel import (
    Panel,
    Stats,
    TreatmentSpec,
    ValidationError,
    build_panel,
    descriptive_stats,
    split_periods,
)
from .report import decompose_pt_share, export_run, persons_from_effect, summarize
from .residualize import (
    HullReport,
    ResidualPanel,
    ScreenReport,
    YearSeries,
    annualize,
    convex_hull_check,
    monthly_baseline,
    residualize,
    trend_divergence_screen,
)
from .scm import (
    EffectEstimate,
    ScmResult,
    WeightVector,
    effect_path,
    scm_estimate,
    solve_weights,
    synthetic_path,
)
from .sdid import SdidResult, SdidWeights, sdid_estimate, sdid_time_weights, sdid_unit_weights
from .synthgen import GeneratorConfig, generate_factor_panel, grid_oracle_weights

__version__ = "0.1.0"
