"""Synthetic panels with known effects, and brute-force grid oracles.

All draws come from numpy's ``PCG64`` bit generator seeded with the config
seed, so a given config always yields the same panel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .panel import DEFAULT_SEASON, Panel, TreatmentSpec, ValidationError


@dataclass(frozen=True)
class GeneratorConfig:
    """Factor-model data generating process.

    ``Y_it = alpha_i + beta_t + sum_k L_ik F_kt + eps_it + tau * [i treated, t post]``

    Unit levels ``alpha_i`` are uniform on ``level_range``; ``beta_t`` is a
    seasonal profile plus a year effect; each factor ``F_k`` is a random walk
    over years held constant within a year; loadings are
    ``N(0, loading_scale**2)``; noise is ``N(0, noise_sd**2)`` per cell.
    Unit 0 (``treated_unit``) is the treated unit.
    """

    n_units: int = 8
    first_year: int = 2013
    last_year: int = 2019
    t0_year: int = 2016
    season_months: frozenset[int] = DEFAULT_SEASON
    n_factors: int = 2
    loading_scale: float = 20.0
    noise_sd: float = 50.0
    tau: float = 0.0
    seed: int = 0
    level_range: tuple[float, float] = (1800.0, 8000.0)
    seasonal_amplitude: float = 800.0
    year_effect_sd: float = 40.0
    treated_unit: str = "treated"
    unit_prefix: str = "donor"

    def __post_init__(self) -> None:
        if self.n_factors < 0:
            raise ValidationError("n_factors must be >= 0")
        if self.noise_sd < 0:
            raise ValidationError("noise_sd must be >= 0")
        if self.n_units < 2:
            raise ValidationError("need a treated unit and at least one donor")
        if not self.first_year <= self.t0_year < self.last_year:
            raise ValidationError("t0_year must leave at least one pre and one post year")

    @property
    def unit_names(self) -> tuple[str, ...]:
        width = max(2, len(str(self.n_units - 1)))
        return (self.treated_unit,) + tuple(
            f"{self.unit_prefix}{k:0{width}d}" for k in range(1, self.n_units)
        )

    def treatment_spec(self, **kw) -> TreatmentSpec:
        return TreatmentSpec(self.treated_unit, self.t0_year, self.season_months, **kw)


def generate_factor_panel(cfg: GeneratorConfig) -> tuple[Panel, float]:
    """Draw a complete panel from the factor model. Returns ``(panel, tau)``."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    years = np.arange(cfg.first_year, cfg.last_year + 1)
    months = np.array(sorted(cfg.season_months))
    periods = [(int(y), int(m)) for y in years for m in months]
    n, T, K = cfg.n_units, len(periods), cfg.n_factors
    year_of = np.repeat(np.arange(len(years)), len(months))
    month_of = np.tile(months, len(years))

    alpha = rng.uniform(*cfg.level_range, size=n)
    seasonal = np.sin(2 * np.pi * (month_of - 4) / 12.0)
    year_eff = rng.normal(0.0, cfg.year_effect_sd, size=len(years))[year_of]
    beta = cfg.seasonal_amplitude * seasonal + year_eff
    Y = alpha[:, None] + beta[None, :]
    if K:
        F = np.cumsum(rng.normal(0.0, 1.0, size=(K, len(years))), axis=1)[:, year_of]
        L = rng.normal(0.0, cfg.loading_scale, size=(n, K))
        Y = Y + L @ F
    Y = Y + rng.normal(0.0, cfg.noise_sd, size=(n, T)) if cfg.noise_sd > 0 else Y
    post = np.array([y > cfg.t0_year for y, _ in periods])
    Y[0, post] += cfg.tau
    return Panel(cfg.unit_names, tuple(periods), Y, np.ones((n, T), dtype=bool)), float(cfg.tau)


def simplex_grid(d: int, step: float) -> np.ndarray:
    """All points of the unit simplex in R^d whose coordinates are multiples of ``step``."""
    if not 0 < step <= 0.5:
        raise ValidationError("step must lie in (0, 0.5]")
    N = int(round(1.0 / step))
    if abs(N * step - 1.0) > 1e-9:
        raise ValidationError("1/step must be an integer")
    if d == 1:
        return np.ones((1, 1))
    if d == 2:
        a = np.arange(N + 1)
        return np.column_stack([a, N - a]) / N
    if d == 3:
        a, b = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
        keep = a + b <= N
        a, b = a[keep], b[keep]
        return np.column_stack([a, b, N - a - b]) / N
    raise ValidationError(f"grid oracle supports at most 3 donors, got {d}")


def grid_oracle_weights(pre_treated, pre_donors, step: float = 0.001) -> tuple[np.ndarray, float]:
    """Exhaustive search of the simplex grid for the best pre-period fit."""
    b = np.asarray(pre_treated, dtype=float)
    A = np.asarray(pre_donors, dtype=float)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise ValidationError("dimension mismatch")
    if A.shape[1] > 3:
        raise ValidationError(f"grid oracle supports at most 3 donors, got {A.shape[1]}")
    W = simplex_grid(A.shape[1], step)
    R = A @ W.T - b[:, None]
    obj = np.einsum("ij,ij->j", R, R)
    k = int(np.argmin(obj))
    return W[k], float(obj[k])


def grid_oracle_intercept(A, b, step: float = 0.01, penalty: float = 0.0,
                          n_intercept: int = 200) -> tuple[np.ndarray, float, float]:
    """Grid search over simplex weights and an intercept for

    ``sum (c + A w - b)**2 + penalty * |w|**2``.

    The intercept is scanned on ``n_intercept`` points across
    ``[-2 r, 2 r]`` with ``r`` the largest absolute entry of ``A`` and ``b``.
    Returns ``(weights, intercept, objective)``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise ValidationError("dimension mismatch")
    W = simplex_grid(A.shape[1], step)
    r = max(float(np.max(np.abs(A))), float(np.max(np.abs(b))), 1e-12)
    base = A @ W.T - b[:, None]
    pen = penalty * np.einsum("ij,ij->i", W, W)
    best = (None, 0.0, np.inf)
    for c in np.linspace(-2 * r, 2 * r, n_intercept):
        R = base + c
        obj = np.einsum("ij,ij->j", R, R) + pen
        k = int(np.argmin(obj))
        if obj[k] < best[2]:
            best = (W[k], float(c), float(obj[k]))
    return best
