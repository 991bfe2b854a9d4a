import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synthpanel import (
    GeneratorConfig,
    TreatmentSpec,
    ValidationError,
    YearSeries,
    annualize,
    bootstrap_ci,
    generate_factor_panel,
    in_space_placebo,
    residualize,
)
from synthpanel.inference import replicate_rng


def _ys(seed=0, tau=0.0, n_units=8, noise=50.0, **kw):
    cfg = GeneratorConfig(n_units=n_units, seed=seed, tau=tau, noise_sd=noise, **kw)
    panel, _ = generate_factor_panel(cfg)
    spec = cfg.treatment_spec()
    return annualize(residualize(panel, spec), spec), spec


def test_degenerate_pool_gives_zero_interval():
    row = np.array([3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0])
    Y = np.tile(row, (6, 1))
    ys = YearSeries(("T",) + tuple(f"d{k}" for k in range(5)), tuple(range(2013, 2020)), Y,
                    np.ones(Y.shape, dtype=int))
    spec = TreatmentSpec("T", 2016)
    for est in ("scm", "sdid"):
        b = bootstrap_ci(ys, spec, est, B=50, m=5, seed=1)
        assert np.allclose(b.effects, 0.0, atol=1e-9)
        assert abs(b.lower) < 1e-9 and abs(b.upper) < 1e-9


@pytest.mark.parametrize("est", ["scm", "sdid"])
def test_bootstrap_bookkeeping(est):
    ys, spec = _ys(seed=3, tau=-150.0)
    b = bootstrap_ci(ys, spec, est, B=40, m=7, seed=99)
    assert b.completed + b.n_degenerate == b.B == 40
    assert b.lower <= b.upper
    lines = b.replicates_csv().splitlines()
    assert lines[0] == "replicate,effect,degenerate" and len(lines) == 41
    head, row = b.summary_csv().splitlines()
    assert head == "estimator,point,lower,upper,level,B,B_completed"
    assert row.startswith(f"{est},") and row.endswith(",40,40")


def test_default_m_is_pool_size():
    ys, spec = _ys(seed=1)
    assert bootstrap_ci(ys, spec, "scm", B=3, seed=0).m == 7


def test_replicates_depend_only_on_seed_and_index():
    a = replicate_rng(42, 7).integers(0, 1000, size=5)
    b = replicate_rng(42, 7).integers(0, 1000, size=5)
    c = replicate_rng(42, 8).integers(0, 1000, size=5)
    assert (a == b).all() and not (a == c).all()


def test_parallel_matches_serial():
    ys, spec = _ys(seed=5, tau=-100.0)
    serial = bootstrap_ci(ys, spec, "sdid", B=30, seed=7, workers=1)
    parallel = bootstrap_ci(ys, spec, "sdid", B=30, seed=7, workers=3)
    assert serial.replicates_csv() == parallel.replicates_csv()


def test_resample_never_contains_treated(monkeypatch):
    import synthpanel.inference as inf

    ys, spec = _ys(seed=2)
    tr = ys.row(spec.treated_unit)
    seen = []

    def spy(estimator, treated, donors, *a, **k):
        seen.append(donors.copy())
        return 0.0

    monkeypatch.setattr(inf, "average_effect", spy)
    bootstrap_ci(ys, spec, "scm", B=25, m=7, seed=3)
    for D in seen[1:]:
        assert not any(np.array_equal(D[:, j], tr) for j in range(D.shape[1]))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 0.9), st.floats(0.01, 0.09))
def test_wider_level_never_narrows(level, extra):
    ys, spec = _ys(seed=4, tau=-50.0)
    lo = bootstrap_ci(ys, spec, "scm", B=60, seed=11, level=level)
    hi = bootstrap_ci(ys, spec, "scm", B=60, seed=11, level=level + extra)
    assert hi.lower <= lo.lower and hi.upper >= lo.upper


def test_single_distinct_donor_replicate_proceeds():
    # two donors and m=2: some replicates draw the same donor twice
    Y = np.array([[0.0, 1.0, 2.0, 3.0, 5.0], [0.0, 1.0, 2.0, 3.0, 4.0], [1.0, 0.0, 1.0, 0.0, 1.0]])
    ys = YearSeries(("T", "a", "b"), (2013, 2014, 2015, 2016, 2017), Y, np.ones(Y.shape, dtype=int))
    b = bootstrap_ci(ys, TreatmentSpec("T", 2016), "scm", B=40, m=2, seed=0)
    assert b.n_degenerate == 0


def test_failing_replicates_marked_degenerate(monkeypatch):
    import synthpanel.inference as inf

    ys, spec = _ys(seed=6)
    real = inf.average_effect
    calls = {"n": 0}

    def flaky(*a, **k):
        calls["n"] += 1
        if calls["n"] > 1 and calls["n"] % 3 == 0:
            raise ValidationError("boom")
        return real(*a, **k)

    monkeypatch.setattr(inf, "average_effect", flaky)
    b = bootstrap_ci(ys, spec, "scm", B=30, seed=1)
    assert b.n_degenerate == 10 and b.completed == 20
    assert "1" in {ln.split(",")[2] for ln in b.replicates_csv().splitlines()[1:]}


def test_bootstrap_argument_errors():
    ys, spec = _ys()
    with pytest.raises(ValidationError):
        bootstrap_ci(ys, spec, "lasso")
    with pytest.raises(ValidationError):
        bootstrap_ci(ys, spec, "scm", B=0)
    with pytest.raises(ValidationError):
        bootstrap_ci(ys, spec, "scm", m=1)


@pytest.mark.parametrize("est", ["scm", "sdid"])
def test_placebo_null_additive_panel(est):
    ys, spec = _ys(seed=8, noise=0.0, n_factors=0)
    res = in_space_placebo(ys, spec, est)
    assert len(res.effects) == 7
    assert np.all(np.abs(res.effects) < 1e-6) and abs(res.true_effect) < 1e-6


@pytest.mark.parametrize("est", ["scm", "sdid"])
def test_placebo_injected_effect_ranks_first(est):
    ys, spec = _ys(seed=12, tau=-400.0, noise=20.0, n_factors=1, loading_scale=5.0)
    res = in_space_placebo(ys, spec, est)
    assert res.rank == 1


def test_placebo_needs_three_donors():
    ys, spec = _ys(n_units=3)
    with pytest.raises(ValidationError):
        in_space_placebo(ys, spec)
