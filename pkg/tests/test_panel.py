import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synthpanel import TreatmentSpec, ValidationError, build_panel, descriptive_stats, split_periods


def test_singleton_panel():
    p = build_panel([("A", 2013, 4, 10.0)])
    assert p.units == ("A",) and p.periods == ((2013, 4),)
    assert p.values[0, 0] == 10.0 and p.observed.all()


def test_missing_cell_is_unobserved():
    p = build_panel([("A", 2013, 4, 1.0), ("A", 2013, 5, 2.0), ("B", 2013, 4, 3.0)])
    assert p.periods == ((2013, 4), (2013, 5))
    assert not p.observed[p.unit_index("B"), 1]
    assert math.isnan(p.values[1, 1])


def test_case_shape_panel():
    recs = [(u, y, m, 1000.0 + k) for k, u in enumerate("GABCDEFH")
            for y in range(2013, 2020) for m in range(4, 11)]
    p = build_panel(recs)
    assert (p.n_units, p.n_periods) == (8, 49)


def test_duplicate_rejected():
    with pytest.raises(ValidationError, match="duplicate.*'A'.*2013.*4"):
        build_panel([("A", 2013, 4, 1.0), ("A", 2013, 4, 2.0)])


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_nonfinite_rejected(bad):
    with pytest.raises(ValidationError):
        build_panel([("A", 2013, 4, bad)])


def test_panel_is_immutable():
    p = build_panel([("A", 2013, 4, 1.0)])
    with pytest.raises(ValueError):
        p.values[0, 0] = 3.0


records_st = st.lists(
    st.tuples(st.sampled_from(["A", "B", "C"]), st.integers(2010, 2014), st.integers(1, 12),
              st.floats(-1e6, 1e6, allow_nan=False)),
    min_size=1, max_size=40, unique_by=lambda r: r[:3],
)


@given(records_st)
def test_records_round_trip(recs):
    assert Counter(build_panel(recs).records()) == Counter(recs)


def _years_panel(first, last):
    return build_panel([("T", y, m, 1.0) for y in range(first, last + 1) for m in range(4, 11)]
                       + [("D", y, m, 2.0) for y in range(first, last + 1) for m in range(4, 11)])


def test_split_case_years():
    p = _years_panel(2013, 2019)
    pre, post = split_periods(p, TreatmentSpec("T", 2016))
    assert len(set(p.years[pre])) == 4 and len(set(p.years[post])) == 3


def test_split_t0_last_year_rejected():
    p = _years_panel(2013, 2019)
    with pytest.raises(ValidationError):
        split_periods(p, TreatmentSpec("T", 2019))


def test_split_t0_first_year():
    p = _years_panel(2013, 2019)
    pre, post = split_periods(p, TreatmentSpec("T", 2013))
    assert set(p.years[pre]) == {2013} and set(p.years[post]) == set(range(2014, 2020))


@given(st.integers(2013, 2018), st.sets(st.integers(1, 12), min_size=1))
def test_split_partitions_season(t0, season):
    p = build_panel([("T", y, m, 0.0) for y in range(2013, 2020) for m in range(1, 13)])
    spec = TreatmentSpec("T", t0, frozenset(season))
    pre, post = split_periods(p, spec)
    assert not set(pre) & set(post)
    assert set(pre) | set(post) == {t for t, (_, m) in enumerate(p.periods) if m in season}


def test_spec_rejects_treated_in_exclusions():
    with pytest.raises(ValidationError):
        TreatmentSpec("T", 2016, excluded_donors={"T"})


def test_stats_constant():
    s = descriptive_stats([5, 5, 5])
    assert (s.mean, s.sd, s.min, s.max, s.n) == (5, 0, 5, 5, 3)


def test_stats_sample_sd():
    x = [1.0, 2.0, 3.0, 4.0]
    # hand computation: squared deviations 2.25+0.25+0.25+2.25 = 5, over n-1 = 3
    expected_sd = math.sqrt(5 / 3)
    s = descriptive_stats(x)
    assert s.mean == 2.5 and s.min == 1 and s.max == 4 and s.n == 4
    assert s.sd == pytest.approx(expected_sd, rel=1e-12)
    assert s.sd == pytest.approx(1.291, abs=5e-4)


def test_stats_on_crossing_shaped_series():
    # four yearly means consistent with the treated pre-treatment row of the descriptive table
    d = math.sqrt(310.0)
    vals = [16201.0, 16537.0, 16361.0 + d, 16361.0 - d]
    s = descriptive_stats(vals)
    assert round(s.mean) == 16365 and round(s.sd) == 138
    assert (s.min, s.max, s.n) == (16201, 16537, 4)


def test_stats_single_and_empty():
    assert math.isnan(descriptive_stats([3.0]).sd)
    with pytest.raises(ValidationError):
        descriptive_stats([])


@given(st.floats(-1e9, 1e9, allow_nan=False), st.integers(1, 50))
def test_stats_mean_of_copies(x, k):
    assert descriptive_stats([x] * k).mean == pytest.approx(x, rel=1e-12, abs=1e-12)
