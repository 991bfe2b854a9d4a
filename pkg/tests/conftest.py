import numpy as np
import pytest

from synthpanel import GeneratorConfig, TreatmentSpec, build_panel, generate_factor_panel


@pytest.fixture
def case_shaped():
    """Treated unit plus 7 donors, April-October 2013-2019, drawn from the generator."""
    cfg = GeneratorConfig(n_units=8, seed=11, tau=-150.0)
    panel, tau = generate_factor_panel(cfg)
    return panel, cfg.treatment_spec(), tau


def additive_records(units, years, months, seed=0):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(100, 5000, size=len(units))
    beta = {(y, m): rng.normal(0, 300) for y in years for m in months}
    return [(u, y, m, float(alpha[i] + beta[(y, m)]))
            for i, u in enumerate(units) for y in years for m in months]


@pytest.fixture
def tiny_spec():
    return TreatmentSpec("A", 2014, frozenset({4, 5}))


@pytest.fixture
def tiny_panel():
    recs = [("A", 2013, 4, 10.0), ("A", 2014, 4, 12.0), ("A", 2015, 4, 14.0),
            ("A", 2013, 5, 20.0), ("A", 2014, 5, 22.0), ("A", 2015, 5, 30.0),
            ("B", 2013, 4, 5.0), ("B", 2014, 4, 5.0), ("B", 2015, 4, 5.0),
            ("B", 2013, 5, 7.0), ("B", 2014, 5, 9.0), ("B", 2015, 5, 8.0),
            ("C", 2013, 4, 1.0), ("C", 2014, 4, 3.0), ("C", 2015, 4, 2.0),
            ("C", 2013, 5, 1.0), ("C", 2014, 5, 1.0), ("C", 2015, 5, 1.0)]
    return build_panel(recs)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(capsys):
    """Record one PASS/FAIL line for an acceptance criterion and echo it."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
