"""Hand-built fixtures shared by several test modules."""

import math

import numpy as np

from synthpanel import TreatmentSpec, build_panel

YEARS = range(2013, 2020)
MONTHS = range(4, 11)

_s = math.sqrt(133.25)
# treated yearly deviations: pre mean 0, sd 138, min -164, max 173; post mean -61.3, min -238, max 243
TREATED_DEV = (-164.0, 173.0, -4.5 + _s, -4.5 - _s, -238.0, 243.0, -188.9)
DONOR_DEV = {
    "Bernina": (-292.0, 347.0, 100.0, -155.0, 120.0, 80.0, 516.0),
    "Frejus": (200.0, -250.0, -200.0, 250.0, -363.0, 150.0, 140.0),
    "Flueela": (10.0, -10.0, 20.0, -20.0, 90.0, 110.0, 100.0),
    "GrandStBernard": (-30.0, 30.0, -15.0, 15.0, 60.0, 70.0, 90.0),
    "Julier": (50.0, -50.0, 0.0, 0.0, 130.0, 120.0, 160.0),
    "MontBlanc": (-5.0, 5.0, 5.0, -5.0, 100.0, 95.0, 140.0),
    "SanBernardino": (25.0, -25.0, -25.0, 25.0, 70.0, 150.0, 210.0),
}
_SEASON_MEAN = sum(math.sin(2 * math.pi * (m - 4) / 12) for m in MONTHS) / len(MONTHS)
LEVELS = {"Gotthard": 16365.0, "Bernina": 2140.0, "Frejus": 2300.0, "Flueela": 2500.0,
          "GrandStBernard": 2700.0, "Julier": 2900.0, "MontBlanc": 3300.0, "SanBernardino": 7600.0}


def crossing_panel():
    """Monthly panel whose yearly means match published descriptive ranges of the crossings.

    Each unit is level + a fixed seasonal profile + a yearly deviation, so
    residualized yearly means equal the (pre-centered) deviations exactly.
    """
    recs = []
    for unit, level in LEVELS.items():
        dev = TREATED_DEV if unit == "Gotthard" else DONOR_DEV[unit]
        for k, y in enumerate(YEARS):
            for m in MONTHS:
                season = 0.2 * level * (math.sin(2 * math.pi * (m - 4) / 12) - _SEASON_MEAN)
                recs.append((unit, y, m, level + season + dev[k]))
    return build_panel(recs), TreatmentSpec("Gotthard", 2016)


def naive_baseline(panel, spec):
    """Double-loop recomputation of pre-treatment monthly means."""
    out = np.full((panel.n_units, 12), np.nan)
    for i in range(panel.n_units):
        for m in spec.season_months:
            total, count = 0.0, 0
            for t, (y, mm) in enumerate(panel.periods):
                if mm == m and y <= spec.t0_year and panel.observed[i, t]:
                    total += panel.values[i, t]
                    count += 1
            out[i, m - 1] = total / count
    return out
