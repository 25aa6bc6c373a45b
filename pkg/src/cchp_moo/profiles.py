"""Synthetic daily load profiles and the bundled scenario files.

Hourly demands are peak building loads multiplied by a seasonal factor and a
per-building shape template whose maximum is 1. Tariff bands follow a fixed
time-of-use calendar.

Run ``python -m cchp_moo.profiles`` to regenerate ``cchp_moo/data``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .model import PeriodInput, Scenario, SystemParams
from .scenario_io import dump_scenario

# Peak loads in kW: electricity, cooling, heating.
PEAK_LOADS = {
    "hotel": (3070.0, 5400.0, 7657.0),
    "office": (3198.0, 7056.0, 7050.0),
    "residential": (4166.0, 6145.0, 7080.0),
}

# Yuan/kWh by tariff band.
ELECTRICITY_PRICE = {
    "commercial": {"average": 0.87, "peak": 1.305, "low": 0.435},
    "residential": {"average": 0.5, "peak": 0.65, "low": 0.45},
}
GAS_PRICE = 0.22

TARIFF_CLASS = {"hotel": "commercial", "office": "commercial", "residential": "residential"}

PEAK_HOURS = frozenset({8, 9, 10, 18, 19, 20})
LOW_HOURS = frozenset({23, 0, 1, 2, 3, 4, 5, 6})

# Multipliers on peak (electricity, cooling, heating).
SEASON_FACTORS = {
    "transitional": (1.0, 0.4, 0.4),
    "summer": (0.85, 1.0, 0.1),
    "winter": (0.85, 0.1, 1.0),
}


def tariff_band(hour: int) -> str:
    if hour in PEAK_HOURS:
        return "peak"
    if hour in LOW_HOURS:
        return "low"
    return "average"


def _hours(values: dict[range | tuple, float], default: float) -> np.ndarray:
    out = np.full(24, default)
    for hours, v in values.items():
        out[list(hours)] = v
    return out


def shape_templates(building: str) -> tuple[np.ndarray, np.ndarray]:
    """(electric shape, thermal shape), each 24 hourly fractions of peak."""
    if building == "hotel":
        elec = _hours({range(0, 7): 0.85, range(18, 23): 1.0}, 0.95)
        thermal = _hours({range(0, 7): 0.9}, 1.0)
    elif building == "office":
        elec = _hours({(7, 18): 0.6, range(8, 18): 1.0}, 0.15)
        thermal = _hours({(7, 18): 0.5, range(8, 18): 1.0}, 0.05)
    elif building == "residential":
        elec = _hours({range(0, 6): 0.35, range(6, 9): 1.0, range(18, 23): 1.0}, 0.6)
        thermal = _hours({range(0, 6): 0.5, range(6, 9): 1.0, range(18, 23): 1.0}, 0.7)
    else:
        raise ValueError(f"unknown building type {building!r}")
    return elec, thermal


def synthesize_periods(building: str, season: str = "transitional") -> list[PeriodInput]:
    e_peak, c_peak, h_peak = PEAK_LOADS[building]
    fe, fc, fh = SEASON_FACTORS[season]
    elec, thermal = shape_templates(building)
    prices = ELECTRICITY_PRICE[TARIFF_CLASS[building]]
    return [
        PeriodInput(
            duration_h=1.0,
            demand_e=round(e_peak * fe * elec[h], 6),
            demand_c=round(c_peak * fc * thermal[h], 6),
            demand_h=round(h_peak * fh * thermal[h], 6),
            price_el=prices[tariff_band(h)],
            price_gas=GAS_PRICE,
        )
        for h in range(24)
    ]


def bundled_scenarios() -> dict[str, tuple[Scenario, dict]]:
    """Every bundled scenario with the provenance block written next to it."""
    out = {}
    for building in PEAK_LOADS:
        out[building] = (
            Scenario(periods=tuple(synthesize_periods(building)), params=SystemParams(), name=f"{building}-transitional"),
            {
                "description": f"24 hourly periods, transitional season, {building} building",
                "source": {"building": building, "season": "transitional", "peak_loads_kw": list(PEAK_LOADS[building])},
            },
        )
    e, c, h = PEAK_LOADS["residential"]
    rated = PeriodInput(1.0, e, c, h, ELECTRICITY_PRICE["residential"]["peak"], GAS_PRICE)
    out["rated_residential_t1"] = (
        Scenario(periods=(rated,), name="rated-residential"),
        {"description": "single period at residential peak loads, peak tariff", "source": {"building": "residential"}},
    )
    zero = PeriodInput(1.0, 0.0, 0.0, 0.0, ELECTRICITY_PRICE["residential"]["average"], GAS_PRICE)
    out["zero_demand"] = (
        Scenario(periods=(zero,), name="zero-demand"),
        {"description": "single period with no demand", "source": {}},
    )
    return out


def write_bundled(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (scenario, extra) in bundled_scenarios().items():
        path = directory / f"{name}.json"
        dump_scenario(scenario, path, extra)
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data"
    for p in write_bundled(target):
        print(p)
