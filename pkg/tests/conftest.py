import numpy as np
import pytest

from cchp_moo.model import PeriodInput, Scenario, SystemParams


def single_period(e=0.0, c=0.0, h=0.0, price_el=0.65, price_gas=0.22, **options) -> Scenario:
    return Scenario(periods=(PeriodInput(1.0, e, c, h, price_el, price_gas),), **options)


def random_scenario(rng: np.random.Generator, n_periods: int = 3, **options) -> Scenario:
    """Physically consistent random plant and demand profile."""
    a = rng.uniform(2.0, 4.0)
    params = SystemParams(
        a=a,
        b=rng.uniform(0.0, 30.0),
        eta_pgu_th=rng.uniform(0.05, 1.0 - 1.0 / a),
        eta_boiler=rng.uniform(0.5, 1.0),
        eta_cool=rng.uniform(0.4, 1.0),
        eta_heat=rng.uniform(0.4, 1.0),
        ecf_pec=rng.uniform(1.0, 5.0),
        fcf_pec_gas=rng.uniform(0.8, 1.5),
        ecf_cde=rng.uniform(100.0, 400.0),
        fcf_cde_gas=rng.uniform(100.0, 300.0),
    )
    periods = tuple(
        PeriodInput(1.0, *rng.uniform(0.0, 5000.0, 3), rng.uniform(0.3, 1.5), rng.uniform(0.1, 0.5))
        for _ in range(n_periods)
    )
    return Scenario(periods=periods, params=params, **options)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
