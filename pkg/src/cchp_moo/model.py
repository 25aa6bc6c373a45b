"""Energy-flow model of a combined cooling, heating and power (CCHP) plant.

Decision vectors are flat arrays of length ``3 * T`` laid out period by
period as ``(grid_electricity, pgu_fuel, boiler_fuel)``. Every evaluator in
this module is vectorized: it accepts either a single decision of shape
``(3T,)`` or a batch of shape ``(n, 3T)``.

Units: energies in kWh per period, currency in Yuan, emissions in grams.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

N_VARS_PER_PERIOD = 3


class OperatingCase(enum.IntEnum):
    """Which conversion units are available."""

    FULL_SYSTEM = 1
    PGU_OFF = 2
    BOILER_OFF = 3


class Interpretation(str, enum.Enum):
    """How the PGU term of the cost and emission objectives is priced.

    ``LITERAL`` charges the gas price and gas emission factor per kWh of PGU
    electric output. ``FUEL_BASED`` charges them per kWh of PGU fuel, which is
    how primary energy is always counted.
    """

    LITERAL = "literal"
    FUEL_BASED = "fuel_based"


class ReferenceChain(str, enum.Enum):
    """Heat supply chain of the no-CCHP reference system."""

    BOILER_THEN_COMPONENT = "boiler_then_component"
    COMPONENT_ONLY = "component_only"


@dataclass(frozen=True)
class PeriodInput:
    duration_h: float
    demand_e: float
    demand_c: float
    demand_h: float
    price_el: float
    price_gas: float

    def __post_init__(self) -> None:
        if not self.duration_h > 0:
            raise ValueError(f"duration_h must be positive, got {self.duration_h}")
        for name in ("demand_e", "demand_c", "demand_h"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        for name in ("price_el", "price_gas"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class SystemParams:
    """Conversion factors and efficiencies.

    Defaults are the reference plant values: PGU fuel map
    ``fuel = a * electric + b``, thermal and component efficiencies, and
    site-to-primary / CO2 factors for grid electricity and natural gas.
    """

    a: float = 2.67
    b: float = 11.43
    eta_pgu_th: float = 0.51
    eta_boiler: float = 0.9
    eta_cool: float = 0.7
    eta_heat: float = 0.85
    ecf_pec: float = 3.336
    fcf_pec_gas: float = 1.047
    ecf_cde: float = 203.74
    fcf_cde_gas: float = 200.0

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.b >= 0:
            raise ValueError("b must be non-negative")
        for name in ("eta_pgu_th", "eta_boiler", "eta_cool", "eta_heat"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        for name in ("ecf_pec", "fcf_pec_gas", "ecf_cde", "fcf_cde_gas"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        # electric plus recovered heat may not exceed the PGU fuel input
        if 1.0 / self.a + self.eta_pgu_th > 1.0 + 1e-12:
            raise ValueError(f"1/a + eta_pgu_th = {1.0 / self.a + self.eta_pgu_th:.4g} exceeds 1")


@dataclass(frozen=True)
class Scenario:
    periods: tuple[PeriodInput, ...]
    params: SystemParams = field(default_factory=SystemParams)
    case: OperatingCase = OperatingCase.FULL_SYSTEM
    interpretation: Interpretation = Interpretation.LITERAL
    bound_headroom: float = 1.5
    reference_chain: ReferenceChain = ReferenceChain.BOILER_THEN_COMPONENT
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "case", OperatingCase(self.case))
        object.__setattr__(self, "interpretation", Interpretation(self.interpretation))
        object.__setattr__(self, "reference_chain", ReferenceChain(self.reference_chain))
        if len(self.periods) < 1:
            raise ValueError("a scenario needs at least one period")
        if not self.bound_headroom >= 1:
            raise ValueError(f"bound_headroom must be >= 1, got {self.bound_headroom}")

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    @property
    def n_vars(self) -> int:
        return N_VARS_PER_PERIOD * len(self.periods)

    def with_options(self, **changes) -> "Scenario":
        """Copy of this scenario with some fields replaced."""
        fields = {
            "periods": self.periods,
            "params": self.params,
            "case": self.case,
            "interpretation": self.interpretation,
            "bound_headroom": self.bound_headroom,
            "reference_chain": self.reference_chain,
            "name": self.name,
        }
        fields.update(changes)
        return Scenario(**fields)

    def _column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.periods], dtype=float)

    @cached_property
    def demand_e(self) -> np.ndarray:
        return self._column("demand_e")

    @cached_property
    def demand_c(self) -> np.ndarray:
        return self._column("demand_c")

    @cached_property
    def demand_h(self) -> np.ndarray:
        return self._column("demand_h")

    @cached_property
    def price_el(self) -> np.ndarray:
        return self._column("price_el")

    @cached_property
    def price_gas(self) -> np.ndarray:
        return self._column("price_gas")

    @cached_property
    def heat_requirement(self) -> np.ndarray:
        """Thermal energy the cooling and heating components must receive."""
        p = self.params
        return self.demand_c / p.eta_cool + self.demand_h / p.eta_heat


class ObjectiveVector(NamedTuple):
    cost: float
    pec: float
    cde: float


class ViolationMeasure(NamedTuple):
    electric_deficit: float
    heat_deficit: float

    @property
    def total(self) -> float:
        return self.electric_deficit + self.heat_deficit


@dataclass(frozen=True)
class PeriodState:
    """Derived flows of one period (or arrays of them, broadcast elementwise).

    ``loss_total`` is the sum of the four component losses plus ``heat_dump``,
    the recovered or boiler heat that no component needs.
    """

    e_pgu: np.ndarray | float
    q_rcv: np.ndarray | float
    q_boiler: np.ndarray | float
    heat_pool: np.ndarray | float
    e_supply: np.ndarray | float
    e_excess: np.ndarray | float
    q_th_cool: np.ndarray | float
    q_th_heat: np.ndarray | float
    loss_pgu: np.ndarray | float
    loss_boiler: np.ndarray | float
    loss_cool: np.ndarray | float
    loss_heat: np.ndarray | float
    heat_dump: np.ndarray | float
    loss_total: np.ndarray | float


def _pgu_electric(x2, params: SystemParams):
    # Below the intercept the PGU is off: no output and no intercept fuel.
    return np.where(x2 >= params.b, (x2 - params.b) / params.a, 0.0)


def derive_state(
    x1,
    x2,
    x3,
    params: SystemParams,
    demand_e=0.0,
    demand_c=0.0,
    demand_h=0.0,
) -> PeriodState:
    """Derive the flows of the network from grid, PGU-fuel and boiler-fuel inputs.

    Recovered and boiler heat is routed to the cooling component first, then
    the heating component, each taking only what its demand requires. With
    the default zero demands all heat is dumped.
    """
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    e_pgu = _pgu_electric(x2, params)
    q_rcv = params.eta_pgu_th * x2
    q_boiler = params.eta_boiler * x3
    heat_pool = q_rcv + q_boiler
    e_supply = x1 + e_pgu

    q_th_cool = np.minimum(heat_pool, np.asarray(demand_c, dtype=float) / params.eta_cool)
    q_th_heat = np.minimum(heat_pool - q_th_cool, np.asarray(demand_h, dtype=float) / params.eta_heat)
    loss_pgu = x2 - e_pgu - q_rcv
    loss_boiler = x3 - q_boiler
    loss_cool = q_th_cool * (1.0 - params.eta_cool)
    loss_heat = q_th_heat * (1.0 - params.eta_heat)
    heat_dump = heat_pool - q_th_cool - q_th_heat
    return PeriodState(
        e_pgu=e_pgu,
        q_rcv=q_rcv,
        q_boiler=q_boiler,
        heat_pool=heat_pool,
        e_supply=e_supply,
        e_excess=np.maximum(0.0, e_supply - demand_e),
        q_th_cool=q_th_cool,
        q_th_heat=q_th_heat,
        loss_pgu=loss_pgu,
        loss_boiler=loss_boiler,
        loss_cool=loss_cool,
        loss_heat=loss_heat,
        heat_dump=heat_dump,
        loss_total=loss_pgu + loss_boiler + loss_cool + loss_heat + heat_dump,
    )


def _as_batch(decision, scenario: Scenario) -> tuple[np.ndarray, bool]:
    x = np.asarray(decision, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.ndim != 2 or x.shape[1] != scenario.n_vars:
        raise ValueError(
            f"decision has {x.shape[-1]} variables, scenario with "
            f"{scenario.n_periods} periods needs {scenario.n_vars}"
        )
    return x.reshape(x.shape[0], scenario.n_periods, N_VARS_PER_PERIOD), single


def evaluate(decisions, scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Objectives and constraint deficits for a batch of decisions.

    Returns:
        ``(F, V)`` where ``F`` has shape ``(n, 3)`` with columns cost, PEC and
        CDE, and ``V`` has shape ``(n, 2)`` with electric and heat deficits.
    """
    x, _ = _as_batch(decisions, scenario)
    p = scenario.params
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    e_pgu = _pgu_electric(x2, p)
    pgu_on = x2 >= p.b

    if scenario.interpretation is Interpretation.LITERAL:
        pgu_priced = e_pgu
    else:
        pgu_priced = x2
    gas = scenario.price_gas
    cost = scenario.price_el * x1 + gas * pgu_priced + gas * x3
    pec = p.ecf_pec * x1 + p.fcf_pec_gas * np.where(pgu_on, p.a * e_pgu + p.b, 0.0) + p.fcf_pec_gas * x3
    cde = p.ecf_cde * x1 + p.fcf_cde_gas * pgu_priced + p.fcf_cde_gas * x3
    F = np.stack([cost.sum(axis=1), pec.sum(axis=1), cde.sum(axis=1)], axis=1)

    heat_pool = p.eta_pgu_th * x2 + p.eta_boiler * x3
    e_def = np.maximum(0.0, scenario.demand_e - (x1 + e_pgu)).sum(axis=1)
    h_def = np.maximum(0.0, scenario.heat_requirement - heat_pool).sum(axis=1)
    V = np.stack([e_def, h_def], axis=1)
    return F, V


def eval_objectives(decision, scenario: Scenario) -> ObjectiveVector:
    F, _ = evaluate(np.asarray(decision, dtype=float).reshape(1, -1), scenario)
    return ObjectiveVector(*(float(v) for v in F[0]))


def violation(decision, scenario: Scenario) -> ViolationMeasure:
    _, V = evaluate(np.asarray(decision, dtype=float).reshape(1, -1), scenario)
    return ViolationMeasure(float(V[0, 0]), float(V[0, 1]))


def reference_fuel(scenario: Scenario) -> np.ndarray:
    """Per-period gas burned by the reference system for cooling and heating."""
    p = scenario.params
    if scenario.reference_chain is ReferenceChain.BOILER_THEN_COMPONENT:
        return scenario.heat_requirement / p.eta_boiler
    return scenario.heat_requirement


def reference_objectives(scenario: Scenario) -> ObjectiveVector:
    """Objectives of supplying the same demands without the CCHP plant.

    Electricity comes from the grid; cooling and heating come from gas
    through the configured reference heat chain.
    """
    p = scenario.params
    fuel = reference_fuel(scenario)
    e = scenario.demand_e
    return ObjectiveVector(
        cost=float(np.sum(scenario.price_el * e + scenario.price_gas * fuel)),
        pec=float(np.sum(p.ecf_pec * e + p.fcf_pec_gas * fuel)),
        cde=float(np.sum(p.ecf_cde * e + p.fcf_cde_gas * fuel)),
    )


def improvement_rate(ref: Sequence[float], val: Sequence[float]) -> np.ndarray:
    """Percentage reduction of each objective relative to ``ref``."""
    ref = np.asarray(ref, dtype=float)
    val = np.asarray(val, dtype=float)
    if np.any(ref <= 0):
        raise ValueError(f"reference objectives must all be positive, got {ref.tolist()}")
    return 100.0 * (ref - val) / ref


def bounds(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Box bounds ``(lo, hi)`` for every decision variable.

    Upper bounds are demand-implied maxima scaled by ``bound_headroom``:
    grid purchase up to the electric demand, PGU fuel enough to cover both
    the electric demand and the whole heat requirement, boiler fuel enough
    for the heat requirement. Units disabled by the operating case get 0.
    """
    p = scenario.params
    k = scenario.bound_headroom
    heat = scenario.heat_requirement
    hi = np.empty((scenario.n_periods, N_VARS_PER_PERIOD))
    hi[:, 0] = k * scenario.demand_e
    hi[:, 1] = k * (p.a * scenario.demand_e + p.b + heat / p.eta_pgu_th)
    hi[:, 2] = k * heat / p.eta_boiler
    if scenario.case is OperatingCase.PGU_OFF:
        hi[:, 1] = 0.0
    elif scenario.case is OperatingCase.BOILER_OFF:
        hi[:, 2] = 0.0
    hi = hi.ravel()
    return np.zeros_like(hi), hi


def apply_case(decision, scenario: Scenario) -> np.ndarray:
    """Zero the variables of units that the operating case shuts down."""
    x = np.array(decision, dtype=float)
    view = x.reshape(*x.shape[:-1], scenario.n_periods, N_VARS_PER_PERIOD)
    if scenario.case is OperatingCase.PGU_OFF:
        view[..., 1] = 0.0
    elif scenario.case is OperatingCase.BOILER_OFF:
        view[..., 2] = 0.0
    return x
