"""Reading, writing and validating scenario JSON files."""

from __future__ import annotations

import json
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import jsonschema

from .model import (
    Interpretation,
    OperatingCase,
    PeriodInput,
    ReferenceChain,
    Scenario,
    SystemParams,
)

_CASE_NAMES = {
    "full_system": OperatingCase.FULL_SYSTEM,
    "pgu_off": OperatingCase.PGU_OFF,
    "boiler_off": OperatingCase.BOILER_OFF,
}


class ScenarioError(ValueError):
    """A scenario file could not be parsed or failed validation."""


def schema() -> dict:
    return json.loads(resources.files("cchp_moo").joinpath("scenario.schema.json").read_text())


def parse_case(value) -> OperatingCase:
    if isinstance(value, str) and value.lower() in _CASE_NAMES:
        return _CASE_NAMES[value.lower()]
    try:
        return OperatingCase(int(value))
    except (TypeError, ValueError):
        raise ValueError(f"unknown operating case {value!r}; use 1, 2, 3 or {sorted(_CASE_NAMES)}") from None


def scenario_from_dict(doc: dict, source: str = "<scenario>") -> Scenario:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        raise ScenarioError(f"{source}: field {where}: {err.message}")
    try:
        params = SystemParams(**doc.get("params", {}))
        periods = [PeriodInput(**p) for p in doc["periods"]]
        return Scenario(
            periods=tuple(periods),
            params=params,
            case=parse_case(doc.get("case", 1)),
            interpretation=Interpretation(doc.get("interpretation", "literal")),
            bound_headroom=float(doc.get("bound_headroom", 1.5)),
            reference_chain=ReferenceChain(doc.get("reference_chain", ReferenceChain.BOILER_THEN_COMPONENT.value)),
            name=doc.get("name", ""),
        )
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def loads_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc, source)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    return loads_scenario(text, str(path))


def scenario_to_dict(scenario: Scenario, extra: dict | None = None) -> dict:
    doc = {
        "name": scenario.name,
        "case": int(scenario.case),
        "interpretation": scenario.interpretation.value,
        "bound_headroom": scenario.bound_headroom,
        "reference_chain": scenario.reference_chain.value,
        "params": asdict(scenario.params),
        "periods": [asdict(p) for p in scenario.periods],
    }
    if extra:
        doc.update(extra)
    return doc


def dump_scenario(scenario: Scenario, path: str | Path, extra: dict | None = None) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario, extra), indent=2) + "\n")


def bundled_names() -> list[str]:
    data = resources.files("cchp_moo").joinpath("data")
    return sorted(p.name[:-5] for p in data.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str) -> Path:
    name = name[:-5] if name.endswith(".json") else name
    path = Path(str(resources.files("cchp_moo").joinpath("data", f"{name}.json")))
    if not path.exists():
        raise ScenarioError(f"no bundled scenario {name!r}; available: {', '.join(bundled_names())}")
    return path


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_path(name))


def resolve_scenario(ref: str) -> Scenario:
    """Load ``ref`` as a file path, falling back to a bundled scenario name."""
    if Path(ref).exists():
        return load_scenario(ref)
    return load_bundled(ref)
