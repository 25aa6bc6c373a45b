import json

import numpy as np
import pytest

from cchp_moo.frontio import front_csv, read_front_csv, rounded, write_front_csv
from cchp_moo.model import Interpretation, OperatingCase, SystemParams, evaluate
from cchp_moo.profiles import PEAK_LOADS, bundled_scenarios
from cchp_moo.scenario_io import (
    ScenarioError,
    bundled_names,
    bundled_path,
    dump_scenario,
    load_bundled,
    load_scenario,
    loads_scenario,
    parse_case,
    resolve_scenario,
    scenario_to_dict,
)


def test_bundled_files_match_synthesis():
    synthesized = bundled_scenarios()
    assert sorted(synthesized) == bundled_names()
    for name, (scenario, _) in synthesized.items():
        assert load_bundled(name) == scenario


def test_default_constants_verbatim():
    assert SystemParams() == SystemParams(2.67, 11.43, 0.51, 0.9, 0.7, 0.85, 3.336, 1.047, 203.74, 200.0)
    assert PEAK_LOADS == {
        "hotel": (3070.0, 5400.0, 7657.0),
        "office": (3198.0, 7056.0, 7050.0),
        "residential": (4166.0, 6145.0, 7080.0),
    }
    rated = load_bundled("rated_residential_t1").periods[0]
    assert (rated.demand_e, rated.demand_c, rated.demand_h, rated.price_el, rated.price_gas) == (
        4166.0, 6145.0, 7080.0, 0.65, 0.22,
    )


def test_transitional_profiles_peak_at_rated_loads():
    for building, peaks in PEAK_LOADS.items():
        sc = load_bundled(building)
        assert sc.n_periods == 24
        assert sc.demand_e.max() == pytest.approx(peaks[0])
        assert sc.demand_c.max() > 0 and sc.demand_h.max() > 0


def test_round_trip(tmp_path):
    sc = load_bundled("office").with_options(case=OperatingCase.BOILER_OFF, interpretation=Interpretation.FUEL_BASED)
    dump_scenario(sc, tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json") == sc


def test_resolve_path_or_name(tmp_path):
    assert resolve_scenario("hotel") == load_bundled("hotel")
    assert resolve_scenario(str(bundled_path("hotel"))) == load_bundled("hotel")
    with pytest.raises(ScenarioError, match="available"):
        resolve_scenario("no_such_scenario")


def test_malformed_json_reports_position():
    with pytest.raises(ScenarioError, match=r"line 2, column \d+"):
        loads_scenario('{"periods": [\n  oops]}', "bad.json")


def test_missing_field_is_named():
    doc = scenario_to_dict(load_bundled("zero_demand"))
    del doc["periods"][0]["price_el"]
    with pytest.raises(ScenarioError, match="periods/0.*price_el"):
        loads_scenario(json.dumps(doc))


def test_out_of_range_value_is_named():
    doc = scenario_to_dict(load_bundled("zero_demand"))
    doc["periods"][0]["demand_h"] = -3
    with pytest.raises(ScenarioError, match="periods/0/demand_h"):
        loads_scenario(json.dumps(doc))
    doc = scenario_to_dict(load_bundled("zero_demand"))
    doc["params"]["a"] = 1.5
    with pytest.raises(ScenarioError, match="exceeds 1"):
        loads_scenario(json.dumps(doc))


def test_parse_case():
    assert parse_case("2") is OperatingCase.PGU_OFF
    assert parse_case("boiler_off") is OperatingCase.BOILER_OFF
    with pytest.raises(ValueError):
        parse_case("4")


def test_front_csv_round_trip(tmp_path, rng):
    sc = load_bundled("residential")
    X = rng.uniform(0, 5000, (6, sc.n_vars))
    F, V = evaluate(X, sc)
    write_front_csv(tmp_path / "f.csv", X, F, V.sum(axis=1))
    back = read_front_csv(tmp_path / "f.csv")
    np.testing.assert_array_equal(back.X, rounded(X))
    np.testing.assert_array_equal(back.F, rounded(F))
    # re-evaluating the stored decisions reproduces the stored objectives
    F2, _ = evaluate(back.X, sc)
    np.testing.assert_allclose(F2, back.F, rtol=1e-9)
    header = (tmp_path / "f.csv").read_text().splitlines()[0].split(",")
    assert header[:3] == ["x1_1", "x2_1", "x3_1"] and header[-4:] == ["cost", "pec", "cde", "violation"]


def test_front_csv_without_decisions(tmp_path):
    (tmp_path / "ext.csv").write_text("cost,pec,cde\n1,2,3\n4,5,6\n")
    data = read_front_csv(tmp_path / "ext.csv")
    assert data.X.shape == (2, 0)
    np.testing.assert_array_equal(data.violation, [0, 0])
    (tmp_path / "bad.csv").write_text("cost,pec\n1,2\n")
    with pytest.raises(ValueError, match="cde"):
        read_front_csv(tmp_path / "bad.csv")


def test_front_csv_is_stable_text():
    X, F = np.array([[1 / 3, 2.0, 0.0]]), np.array([[1e-13, 12345.678901234567, 2.5]])
    assert front_csv(X, F) == front_csv(X, F)
    assert "0.333333333333" in front_csv(X, F)
