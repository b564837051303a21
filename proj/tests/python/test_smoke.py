import json
import math

import pytest

import opdyn


def test_ratio_classifier_examples():
    assert opdyn.ratio_classify("log")["verdict"] == "Good"
    bad = opdyn.ratio_classify("exp_pow a=1.5")
    assert bad["verdict"] == "Bad"
    assert bad["limit"] == 0.0
    geo = opdyn.ratio_classify("geom_inverse a=0.5", horizon=10_000)
    assert geo["verdict"] == "Bad"
    assert math.isclose(geo["limit"], 0.5, rel_tol=1e-9)


def test_shift_criteria():
    assert not opdyn.salas_check("step_bilateral", 0.5, 0, 10_000)["found"]
    mr = opdyn.mr_shift_check("inverse_step_bilateral", 3, 2, 0.1, 100)
    assert mr["certificate"]["n"] <= 100
    inv = opdyn.mr_invertible_check("inverse_step_bilateral", 2, 40, 1e3)
    assert inv["ns"] == list(range(10, 41))


def test_series():
    c = opdyn.fhc_series_check("constant c=2")
    assert c["verdict"] == "ConvergesCertified"
    assert abs(c["partial_sum"] - 1 / 3) < 1e-9


def test_fu_and_ap_pipeline():
    fu = opdyn.build_fu("constant c=1", "unilateral", "constant c=1", "2",
                        [("e(1)", 1e-3), ("e(1) + e(2)", 1e-3), ("e(2)", 1e-3)], 20_000, g=16)
    assert fu["report"]["clean"]
    assert all(v["missing"] == 0 for v in fu["verification"])
    hits = opdyn.hitting_set("0", "constant c=1", "unilateral", "constant c=2", "1", "e(1)", 0.5, 50)
    assert hits == []
    members = list(range(16, 20_000, 48))
    ap = opdyn.find_ap(members, 20_000, 4)
    assert ap == {"a": 16, "k": 48, "m": 4, "tau": 1}
    assert opdyn.find_ap([1, 2], 100, 3) is None


def test_mr_witness():
    r = opdyn.mr_witness("constant c=1", "unilateral", "constant c=1", "2", "e(1)", 0.01, 3, N=20_000)
    assert r["found"]
    assert r["reverified"]
    assert all(d < 0.01 for d in r["witness"]["distances"])


def test_symbols():
    assert opdyn.classify_symbol("0.8,1")["class"] == "FrequentlyHypercyclic-and-MultiplyRecurrent"
    assert opdyn.classify_symbol("0,0.5")["range"]["verdict"] == "DisjointInside"
    e = opdyn.eigen_check("2,1", 0.5 + 0.2j, 400)
    assert e["within_bound"]


def test_scenario_and_verify():
    report = opdyn.run_scenario({"scenario": "E4"})
    assert report["passed"]
    assert report["verdicts"]["summary"] == "Salas: none found up to N_max=10000"
    checks = opdyn.verify_report(report)
    assert checks and all(c["passed"] for c in checks)
    # JSON text is accepted as well
    assert opdyn.run_scenario(json.dumps({"scenario": "E7"}))["passed"]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        opdyn.run_scenario({"scenario": "E1", "colour": 1})
    with pytest.raises(ValueError):
        opdyn.ratio_classify("no_such_family")
    with pytest.raises(opdyn.ResourceCapExceeded):
        opdyn.run_scenario({"scenario": "E1", "horizons": {"N": "1e9"}})
    with pytest.raises(opdyn.InfeasibleDecay):
        opdyn.build_fu("constant c=1", "unilateral", "constant c=1", "1", [("e(1)", 1e-3)], 5000)
