"""Python smoke tests for the bound operations."""

import math

import pytest

import nullcone as nc


def test_horizon_radius():
    assert nc.horizon_radius(nc.KerrParams(1.0, 0.0)) == pytest.approx(2.0)
    assert nc.horizon_radius(nc.KerrParams(1.0, 0.6)) == pytest.approx(1.8)
    with pytest.raises(nc.DomainError):
        nc.KerrParams(1.0, 1.5)


def test_bl_metric_and_tortoise():
    p = nc.KerrParams(1.0, 0.0)
    g = nc.bl_metric(p, 4.0, math.pi / 2)
    assert g[0][0] == pytest.approx(-0.5)
    assert g[3][3] == pytest.approx(16.0)
    r_star, theta_star = nc.tortoise_coords(p, 4.0)
    assert r_star == pytest.approx(4.0)
    assert theta_star == pytest.approx(math.pi / 2)


def test_background_values():
    p = nc.KerrParams(1.0, 0.0)
    rc = nc.background_ricci(p, 10.0)
    f = math.sqrt(1.0 - 0.2)
    assert rc["trchi"] == pytest.approx(2.0 * f / 10.0, rel=1e-8)
    assert nc.background_rho(p, 10.0) == pytest.approx(-0.002, rel=1e-6)


def test_hodge_suites():
    rep = nc.hodge_verify(L=8, trials=5, seed=3)
    assert rep.ok
    assert rep.to_dict()["scalars"]["max_residual"] < 1e-9
    rep2 = nc.hodge_poincare(L=8, eps=0.01, trials=10, seed=3)
    d = rep2.to_dict()
    assert d["scalars"]["round_min"] >= 3.99
    assert d["scalars"]["perturbed_min"] >= 3.5


def test_case_and_peeling_tables():
    table = nc.case_table(5.0)
    assert [row["p"] for row in table] == [5.0, 4.0, 2.0, 0.0]
    assert [row["case"] for row in table] == ["a", "b", "c", "c"]
    t7 = nc.peeling_table(7.0)
    alpha = next(e for e in t7 if e["quantity"] == "ac")
    assert alpha["log_flag"]


def test_transport_and_evolution():
    assert nc.transport_check().ok
    rep = nc.bianchi_run(n=24, L=5)
    d = rep.to_dict()
    assert d["checks"]["bianchi-oracle-1e6"]
    assert d["checks"]["bianchi-r0-bounded"]


def test_report_json_roundtrip():
    rep = nc.hodge_verify(L=8, trials=2, seed=1)
    text = rep.to_json()
    assert '"pass": true' in text
