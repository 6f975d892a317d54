import math

import pytest

import gelfand as g


def test_nonlinearity_totals():
    assert g.Nonlinearity.exponential().F_total == pytest.approx(1.0)
    assert g.Nonlinearity.mems(2.0).F_total == pytest.approx(1.0 / 3.0)
    value, argmax, attained = g.Nonlinearity.exponential().sup_ratio()
    assert value == pytest.approx(math.exp(-1.0))
    assert argmax == pytest.approx(1.0)
    assert attained


def test_torsion_closed_form():
    t = g.torsion(g.FlowProfile.inverse_quadratic(), 1.0, 2, 512)
    assert t["psi_max"] == pytest.approx((1 + math.log(2)) / 8, rel=1e-9)
    assert t["psi"][-1] == 0.0
    assert len(t["r"]) == 513


def test_lambda_star_planar():
    lo, hi = g.lambda_star(g.FlowProfile.constant(0.0), 0.0, 2, M=512, tol=1e-6)
    assert lo <= hi
    assert lo == pytest.approx(2.0, rel=1e-4)


def test_bounds_report():
    b = g.bounds_report(g.FlowProfile.constant(0.0), 0.0, 2, M=512, bisect=False)
    assert b["upper_F"] == pytest.approx(4.0)
    assert b["lower_basic"] == pytest.approx(4 / math.e)
    assert "lambda_lo" not in b


def test_sweep_and_errors():
    r = g.sweep_A(g.FlowProfile.inverse_quadratic(), 2, [0.0, 2.0], M=128, tol=1e-4)
    assert r["columns"][0] == "A"
    assert len(r["rows"]) == 2
    assert r["all_pass"]
    with pytest.raises(g.DomainError):
        g.Nonlinearity.mems(0.5)
    with pytest.raises(g.OverflowError):
        g.torsion(g.FlowProfile.constant(-4.0), 1000.0, 2, 64)
    assert g.config_hash("a") == "af63dc4c8601ec8c"
