import math

import numpy as np
import pytest

import qdef


def test_qnumber_and_thresholds():
    assert qdef.qnumber(2.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    c0, c1, c2 = qdef.thresholds(1.013)
    assert c0 == pytest.approx(1.0 / math.sin(1.013) ** 2, rel=1e-14)
    assert c1 == pytest.approx(1.0 / (4 * math.sin(1.013 / 2) ** 2), rel=1e-14)
    assert c2 == pytest.approx(1.0 / (4 * math.cos(1.013 / 2) ** 2), rel=1e-14)


def test_singular_s_raises():
    with pytest.raises(ValueError):
        qdef.thresholds(0.0)


def test_finite_representation_closes():
    s = 0.5
    c = qdef.qnumber(1.5, s) ** 2
    reps = [r for r in qdef.classify(s, c) if r["finite"] and r["N"] == 2]
    assert reps
    basis = reps[0]["m_list"]
    jz, jp, jm = qdef.build_rep(s, c, basis)
    assert np.allclose(jm, jp.T)
    report = qdef.verify_algebra(s, c, basis)
    assert max(report["jz_jpm"], report["jp_jm"], report["casimir"]) < 1e-10


def test_poschl_teller_levels():
    r = np.arange(-15, 15 + 1e-9, 1e-3)
    v = -6 / np.cosh(r) ** 2
    levels = qdef.eigenvalues(float(r[0]), 1e-3, v.tolist(), 2)
    assert levels[0] == pytest.approx(-4, abs=5e-3)
    assert levels[1] == pytest.approx(-1, abs=5e-3)


def test_potential_is_periodic():
    s = 0.9
    period = math.pi / math.sqrt(math.cos(s))
    n = 2000
    r, v, mask = qdef.potential(s, 1.0, -period, period, period / n)
    v = np.array(v)
    mask = np.array(mask)
    ok = ~(mask[:-n] | mask[n:])
    assert np.max(np.abs(v[:-n][ok] - v[n:][ok]) / np.maximum(1, np.abs(v[:-n][ok]))) < 1e-9


def test_hopf_and_window():
    w = qdef.unitarity_window(2.0, 1.2, 2.5, 0.0)
    assert w["L1"] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    h = qdef.hopf_report()
    assert h["coassoc"] < 1e-10
    assert h["counit"] < 1e-10


def test_geometry():
    s_grid = np.arange(0.5, 3.0, 0.001).tolist()
    s_star = qdef.transition(1.0, s_grid)
    assert s_star == pytest.approx(math.acos((math.sqrt(5) - 1) / 2), abs=1e-3)
    m_values, curves, crossings = qdef.spectral_flow(2.0, np.linspace(0.01, 3.1, 400).tolist())
    assert len(curves) == len(m_values) == 4
    assert crossings
