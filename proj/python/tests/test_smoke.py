import json
import math

import numpy as np
import pytest

import satin


def test_css_is_normalized_and_polarized():
    s = satin.make_css(40, math.pi / 2, 0.0)
    assert len(s) == 41
    assert s.norm_sq() == pytest.approx(1.0, abs=1e-12)
    mo = satin.moments(s)
    assert mo.mean_sx == pytest.approx(20.0, abs=1e-10)
    assert mo.var_sy == pytest.approx(10.0, abs=1e-10)


def test_twist_then_untwist_restores_state():
    s = satin.make_css(60, math.pi / 2, 0.0)
    back = satin.oat_evolve(satin.oat_evolve(s, 0.8), -0.8)
    assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-12)


def test_amplification_matches_analytic():
    m = satin.exact_amplification(0.7, -0.7, 220)
    assert abs(m) / satin.amplification_analytic(0.7, 220) == pytest.approx(1.0, abs=0.01)


def test_ideal_optimum_near_unit_twist():
    o = satin.ideal_optimum(220)
    assert o.q == pytest.approx(1.0, abs=0.05)
    assert 10 * math.log10(220) - o.gain_db == pytest.approx(4.3, abs=0.3)


def test_shearing_is_odd_in_detuning():
    c = satin.CavityConfig()
    c.x_a, c.x_c, c.n_tr_tot = 30.0, 10.0, 100.0
    q = satin.shearing_strength(c)
    c.x_a, c.x_c = -30.0, -10.0
    assert satin.shearing_strength(c) == pytest.approx(-q, rel=1e-13)


def test_infeasible_detuning_raises():
    c = satin.CavityConfig()
    with pytest.raises(satin.NoSolutionError):
        satin.optimize_detuning(c, 0.0)


def test_wigner_grid_normalized():
    s = satin.oat_evolve(satin.make_css(20, math.pi / 2, 0.0), 1.0)
    w, integral, max_imag = satin.wigner_grid(s, 22, 42)
    assert w.shape == (22, 42)
    assert integral == pytest.approx(1.0, abs=1e-6)
    assert max_imag < 1e-10


def test_allan_white_noise_slope():
    rng = np.random.default_rng(3)
    tau, adev = satin.allan_deviation(rng.normal(size=4096), 1.0)
    slope = np.polyfit(np.log(tau[:8]), np.log(adev[:8]), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.08)


def test_run_config_is_worker_invariant():
    cfg = json.dumps(
        {
            "schema_version": 1,
            "mode": "sweep-q",
            "protocol": {"n_atoms": 50, "q_list": [0.3, 0.6, 0.9]},
        }
    )
    a = satin.run_config(cfg, workers=1)
    b = satin.run_config(cfg, workers=3)
    assert a == b
    assert a["columns"][0] == "q_plus[1]"
    assert len(a["rows"]) == 3


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError, match="unknown key"):
        satin.run_config('{"schema_version": 1, "mode": "sweep-q", "bogus": 1}')
