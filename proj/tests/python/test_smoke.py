import math
import os
from pathlib import Path

import numpy as np
import pytest

import etesc

SCENARIOS = Path(os.environ.get("ETESC_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def test_load_bundled_scenario():
    sc = etesc.load_scenario(str(SCENARIOS / "paper_sec7_static.cfg"))
    assert sc.name == "paper_sec7_static"
    assert sc.trigger == "static"
    np.testing.assert_allclose(sc.hessian, [[100, 30], [30, 20]])


def test_invalid_sigma_raises_config_error():
    text = (SCENARIOS / "paper_sec7_static.cfg").read_text().replace("trigger.sigma = 0.5", "trigger.sigma = 1.2")
    with pytest.raises(etesc.ConfigError, match="trigger.sigma"):
        etesc.parse_scenario(text)


def test_certify_report():
    sc = etesc.load_scenario(str(SCENARIOS / "paper_sec7_dynamic.cfg"))
    result = etesc.certify(sc)
    assert result["ok"]
    rep = result["report"]
    assert rep["dwell_case"] == "iii"
    assert float(rep["tau_star"]) > 0


def test_short_average_run():
    text = (SCENARIOS / "paper_sec7_static.cfg").read_text().replace("sim.duration = 300", "sim.duration = 2")
    sc = etesc.parse_scenario(text, mode="average")
    out = etesc.run(sc)
    assert out["theta_hat"].shape[1] == 2
    assert out["t"][0] == 0.0
    assert len(out["event_times"]) > 1
    assert np.all(np.diff(out["v_av"][:: max(1, len(out["v_av"]) // 10)]) <= 0)


def test_lyapunov_and_dwell_time():
    p = etesc.solve_lyapunov(-np.eye(2), 2 * np.eye(2))
    np.testing.assert_allclose(p, np.eye(2), atol=1e-14)
    assert math.isclose(etesc.dwell_time_static(1.0, 1.0, 0.5, 1.0), 1.0 / 3.0, rel_tol=1e-12)


def test_interval_stats():
    s = etesc.interval_stats([1.0, 3.0])
    assert s["mean"] == 2.0
    assert s["variance"] == 1.0
