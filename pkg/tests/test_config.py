import json

import numpy as np
import pytest

from upsrpu.config import ScenarioError, parse_scenario, scenario_from_dict


def test_empty_overrides_yield_shipped_defaults():
    config = scenario_from_dict({})
    assert config.mode == "complemented"
    assert config.control_period == 0.01
    # Admittance settings as used on the physical system.
    assert np.array_equal(config.admittance.stiffness, [250.0, 500.0, 25.0, 25.0])
    assert np.array_equal(config.admittance.damping, [894.0, 894.0, 89.4, 89.4])
    assert np.array_equal(config.admittance.inertia, [200.0, 200.0, 20.0, 20.0])
    # Avoidance constants.
    assert config.avoidance.speed == 0.01
    assert config.avoidance.sample_time == 0.01
    assert config.avoidance.omega_limit_deg == 2.0
    # Geometry defaults: anchor circles and stroke limits.
    assert np.allclose(np.linalg.norm(config.geometry.fixed_anchors[:3], axis=1), 0.3)
    assert np.allclose(np.linalg.norm(config.geometry.mobile_anchors, axis=1), 0.2)
    assert np.array_equal(config.geometry.joint_max, [0.93, 0.93, 0.93, 0.82])
    assert np.array_equal(config.geometry.joint_min, [0.65, 0.64, 0.65, 0.65])
    assert np.array_equal(config.geometry.socket_limit_deg, [38.0, 38.0, 38.0])
    # Sensor characteristics.
    assert config.pose_sensor.rate == 120.0
    assert config.pose_sensor.latency == pytest.approx(0.0083)
    assert np.array_equal(config.force_sensor.resolution, [0.065, 0.125, 0.004, 0.004])
    assert np.array_equal(config.force_sensor.measuring_range, [330.0, 990.0, 30.0, 30.0])
    assert np.array_equal(config.reference_force, np.zeros(4))


def test_omega_limit_override():
    config = scenario_from_dict({"avoidance": {"omega_limit_deg": 3.0}})
    assert config.avoidance.omega_limit_deg == 3.0


def test_negative_control_period_rejected():
    with pytest.raises(ScenarioError, match="control_period"):
        scenario_from_dict({"control_period": -0.01})


def test_inconsistent_joint_limits_rejected():
    with pytest.raises(ScenarioError, match="joint_min"):
        scenario_from_dict(
            {"geometry": {"joint_min": [1.0, 1.0, 1.0, 1.0], "joint_max": [0.9, 0.9, 0.9, 0.9]}}
        )


def test_unknown_field_named_in_error():
    with pytest.raises(ScenarioError, match="scenario.frobnicate"):
        scenario_from_dict({"frobnicate": 1})


def test_nested_field_path_in_error():
    with pytest.raises(ScenarioError, match="admittance.stiffness"):
        scenario_from_dict({"admittance": {"stiffness": [1, 2, 3]}})


def test_bad_mode_rejected():
    with pytest.raises(ScenarioError, match="mode"):
        scenario_from_dict({"mode": "hybrid"})


def test_overlapping_force_segments_rejected():
    with pytest.raises(ScenarioError, match="segments"):
        scenario_from_dict(
            {
                "force_source": {
                    "type": "script",
                    "segments": [
                        {"start": 0.0, "duration": 5.0, "target": [0, 0, 0, 1]},
                        {"start": 2.0, "duration": 1.0, "target": [0, 0, 0, 0]},
                    ],
                }
            }
        )


def test_waypoint_reference_interpolates():
    config = scenario_from_dict(
        {
            "waypoints": [
                {"time": 0.0, "pose": {"z": 0.75, "psi": 0.5}},
                {"time": 10.0, "pose": {"z": 0.75, "psi": 0.7}},
            ]
        }
    )
    assert config.reference_at(5.0).psi == pytest.approx(0.6)
    assert config.reference_at(20.0).psi == pytest.approx(0.7)


def test_schema_version_checked():
    with pytest.raises(ScenarioError, match="version"):
        scenario_from_dict({"version": 99})


def test_parse_scenario_reports_json_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "mode": "complemented",\n  broken\n}')
    with pytest.raises(ScenarioError, match=r"bad\.json:3"):
        parse_scenario(path)


def test_parse_scenario_round_trip(tmp_path):
    path = tmp_path / "ok.json"
    path.write_text(json.dumps({"mode": "conventional", "seed": 7, "duration": 2.5}))
    config = parse_scenario(path)
    assert config.mode == "conventional"
    assert config.seed == 7
    assert config.duration == 2.5


def test_shipped_scenarios_are_valid():
    from conftest import SCENARIO_DIR

    for name in ("complemented_three_push.json", "conventional_breach.json", "interactive.json"):
        config = parse_scenario(SCENARIO_DIR / name)
        assert config.duration > 0
