import json
from pathlib import Path

import numpy as np
import pytest

from upsrpu.config import scenario_from_dict
from upsrpu.geometry import AnchorLayout, Pose, RobotGeometry, generate_anchors
from upsrpu.kinematics import inverse_kinematics
from upsrpu.loop import run_scenario

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture(scope="session")
def geometry() -> RobotGeometry:
    """Shipped default robot dimensions."""
    fixed, mobile = generate_anchors(AnchorLayout())
    return RobotGeometry(fixed_anchors=fixed, mobile_anchors=mobile)


@pytest.fixture(scope="session")
def simple_geometry() -> RobotGeometry:
    """Y-mirror-symmetric geometry with limb 1 on the symmetry plane
    (A0 = (0.3,0,0), A1 = (0.2,0,0), D0 = origin); closed-form cases."""
    fixed, mobile = generate_anchors(AnchorLayout(beta_fd=0.0, beta_md=0.0))
    return RobotGeometry(
        fixed_anchors=fixed, mobile_anchors=mobile, home=Pose(0.0, 0.7, 0.0, 0.0)
    )


def sample_workspace_poses(geometry, n, seed=0, min_omega_deg=None):
    """Rejection-sample poses whose actuator lengths are inside the stroke
    box (and optionally away from singularities)."""
    from upsrpu.screws import omega_indices

    rng = np.random.default_rng(seed)
    poses = []
    while len(poses) < n:
        pose = Pose(
            rng.uniform(-0.12, 0.12),
            rng.uniform(0.68, 0.81),
            rng.uniform(-0.35, 0.35),
            rng.uniform(-0.7, 0.7),
        )
        joints = inverse_kinematics(pose, geometry)[0]
        if not (np.all(joints > geometry.joint_min) and np.all(joints < geometry.joint_max)):
            continue
        if min_omega_deg is not None and omega_indices(pose, geometry).min_value < min_omega_deg:
            continue
        poses.append(pose)
    return poses


def load_scenario_file(name):
    return scenario_from_dict(json.loads((SCENARIO_DIR / name).read_text()))


@pytest.fixture(scope="session")
def breach_result():
    """Conventional-mode loss-of-control scenario, run once per session."""
    return run_scenario(load_scenario_file("conventional_breach.json"))


@pytest.fixture(scope="session")
def three_push_result():
    """Complemented-mode three-push scenario, run once per session."""
    return run_scenario(load_scenario_file("complemented_three_push.json"))
