"""Admittance control with real-time Type II singularity avoidance for a
4-DOF 3UPS+RPU parallel robot, simulated at desk scale."""

from .admittance import (
    AdmittanceModel,
    AdmittanceParams,
    AdmittanceState,
    compose_reference,
)
from .avoidance import (
    AvoidanceParams,
    AvoidanceState,
    avoidance_step,
    candidate_feasibility,
)
from .config import ScenarioConfig, ScenarioError, parse_scenario, scenario_from_dict
from .geometry import (
    AnchorLayout,
    ConfigurationError,
    Pose,
    RobotGeometry,
    default_geometry,
    generate_anchors,
)
from .kinematics import (
    DegeneratePoseError,
    ForwardKinematicsError,
    forward_kinematics,
    inverse_kinematics,
    jacobians,
    socket_angles,
)
from .loop import LogRecord, ScenarioRunner, run_scenario
from .metrics import avr, episodes_from_log, mae, mape, metrics_report
from .plant import (
    ForceScript,
    ForceSegment,
    ForceSensorParams,
    Plant,
    PlantParams,
    PoseSensorParams,
    ServoParams,
)
from .screws import (
    ACTUATOR_PAIRS,
    OmegaVector,
    Screw,
    omega_indices,
    output_twists,
    reciprocal_product,
    transmission_wrenches,
)

__all__ = [
    "ACTUATOR_PAIRS",
    "AdmittanceModel",
    "AdmittanceParams",
    "AdmittanceState",
    "AnchorLayout",
    "AvoidanceParams",
    "AvoidanceState",
    "ConfigurationError",
    "DegeneratePoseError",
    "ForceScript",
    "ForceSegment",
    "ForceSensorParams",
    "ForwardKinematicsError",
    "LogRecord",
    "OmegaVector",
    "Plant",
    "PlantParams",
    "Pose",
    "PoseSensorParams",
    "RobotGeometry",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioRunner",
    "Screw",
    "ServoParams",
    "avoidance_step",
    "avr",
    "candidate_feasibility",
    "compose_reference",
    "default_geometry",
    "episodes_from_log",
    "forward_kinematics",
    "generate_anchors",
    "inverse_kinematics",
    "jacobians",
    "mae",
    "mape",
    "metrics_report",
    "omega_indices",
    "output_twists",
    "parse_scenario",
    "reciprocal_product",
    "run_scenario",
    "scenario_from_dict",
    "socket_angles",
    "transmission_wrenches",
]
