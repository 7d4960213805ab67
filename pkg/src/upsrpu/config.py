"""Scenario configuration: JSON schema, validation and shipped defaults.

A scenario file is a JSON object of overrides; an empty object yields the
shipped defaults (robot dimensions, admittance settings, avoidance
constants and sensor characteristics as used on the physical system).
Validation reports the offending field path in every error message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .admittance import AdmittanceParams
from .avoidance import AvoidanceParams
from .geometry import (
    AnchorLayout,
    ConfigurationError,
    Pose,
    RobotGeometry,
    generate_anchors,
)
from .plant import (
    ForceScript,
    ForceSegment,
    ForceSensorParams,
    PlantParams,
    PoseSensorParams,
    ServoParams,
)

SCHEMA_VERSION = 1

MODES = ("conventional", "complemented")


class ScenarioError(ValueError):
    """Configuration rejected; the message names the field."""


@dataclass
class Waypoint:
    time: float
    pose: Pose


@dataclass
class ScenarioConfig:
    mode: str = "complemented"
    duration: float = 20.0
    control_period: float = 0.01
    seed: int = 0
    # Constant reference pose, or piecewise-linear waypoints when given.
    # The default rest pose sits away from the degenerate sheet of the
    # angular proximity index at psi = 0.
    reference_pose: Pose = field(default_factory=lambda: Pose(0.0, 0.75, 0.0, 0.5))
    waypoints: list[Waypoint] | None = None
    reference_force: np.ndarray = field(default_factory=lambda: np.zeros(4))
    geometry: RobotGeometry = None  # filled by __post_init__
    admittance: AdmittanceParams = field(default_factory=AdmittanceParams)
    avoidance: AvoidanceParams = None  # filled by __post_init__ (shares control period)
    servo: ServoParams = field(default_factory=ServoParams)
    pose_sensor: PoseSensorParams = field(default_factory=PoseSensorParams)
    force_sensor: ForceSensorParams = field(default_factory=ForceSensorParams)
    plant: PlantParams = field(default_factory=PlantParams)
    force_source: str = "script"  # script | interactive
    force_script: ForceScript = field(default_factory=lambda: ForceScript([]))
    telemetry_decimation: int = 2

    def __post_init__(self):
        if self.geometry is None:
            fixed, mobile = generate_anchors(AnchorLayout())
            self.geometry = RobotGeometry(fixed_anchors=fixed, mobile_anchors=mobile)
        if self.avoidance is None:
            self.avoidance = AvoidanceParams(sample_time=self.control_period)
        self.reference_force = np.asarray(self.reference_force, dtype=float)
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ScenarioError(f"mode: must be one of {MODES}, got {self.mode!r}")
        if self.control_period <= 0:
            raise ScenarioError("control_period: must be > 0")
        if self.duration <= 0:
            raise ScenarioError("duration: must be > 0")
        if self.force_source not in ("script", "interactive"):
            raise ScenarioError("force_source: must be 'script' or 'interactive'")
        if self.telemetry_decimation < 1:
            raise ScenarioError("telemetry_decimation: must be >= 1")
        if self.reference_force.shape != (4,):
            raise ScenarioError("reference_force: must have 4 channels")
        if self.waypoints is not None:
            times = [w.time for w in self.waypoints]
            if times != sorted(times):
                raise ScenarioError("waypoints: times must be non-decreasing")

    def reference_at(self, t: float) -> Pose:
        """Planned reference pose at time t (constant or waypoint interpolation)."""
        if not self.waypoints:
            return self.reference_pose
        pts = self.waypoints
        if t <= pts[0].time:
            return pts[0].pose
        for a, b in zip(pts, pts[1:]):
            if t <= b.time:
                span = b.time - a.time
                frac = 0.0 if span <= 0 else (t - a.time) / span
                return Pose.from_array(
                    a.pose.as_array() + frac * (b.pose.as_array() - a.pose.as_array())
                )
        return pts[-1].pose


def _expect(obj, path, types):
    if not isinstance(obj, types):
        names = getattr(types, "__name__", None) or "/".join(t.__name__ for t in types)
        raise ScenarioError(f"{path}: expected {names}, got {type(obj).__name__}")
    return obj


def _number(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"{path}: expected a number, got {type(obj).__name__}")
    return float(obj)


def _vector(obj, path, n):
    _expect(obj, path, list)
    if len(obj) != n:
        raise ScenarioError(f"{path}: expected {n} values, got {len(obj)}")
    return np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(obj)])


def _pose(obj, path) -> Pose:
    _expect(obj, path, dict)
    for key in obj:
        if key not in ("x", "z", "theta", "psi"):
            raise ScenarioError(f"{path}.{key}: unknown pose field")
    return Pose(
        _number(obj.get("x", 0.0), f"{path}.x"),
        _number(obj.get("z", 0.75), f"{path}.z"),
        _number(obj.get("theta", 0.0), f"{path}.theta"),
        _number(obj.get("psi", 0.0), f"{path}.psi"),
    )


def _check_keys(obj, path, allowed):
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}: unknown field")


def _build_geometry(obj) -> RobotGeometry:
    _check_keys(
        obj,
        "geometry",
        {
            "generator",
            "fixed_anchors",
            "mobile_anchors",
            "joint_min",
            "joint_max",
            "socket_limit_deg",
            "home_pose",
        },
    )
    layout = AnchorLayout()
    if "generator" in obj:
        gen = _expect(obj["generator"], "geometry.generator", dict)
        fields = {
            "r1", "r2", "r3", "beta_fd", "beta_fi", "d_s",
            "rm1", "rm2", "rm3", "beta_md", "beta_mi",
        }
        _check_keys(gen, "geometry.generator", fields)
        for key, value in gen.items():
            setattr(layout, key, _number(value, f"geometry.generator.{key}"))
    fixed, mobile = generate_anchors(layout)
    if "fixed_anchors" in obj:
        rows = _expect(obj["fixed_anchors"], "geometry.fixed_anchors", list)
        if len(rows) != 4:
            raise ScenarioError("geometry.fixed_anchors: expected 4 points")
        fixed = np.vstack([_vector(r, f"geometry.fixed_anchors[{i}]", 3) for i, r in enumerate(rows)])
    if "mobile_anchors" in obj:
        rows = _expect(obj["mobile_anchors"], "geometry.mobile_anchors", list)
        if len(rows) != 3:
            raise ScenarioError("geometry.mobile_anchors: expected 3 points")
        mobile = np.vstack([_vector(r, f"geometry.mobile_anchors[{i}]", 3) for i, r in enumerate(rows)])
    kwargs = {}
    if "joint_min" in obj:
        kwargs["joint_min"] = _vector(obj["joint_min"], "geometry.joint_min", 4)
    if "joint_max" in obj:
        kwargs["joint_max"] = _vector(obj["joint_max"], "geometry.joint_max", 4)
    if "socket_limit_deg" in obj:
        kwargs["socket_limit_deg"] = _vector(obj["socket_limit_deg"], "geometry.socket_limit_deg", 3)
    if "home_pose" in obj:
        kwargs["home"] = _pose(obj["home_pose"], "geometry.home_pose")
    try:
        return RobotGeometry(fixed_anchors=fixed, mobile_anchors=mobile, **kwargs)
    except ConfigurationError as exc:
        raise ScenarioError(f"geometry: {exc}") from exc


def _build_segments(rows) -> ForceScript:
    segments = []
    for i, row in enumerate(rows):
        path = f"force_source.segments[{i}]"
        _expect(row, path, dict)
        _check_keys(row, path, {"start", "duration", "target", "ramp"})
        try:
            segments.append(
                ForceSegment(
                    start=_number(row.get("start", 0.0), f"{path}.start"),
                    duration=_number(row.get("duration", 0.0), f"{path}.duration"),
                    target=_vector(row.get("target", [0, 0, 0, 0]), f"{path}.target", 4),
                    ramp=row.get("ramp", "step"),
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc
    try:
        return ForceScript(segments)
    except ValueError as exc:
        raise ScenarioError(f"force_source.segments: {exc}") from exc


TOP_LEVEL_KEYS = {
    "version",
    "mode",
    "duration",
    "control_period",
    "seed",
    "reference_pose",
    "waypoints",
    "reference_force",
    "geometry",
    "admittance",
    "avoidance",
    "servo",
    "pose_sensor",
    "force_sensor",
    "plant",
    "force_source",
    "telemetry",
}


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Validate a scenario dictionary and apply the shipped defaults."""
    _expect(data, "scenario", dict)
    _check_keys(data, "scenario", TOP_LEVEL_KEYS)
    version = data.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"version: unsupported schema version {version}")

    kwargs = {}
    if "mode" in data:
        kwargs["mode"] = _expect(data["mode"], "mode", str)
    if "duration" in data:
        kwargs["duration"] = _number(data["duration"], "duration")
    if "control_period" in data:
        kwargs["control_period"] = _number(data["control_period"], "control_period")
        if kwargs["control_period"] <= 0:
            raise ScenarioError("control_period: must be > 0")
    if "seed" in data:
        seed = data["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ScenarioError("seed: must be a non-negative integer")
        kwargs["seed"] = seed
    if "reference_pose" in data:
        kwargs["reference_pose"] = _pose(data["reference_pose"], "reference_pose")
    if "waypoints" in data:
        rows = _expect(data["waypoints"], "waypoints", list)
        waypoints = []
        for i, row in enumerate(rows):
            _expect(row, f"waypoints[{i}]", dict)
            _check_keys(row, f"waypoints[{i}]", {"time", "pose"})
            waypoints.append(
                Waypoint(
                    _number(row.get("time", 0.0), f"waypoints[{i}].time"),
                    _pose(row.get("pose", {}), f"waypoints[{i}].pose"),
                )
            )
        kwargs["waypoints"] = waypoints
    if "reference_force" in data:
        kwargs["reference_force"] = _vector(data["reference_force"], "reference_force", 4)
    if "geometry" in data:
        kwargs["geometry"] = _build_geometry(_expect(data["geometry"], "geometry", dict))

    if "admittance" in data:
        adm = _expect(data["admittance"], "admittance", dict)
        _check_keys(adm, "admittance", {"stiffness", "damping", "inertia"})
        values = {}
        for key in ("stiffness", "damping", "inertia"):
            if key in adm:
                values[key] = _vector(adm[key], f"admittance.{key}", 4)
        try:
            kwargs["admittance"] = AdmittanceParams(**values)
        except ValueError as exc:
            raise ScenarioError(f"admittance: {exc}") from exc

    control_period = kwargs.get("control_period", 0.01)
    if "avoidance" in data:
        av = _expect(data["avoidance"], "avoidance", dict)
        _check_keys(av, "avoidance", {"speed", "omega_limit_deg"})
        try:
            kwargs["avoidance"] = AvoidanceParams(
                speed=_number(av.get("speed", 0.01), "avoidance.speed"),
                sample_time=control_period,
                omega_limit_deg=_number(
                    av.get("omega_limit_deg", 2.0), "avoidance.omega_limit_deg"
                ),
            )
        except ValueError as exc:
            raise ScenarioError(f"avoidance: {exc}") from exc

    for section, cls, fields in (
        ("servo", ServoParams, {"kp", "kd", "time_constant", "velocity_limit", "action_limit"}),
        ("pose_sensor", PoseSensorParams, {"rate", "latency", "noise", "enabled"}),
        ("plant", PlantParams, {"substep", "breach_threshold_deg", "drift_speed"}),
    ):
        if section in data:
            obj = _expect(data[section], section, dict)
            _check_keys(obj, section, fields)
            values = {}
            for key, value in obj.items():
                if key == "enabled":
                    values[key] = _expect(value, f"{section}.{key}", bool)
                else:
                    values[key] = _number(value, f"{section}.{key}")
            try:
                kwargs[section] = cls(**values)
            except ValueError as exc:
                raise ScenarioError(f"{section}: {exc}") from exc

    if "force_sensor" in data:
        fs = _expect(data["force_sensor"], "force_sensor", dict)
        _check_keys(fs, "force_sensor", {"resolution", "noise", "measuring_range"})
        values = {}
        for key in ("resolution", "noise", "measuring_range"):
            if key in fs:
                values[key] = _vector(fs[key], f"force_sensor.{key}", 4)
        try:
            kwargs["force_sensor"] = ForceSensorParams(**values)
        except ValueError as exc:
            raise ScenarioError(f"force_sensor: {exc}") from exc

    if "force_source" in data:
        src = _expect(data["force_source"], "force_source", dict)
        _check_keys(src, "force_source", {"type", "segments"})
        kind = src.get("type", "script")
        if kind not in ("script", "interactive"):
            raise ScenarioError("force_source.type: must be 'script' or 'interactive'")
        kwargs["force_source"] = kind
        if "segments" in src:
            kwargs["force_script"] = _build_segments(
                _expect(src["segments"], "force_source.segments", list)
            )

    if "telemetry" in data:
        tel = _expect(data["telemetry"], "telemetry", dict)
        _check_keys(tel, "telemetry", {"decimation"})
        if "decimation" in tel:
            dec = tel["decimation"]
            if isinstance(dec, bool) or not isinstance(dec, int):
                raise ScenarioError("telemetry.decimation: must be an integer")
            kwargs["telemetry_decimation"] = dec

    try:
        return ScenarioConfig(**kwargs)
    except (ValueError, ConfigurationError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc


def parse_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    return scenario_from_dict(data)
