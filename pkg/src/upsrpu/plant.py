"""Simulated plant and sensors standing in for the physical robot.

The actuators track their commanded lengths through a velocity-limited
first-order servo; the platform pose follows from forward kinematics of
the true joint lengths.  A camera-style pose sensor samples the true pose
at its own rate with latency and additive noise, and a force sensor
quantizes, perturbs and dead-zones the source value from a scripted or
interactive "patient".

Loss of control: when the true pose comes closer to a Type II singularity
than the breach threshold, the breach latches and the pose stops obeying
the actuators; it drifts along the uncontrollable task-space direction
(the null direction of the forward Jacobian) with the sign that lowers the
platform, a stand-in for the physical fall under gravity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, RobotGeometry
from .kinematics import ForwardKinematicsError, forward_kinematics, jacobians, joint_lengths
from .screws import omega_indices

# Substep singularity checks are skipped while the tick-level proximity
# index stays above this guard [deg]; the breach threshold is far below it.
BREACH_GUARD_DEG = 5.0

# The angular proximity index has blind spots where two twist axes align
# without any rank loss (their linear parts differ).  A breach is only
# latched when the forward Jacobian's determinant has also collapsed
# relative to the home pose, which disambiguates exactly those cases.
BREACH_DET_RATIO = 0.05


class SimulationFault(RuntimeError):
    """The true state lost kinematic closure; the scenario must halt."""


@dataclass
class ServoParams:
    """Velocity-limited first-order actuator servo with PD-form control
    actions (a surrogate for the robot's inner-loop trajectory controller;
    the reported actions keep force-variation metrics computable)."""

    kp: float = 4000.0  # action per m of length error
    kd: float = 40.0
    time_constant: float = 0.05  # s
    velocity_limit: float = 0.25  # m/s
    action_limit: float = 500.0

    def __post_init__(self):
        if min(self.kp, self.kd, self.time_constant, self.velocity_limit, self.action_limit) <= 0:
            raise ValueError("servo parameters must be positive")


@dataclass
class PoseSensorParams:
    """Camera-tracker surrogate: sampled, delayed, noisy pose source."""

    rate: float = 120.0  # Hz
    latency: float = 0.0083  # s
    noise: float = 1e-4  # additive sigma per coordinate (m / rad)
    enabled: bool = True

    def __post_init__(self):
        if self.rate <= 0 or self.latency < 0 or self.noise < 0:
            raise ValueError("pose sensor parameters out of range")


# Channel order everywhere: (Fx, Fz, My, Mz).
DEFAULT_FORCE_RESOLUTION = np.array([0.065, 0.125, 0.004, 0.004])
DEFAULT_FORCE_RANGE = np.array([330.0, 990.0, 30.0, 30.0])


@dataclass
class ForceSensorParams:
    """Quantizing force/torque sensor with a dead zone of three times the
    unloaded noise deviation per channel."""

    resolution: np.ndarray = field(default_factory=lambda: DEFAULT_FORCE_RESOLUTION.copy())
    noise: np.ndarray = field(default_factory=lambda: DEFAULT_FORCE_RESOLUTION.copy())
    measuring_range: np.ndarray = field(default_factory=lambda: DEFAULT_FORCE_RANGE.copy())

    def __post_init__(self):
        self.resolution = np.asarray(self.resolution, dtype=float)
        self.noise = np.asarray(self.noise, dtype=float)
        self.measuring_range = np.asarray(self.measuring_range, dtype=float)
        for name in ("resolution", "noise", "measuring_range"):
            v = getattr(self, name)
            if v.shape != (4,) or np.any(v < 0):
                raise ValueError(f"force sensor {name} must be 4 non-negative values")

    @property
    def dead_zone(self) -> np.ndarray:
        return 3.0 * self.noise


@dataclass
class ForceSegment:
    """One segment of a scripted force profile.  A step segment jumps to
    the target at its start; a linear segment ramps from the previous
    value to the target across its duration."""

    start: float
    duration: float
    target: np.ndarray
    ramp: str = "step"

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=float)
        if self.target.shape != (4,):
            raise ValueError("force segment target must have 4 channels")
        if self.duration < 0 or self.start < 0:
            raise ValueError("force segment times must be non-negative")
        if self.ramp not in ("step", "linear"):
            raise ValueError(f"unknown ramp shape {self.ramp!r}")


class ForceScript:
    """Time-ordered, non-overlapping force segments; holds the last target
    between and after segments."""

    def __init__(self, segments: list[ForceSegment]):
        self.segments = sorted(segments, key=lambda s: s.start)
        for a, b in zip(self.segments, self.segments[1:]):
            if a.start + a.duration > b.start + 1e-12:
                raise ValueError("force segments overlap")

    def value(self, t: float) -> np.ndarray:
        current = np.zeros(4)
        for seg in self.segments:
            if t < seg.start:
                break
            if seg.ramp == "step" or seg.duration == 0 or t >= seg.start + seg.duration:
                current = seg.target.copy()
            else:
                frac = (t - seg.start) / seg.duration
                current = current + frac * (seg.target - current)
                break
        return current


class InteractiveForceSource:
    """Holds the latest commanded force target; the loop updates it from
    incoming command messages at tick boundaries."""

    def __init__(self):
        self.target = np.zeros(4)

    def set_target(self, value):
        self.target = np.asarray(value, dtype=float).copy()

    def value(self, t: float) -> np.ndarray:
        return self.target.copy()


class ForceSensor:
    def __init__(self, params: ForceSensorParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng

    def sample(self, source_value: np.ndarray) -> np.ndarray:
        """Quantize to channel resolution, add noise, apply the dead zone."""
        value = np.clip(
            np.asarray(source_value, dtype=float),
            -self.params.measuring_range,
            self.params.measuring_range,
        )
        res = self.params.resolution
        quantized = np.where(res > 0, np.round(value / np.where(res > 0, res, 1.0)) * res, value)
        noisy = quantized + self.rng.normal(0.0, 1.0, 4) * self.params.noise
        return np.where(np.abs(noisy) < self.params.dead_zone, 0.0, noisy)


class PoseSensor:
    """Captures the true pose on its own clock and serves the newest
    capture older than the latency."""

    def __init__(self, params: PoseSensorParams, rng: np.random.Generator, initial: Pose):
        self.params = params
        self.rng = rng
        self._captures: list[tuple[float, np.ndarray]] = []
        # Pre-run capture so the first ticks have a reading.
        self._captures.append((-params.latency, initial.as_array().copy()))
        self._next_capture = 0.0

    def observe(self, t: float, true_pose: Pose):
        """Record captures that have come due by time t (called every
        plant substep)."""
        while t >= self._next_capture - 1e-12:
            sample = true_pose.as_array().copy()
            if self.params.enabled and self.params.noise > 0:
                sample = sample + self.rng.normal(0.0, self.params.noise, 4)
            self._captures.append((self._next_capture, sample))
            self._next_capture += 1.0 / self.params.rate
            if len(self._captures) > 64:
                del self._captures[0]

    def read(self, t: float) -> Pose:
        """Newest capture whose data has arrived (capture time + latency)."""
        latest = self._captures[0][1]
        for capture_time, sample in self._captures:
            if capture_time + self.params.latency <= t + 1e-12:
                latest = sample
            else:
                break
        return Pose.from_array(latest)


@dataclass
class PlantParams:
    substep: float = 1e-3  # s, inner integration step
    breach_threshold_deg: float = 0.5
    drift_speed: float = 0.05  # task-space fall rate after breach

    def __post_init__(self):
        if self.substep <= 0 or self.breach_threshold_deg <= 0 or self.drift_speed < 0:
            raise ValueError("plant parameters out of range")


def uncontrolled_direction(pose: Pose, geometry: RobotGeometry) -> np.ndarray:
    """Unit task-space direction in the (numerical) null space of the
    forward Jacobian, signed so the platform moves down (or along -x when
    level)."""
    jd, _ = jacobians(pose, geometry)
    _, _, vt = np.linalg.svd(jd)
    direction = vt[-1]
    if direction[1] > 0 or (direction[1] == 0 and direction[0] > 0):
        direction = -direction
    return direction


class Plant:
    """True robot state: actuator lengths tracked by servos, pose from
    forward kinematics, breach drift after loss of control."""

    def __init__(
        self,
        geometry: RobotGeometry,
        servo: ServoParams | None = None,
        params: PlantParams | None = None,
        initial_pose: Pose | None = None,
    ):
        self.geometry = geometry
        self.servo = servo or ServoParams()
        self.params = params or PlantParams()
        self.pose = initial_pose or geometry.home
        self.joints = joint_lengths(self.pose, geometry)
        self.joint_rates = np.zeros(4)
        self.breached = False
        self._prev_command = self.joints.copy()
        self.last_actions = np.zeros(4)
        self._last_min_omega = omega_indices(self.pose, geometry).min_value

    def _servo_substep(self, command: np.ndarray, h: float):
        for i in range(4):
            error = command[i] - self.joints[i]
            rate = error / self.servo.time_constant
            if abs(rate) > self.servo.velocity_limit:
                new = self.joints[i] + np.sign(rate) * self.servo.velocity_limit * h
            else:
                # Exact first-order lag over the substep.
                new = command[i] + (self.joints[i] - command[i]) * np.exp(
                    -h / self.servo.time_constant
                )
            self.joint_rates[i] = (new - self.joints[i]) / h
            self.joints[i] = new

    def step(self, command: np.ndarray, dt: float, observer=None) -> np.ndarray:
        """Advance the plant by one controller period.

        command is held for the whole period; the observer callable (the
        pose sensor) is invoked with (t_offset_into_period_end, pose) after
        every substep.  Returns the PD-form control actions at command
        application.  Raises SimulationFault if the true state loses
        closure.
        """
        command = np.asarray(command, dtype=float)
        command_rate = (command - self._prev_command) / dt
        actions = self.servo.kp * (command - self.joints) + self.servo.kd * (
            command_rate - self.joint_rates
        )
        self.last_actions = np.clip(actions, -self.servo.action_limit, self.servo.action_limit)
        self._prev_command = command.copy()

        n_sub = max(1, round(dt / self.params.substep))
        h = dt / n_sub
        # Substep-rate singularity checks only matter close to one; far away
        # the tick-rate check cannot miss a crossing at these velocities.
        check_every_substep = self._last_min_omega < BREACH_GUARD_DEG
        drift = None
        for s in range(n_sub):
            self._servo_substep(command, h)
            if self.breached:
                if drift is None:
                    # The fall direction changes negligibly within a tick.
                    drift = uncontrolled_direction(self.pose, self.geometry)
                self.pose = Pose.from_array(
                    self.pose.as_array() + self.params.drift_speed * h * drift
                )
            else:
                try:
                    self.pose = forward_kinematics(self.joints, self.geometry, self.pose)
                except ForwardKinematicsError as exc:
                    raise SimulationFault(f"true state lost closure: {exc}") from exc
                if check_every_substep or s == n_sub - 1:
                    reading = omega_indices(self.pose, self.geometry)
                    self._last_min_omega = reading.min_value
                    if (
                        reading.min_value < self.params.breach_threshold_deg
                        and abs(reading.det_jd)
                        < BREACH_DET_RATIO * self.geometry.home_det_jd()
                    ):
                        self.breached = True
                    elif reading.min_value < BREACH_GUARD_DEG:
                        check_every_substep = True
            if observer is not None:
                observer((s + 1) * h, self.pose)
        return self.last_actions.copy()
