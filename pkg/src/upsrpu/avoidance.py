"""Real-time Type II singularity avoidance.

Every control tick the avoidance layer receives the admittance-adapted
reference pose and the measured pose, and outputs a joint-space command

    q_cmd = IK(reference) + v_d * t_s * delta_steps          (per actuator)

where delta_steps is an integer deviation counter.  When the measured pose
comes within omega_limit of a Type II singularity, the two actuators named
by the minimum pairwise index are nudged: the eight candidate unit
modifications of the pair are scored by solving the forward kinematics of
each candidate command and keeping the one that most increases the pair's
proximity index while respecting stroke and socket limits.  Once the
reference is singularity-free again the counter is walked back to zero the
same way, considering only candidates that strictly reduce the pair's
accumulated deviation.

The binary gate ext_pin is 1 exactly when the reference pose itself is
singularity-free; the control loop multiplies the admittance force error
by it, so the admittance model relaxes smoothly during an avoidance
episode instead of being chopped off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, RobotGeometry
from .kinematics import (
    ForwardKinematicsError,
    forward_kinematics,
    joint_lengths,
    socket_angles,
)
from .screws import ACTUATOR_PAIRS, OmegaVector, omega_indices

# The eight unit modifications of a pair of deviation-counter rows: both
# rows up/down, opposite, or one at a time.  Columns are scored in order
# and ties go to the lowest index.
PAIR_CANDIDATES = np.array(
    [
        [1, -1, 1, -1, 1, -1, 0, 0],
        [1, -1, -1, 1, 0, 0, 1, -1],
    ]
)


@dataclass
class AvoidanceParams:
    """speed is the per-actuator avoidance velocity [m/s], sample_time the
    controller period [s]; one step moves an actuator by speed*sample_time.
    omega_limit_deg is the proximity threshold on the pairwise index."""

    speed: float = 0.01
    sample_time: float = 0.01
    omega_limit_deg: float = 2.0

    def __post_init__(self):
        if self.speed <= 0 or self.sample_time <= 0 or self.omega_limit_deg <= 0:
            raise ValueError("avoidance parameters must be positive")

    @property
    def step_length(self) -> float:
        return self.speed * self.sample_time


@dataclass
class AvoidanceState:
    """Integer deviation counters, the admittance gate, and episode
    bookkeeping."""

    delta_steps: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=int))
    ext_pin: int = 1
    active_pair: tuple[int, int] | None = None
    phase: str = "idle"  # idle | avoiding | returning

    def reset(self):
        self.delta_steps[:] = 0
        self.ext_pin = 1
        self.active_pair = None
        self.phase = "idle"


def candidate_feasibility(
    measured_pose: Pose,
    base_command: np.ndarray,
    columns: np.ndarray,
    pair: tuple[int, int],
    params: AvoidanceParams,
    geometry: RobotGeometry,
) -> np.ndarray:
    """Score each candidate modification of the pair's actuators.

    A candidate command q_ch shifts the pair rows of base_command by
    step_length times the column.  Its score is the pair's proximity index
    at the pose closing q_ch (forward kinematics started from the measured
    pose); candidates outside the actuator stroke, violating a socket
    limit, or failing to close score 0.
    """
    pair = tuple(pair)
    pair_index = ACTUATOR_PAIRS.index(pair)
    rows = list(pair)
    scores = np.zeros(columns.shape[1])
    for k in range(columns.shape[1]):
        q_ch = base_command.copy()
        q_ch[rows] += params.step_length * columns[:, k]
        if not (np.all(geometry.joint_min < q_ch) and np.all(q_ch < geometry.joint_max)):
            continue
        try:
            pose_ch = forward_kinematics(q_ch, geometry, measured_pose)
        except ForwardKinematicsError:
            continue
        if not np.all(socket_angles(pose_ch, geometry) < geometry.socket_limit_deg):
            continue
        scores[k] = omega_indices(pose_ch, geometry).angles_deg[pair_index]
    return scores


@dataclass
class AvoidanceStep:
    """Outcome of one avoidance tick."""

    command: np.ndarray  # q_cmd = reference_joints + step_length * delta_steps
    reference_joints: np.ndarray  # IK of the reference pose
    ext_pin: int
    omega_ref: OmegaVector  # indices at the reference pose
    omega_meas: OmegaVector  # indices at the measured pose
    state: AvoidanceState


def _return_pair(delta: np.ndarray) -> tuple[tuple[int, int], int]:
    # Pair with the largest accumulated |deviation|; first row wins ties.
    best_pair = ACTUATOR_PAIRS[0]
    best_sum = int(np.sum(np.abs(delta[list(best_pair)])))
    for pair in ACTUATOR_PAIRS[1:]:
        s = int(np.sum(np.abs(delta[list(pair)])))
        if s > best_sum:
            best_sum = s
            best_pair = pair
    return best_pair, best_sum


def avoidance_step(
    reference_pose: Pose,
    measured_pose: Pose,
    state: AvoidanceState,
    params: AvoidanceParams,
    geometry: RobotGeometry,
) -> AvoidanceStep:
    """One tick of the avoidance state machine.  Mutates state."""
    reference_joints = joint_lengths(reference_pose, geometry)
    base_command = reference_joints + params.step_length * state.delta_steps
    omega_ref = omega_indices(reference_pose, geometry)
    omega_meas = omega_indices(measured_pose, geometry)

    if omega_meas.min_value < params.omega_limit_deg:
        pair = omega_meas.pair
        scores = candidate_feasibility(
            measured_pose, base_command, PAIR_CANDIDATES, pair, params, geometry
        )
        if scores.max() > 0:
            best = int(np.argmax(scores))
            state.delta_steps[list(pair)] += PAIR_CANDIDATES[:, best]
        state.active_pair = pair
        state.phase = "avoiding"
    elif omega_ref.min_value > params.omega_limit_deg and np.any(state.delta_steps != 0):
        pair, pair_sum = _return_pair(state.delta_steps)
        current = state.delta_steps[list(pair)]
        reducing = [
            k
            for k in range(PAIR_CANDIDATES.shape[1])
            if np.sum(np.abs(current + PAIR_CANDIDATES[:, k])) < pair_sum
        ]
        if reducing:
            columns = PAIR_CANDIDATES[:, reducing]
            scores = candidate_feasibility(
                measured_pose, base_command, columns, pair, params, geometry
            )
            if scores.max() > 0:
                best = int(np.argmax(scores))
                state.delta_steps[list(pair)] += columns[:, best]
        state.active_pair = pair
        state.phase = "returning"
    elif not np.any(state.delta_steps != 0):
        state.active_pair = None
        state.phase = "idle"

    command = reference_joints + params.step_length * state.delta_steps
    state.ext_pin = 1 if omega_ref.min_value > params.omega_limit_deg else 0
    return AvoidanceStep(
        command=command,
        reference_joints=reference_joints,
        ext_pin=state.ext_pin,
        omega_ref=omega_ref,
        omega_meas=omega_meas,
        state=state,
    )
