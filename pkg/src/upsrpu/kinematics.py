"""Inverse/forward kinematics and Jacobians of the 3UPS+RPU robot.

Closure model: each external limb l connects the fixed anchor F_l to the
world position of its mobile anchor, w_l = p + R(theta, psi) @ m_l with
p = (x, 0, z); the actuator length is |w_l - F_l|.  The central limb runs
from D0 to the platform origin p.  All derived quantities (passive joint
angles, limb frames, Jacobians) follow from these four closure equations.

Jacobian normalization: each closure row is written in unit-direction form
s_l . (dp + omega x r_l) = dq_l, so the inverse Jacobian is exactly -I and
det(J_D) alone indicates Type II singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Pose, RobotGeometry, rot_y

Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])

# Universal-joint angle pairs become indeterminate when the limb direction
# is parallel to the joint's first axis (sin(q_l2) -> 0).
UNIVERSAL_SINGULARITY_TOL = 1e-9


class DegeneratePoseError(ValueError):
    """A limb has (near) zero length; directions are undefined."""


class ForwardKinematicsError(RuntimeError):
    """Newton-Raphson failed to close the loop equations."""


@dataclass
class PassiveJoints:
    """Universal-joint angles (q_l1, q_l2) of the external limbs and the
    central revolute angle q41, all in rad.

    indeterminate[l] marks external limbs whose q_l1 is undefined because
    the limb direction is parallel to the universal joint's first axis.
    """

    universal: np.ndarray  # (3, 2)
    central: float
    indeterminate: np.ndarray  # (3,) bool


@dataclass
class LimbFrames:
    """Per-limb world geometry at a pose.

    attachments: (4,3) world attachment points (rows 1-3 the mobile anchors,
        row 4 the platform origin)
    directions: (4,3) unit limb directions (fixed anchor -> attachment)
    lengths: (4,) actuator lengths [m]
    moment_arms: (3,3) vectors from the platform origin to the external
        attachment points, expressed in the fixed frame
    """

    attachments: np.ndarray
    directions: np.ndarray
    lengths: np.ndarray
    moment_arms: np.ndarray


def limb_frames(pose: Pose, geometry: RobotGeometry) -> LimbFrames:
    """Attachment points, unit limb directions and lengths at a pose."""
    p = pose.origin()
    rot = pose.rotation()
    arms = (rot @ geometry.mobile_anchors.T).T  # (3,3)
    attachments = np.vstack([p + arms, p])
    deltas = attachments - geometry.fixed_anchors
    lengths = np.linalg.norm(deltas, axis=1)
    if np.any(lengths < 1e-9):
        bad = int(np.argmin(lengths)) + 1
        raise DegeneratePoseError(f"limb {bad} has zero length at this pose")
    directions = deltas / lengths[:, None]
    return LimbFrames(attachments, directions, lengths, arms)


def _universal_angles(direction: np.ndarray) -> tuple[float, float, bool]:
    # Inverts s = (cos q1 sin q2, -cos q2, sin q1 sin q2) for a unit s.
    sx, sy, sz = direction
    sin_q2 = np.hypot(sx, sz)
    q2 = np.arctan2(sin_q2, -sy)
    if sin_q2 < UNIVERSAL_SINGULARITY_TOL:
        return np.nan, q2, True
    return np.arctan2(sz, sx), q2, False


def passive_joints(frames: LimbFrames) -> PassiveJoints:
    universal = np.zeros((3, 2))
    indeterminate = np.zeros(3, dtype=bool)
    for l in range(3):
        q1, q2, bad = _universal_angles(frames.directions[l])
        universal[l] = (q1, q2)
        indeterminate[l] = bad
    sx, _, sz = frames.directions[3]
    central = np.arctan2(-sx, sz)
    return PassiveJoints(universal, central, indeterminate)


def universal_direction(q1: float, q2: float) -> np.ndarray:
    """Limb direction for universal-joint angles (q1, q2)."""
    return np.array(
        [np.cos(q1) * np.sin(q2), -np.cos(q2), np.sin(q1) * np.sin(q2)]
    )


def central_direction(q41: float) -> np.ndarray:
    """Central-limb direction for the revolute angle q41."""
    return np.array([-np.sin(q41), 0.0, np.cos(q41)])


def inverse_kinematics(
    pose: Pose, geometry: RobotGeometry
) -> tuple[np.ndarray, PassiveJoints, LimbFrames]:
    """Actuator lengths, passive joint angles and limb frames for a pose.

    Raises DegeneratePoseError if any limb collapses to zero length.
    """
    if not pose.is_finite():
        raise ValueError("pose must be finite")
    frames = limb_frames(pose, geometry)
    return frames.lengths.copy(), passive_joints(frames), frames


def joint_lengths(pose: Pose, geometry: RobotGeometry) -> np.ndarray:
    return limb_frames(pose, geometry).lengths


def closure_residuals(
    pose: Pose, joints: np.ndarray, geometry: RobotGeometry
) -> np.ndarray:
    """Squared-length loop-closure residuals |w_l - F_l|^2 - q_l^2 [m^2]."""
    p = pose.origin()
    rot = pose.rotation()
    attachments = np.vstack([p + (rot @ geometry.mobile_anchors.T).T, p])
    deltas = attachments - geometry.fixed_anchors
    return np.einsum("ij,ij->i", deltas, deltas) - np.asarray(joints) ** 2


def _closure_jacobian(pose: Pose, geometry: RobotGeometry) -> np.ndarray:
    # d(residual)/d(x, z, theta, psi); rows scale as 2*q_l*(unit-direction row).
    p = pose.origin()
    arms = (pose.rotation() @ geometry.mobile_anchors.T).T
    attachments = np.vstack([p + arms, p])
    deltas = attachments - geometry.fixed_anchors
    psi_axis = rot_y(pose.theta) @ Z_AXIS
    jac = np.zeros((4, 4))
    for l in range(4):
        d = deltas[l]
        jac[l, 0] = 2.0 * d[0]
        jac[l, 1] = 2.0 * d[2]
        if l < 3:
            jac[l, 2] = 2.0 * d @ np.cross(Y_AXIS, arms[l])
            jac[l, 3] = 2.0 * d @ np.cross(psi_axis, arms[l])
    return jac


def forward_kinematics(
    joints: np.ndarray,
    geometry: RobotGeometry,
    initial_pose: Pose,
    tol: float = 1e-12,
    max_iter: int = 50,
    return_iterations: bool = False,
):
    """Solve the four closure equations for the pose by damped Newton-Raphson.

    The caller supplies the last known pose as the initial condition, which
    keeps the iteration on the current assembly mode.  Converges when the
    largest squared-length residual is below tol [m^2].

    Raises ForwardKinematicsError on non-convergence or a singular Newton
    step (the caller treats the joint vector as infeasible).
    """
    joints = np.asarray(joints, dtype=float)
    x = initial_pose.as_array()
    residual = closure_residuals(Pose.from_array(x), joints, geometry)
    err = np.max(np.abs(residual))
    for iteration in range(max_iter):
        if err < tol:
            pose = Pose.from_array(x)
            return (pose, iteration) if return_iterations else pose
        jac = _closure_jacobian(Pose.from_array(x), geometry)
        try:
            step = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as exc:
            raise ForwardKinematicsError(
                f"singular Newton Jacobian after {iteration} iterations"
            ) from exc
        if not np.all(np.isfinite(step)):
            raise ForwardKinematicsError("non-finite Newton step")
        # Halve the step while it increases the residual.
        scale = 1.0
        for _ in range(12):
            candidate = x + scale * step
            cand_res = closure_residuals(Pose.from_array(candidate), joints, geometry)
            cand_err = np.max(np.abs(cand_res))
            if cand_err < err:
                break
            scale *= 0.5
        else:
            raise ForwardKinematicsError(
                f"no residual decrease at iteration {iteration} (residual {err:.3e})"
            )
        x, residual, err = candidate, cand_res, cand_err
    if err < tol:
        pose = Pose.from_array(x)
        return (pose, max_iter) if return_iterations else pose
    raise ForwardKinematicsError(
        f"no convergence in {max_iter} iterations (residual {err:.3e})"
    )


def jacobians(pose: Pose, geometry: RobotGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Forward and inverse Jacobians (J_D, J_I) of J_D dX + J_I dq = 0.

    Rows are normalized to unit limb direction, so J_I = -I and the task
    coordinates are (dx, dz, dtheta, dpsi).
    """
    frames = limb_frames(pose, geometry)
    psi_axis = rot_y(pose.theta) @ Z_AXIS
    jd = np.zeros((4, 4))
    for l in range(4):
        s = frames.directions[l]
        jd[l, 0] = s[0]
        jd[l, 1] = s[2]
        if l < 3:
            moment = np.cross(frames.moment_arms[l], s)
            jd[l, 2] = moment @ Y_AXIS
            jd[l, 3] = moment @ psi_axis
    return jd, -np.eye(4)


def socket_angles(pose: Pose, geometry: RobotGeometry) -> np.ndarray:
    """Angles [deg] between each external limb and the platform z axis.

    These are the spherical-socket articulation angles checked against the
    geometry's socket_limit_deg.
    """
    frames = limb_frames(pose, geometry)
    platform_z = pose.rotation() @ Z_AXIS
    angles = np.zeros(3)
    for l in range(3):
        s = frames.directions[l]
        angles[l] = np.degrees(
            np.arctan2(np.linalg.norm(np.cross(s, platform_z)), s @ platform_z)
        )
    return angles
