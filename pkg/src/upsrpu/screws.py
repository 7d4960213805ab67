"""Screw algebra: transmission wrenches, output twists and the pairwise
angular proximity indices used to detect Type II singularities.

All screws are 6-component (angular; linear) entities referenced to the
platform origin.  A twist is (omega; v), a wrench (f; moment).  The output
twist of actuator i is the platform motion with the other three actuators
locked; near a Type II singularity two output twists align, so the minimum
pairwise angle between their angular parts measures singularity proximity
and names the responsible actuator pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Pose, RobotGeometry, rot_y
from .kinematics import Y_AXIS, Z_AXIS, jacobians, limb_frames

# Actuator pairs in row order of the pairwise index vector (0-based).
ACTUATOR_PAIRS: tuple[tuple[int, int], ...] = (
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
)

# Angle assigned to a pair whose twist direction is undefined (a pure
# translation twist has no angular part).  Two output twists can only
# collapse into a Type II singularity with parallel angular parts, so the
# sentinel is maximally non-singular and never masks a true singular pair.
UNDEFINED_PAIR_ANGLE_DEG = 180.0

# Above this condition number the plain solve is replaced by an SVD
# least-squares solution and the result flagged near-singular.
CONDITION_LIMIT = 1e10

# |det J_D| below this fraction of the home-pose determinant is treated as
# exactly singular.
DET_SINGULAR_FRACTION = 1e-12

PURE_TRANSLATION_TOL = 1e-9


@dataclass
class Screw:
    """6-component screw; kind is "twist" (omega; v) or "wrench" (f; m)."""

    angular: np.ndarray
    linear: np.ndarray
    kind: str = "twist"


def reciprocal_product(twist: Screw, wrench: Screw) -> float:
    """Reciprocal pairing omega . m + v . f of a twist and a wrench."""
    return float(twist.angular @ wrench.linear + twist.linear @ wrench.angular)


def transmission_wrenches(pose: Pose, geometry: RobotGeometry) -> list[Screw]:
    """Unit wrenches transmitted by the four actuators to the platform.

    External limbs push along their limb direction through the attachment
    point; the central limb acts along its direction through the platform
    origin (zero moment).
    """
    frames = limb_frames(pose, geometry)
    wrenches = []
    for l in range(3):
        s = frames.directions[l]
        wrenches.append(Screw(s.copy(), np.cross(frames.moment_arms[l], s), "wrench"))
    wrenches.append(Screw(frames.directions[3].copy(), np.zeros(3), "wrench"))
    return wrenches


def twist_map(pose: Pose) -> np.ndarray:
    """(6,4) map from task rates (dx, dz, dtheta, dpsi) to the spatial twist
    (omega; v) at the platform origin."""
    t = np.zeros((6, 4))
    t[0:3, 2] = Y_AXIS
    t[0:3, 3] = rot_y(pose.theta) @ Z_AXIS
    t[3, 0] = 1.0
    t[5, 1] = 1.0
    return t


@dataclass
class OutputTwists:
    """Normalized output twists, one per actuator.

    twists[i] is None when actuator i produces a pure translation (angular
    part below tolerance).  near_singular flags an ill-conditioned forward
    Jacobian: directions are then the best-effort SVD solution.
    """

    twists: list[Screw | None]
    near_singular: bool
    det_jd: float


def output_twists(pose: Pose, geometry: RobotGeometry) -> OutputTwists:
    """Platform twist per actuator with the other three locked, normalized
    to unit angular part."""
    jd, ji = jacobians(pose, geometry)
    det = float(np.linalg.det(jd))
    rhs = -ji  # task rates X with J_D X = e_i per column
    near_singular = not np.isfinite(det) or np.linalg.cond(jd) > CONDITION_LIMIT
    if near_singular:
        rates = np.linalg.lstsq(jd, rhs, rcond=None)[0]
    else:
        rates = np.linalg.solve(jd, rhs)
    tmap = twist_map(pose)
    twists: list[Screw | None] = []
    for i in range(4):
        spatial = tmap @ rates[:, i]
        omega, v = spatial[:3], spatial[3:]
        scale = np.linalg.norm(omega)
        if scale < PURE_TRANSLATION_TOL:
            twists.append(None)
        else:
            twists.append(Screw(omega / scale, v / scale, "twist"))
    return OutputTwists(twists, near_singular, det)


@dataclass
class OmegaVector:
    """Pairwise angles [deg] between output-twist angular parts, ordered
    (1,2), (1,3), (1,4), (2,3), (2,4), (3,4)."""

    angles_deg: np.ndarray  # (6,)
    min_value: float
    min_index: int
    pair: tuple[int, int]  # 0-based actuator indices
    near_singular: bool = False
    det_jd: float = float("nan")

    def pair_label(self) -> str:
        return f"{self.pair[0] + 1}-{self.pair[1] + 1}"


def pair_angle_deg(u: np.ndarray, v: np.ndarray) -> float:
    """Angle [deg] between two unit twist-axis directions, treated as
    lines: output twists solve a homogeneous reciprocity system, so each
    direction carries an arbitrary sign."""
    return float(np.degrees(np.arccos(np.clip(abs(u @ v), 0.0, 1.0))))


def omega_from_output_twists(ots: OutputTwists, reference_det: float) -> OmegaVector:
    """Pairwise indices from precomputed output twists.

    Pairs involving an undefined twist direction get the 180 deg sentinel.
    When J_D was ill-conditioned the angles come from the SVD best-effort
    directions, and the minimum is forced to zero once |det J_D| falls
    below 1e-12 of the reference determinant, keeping the signal monotone
    through the singularity itself.
    """
    angles = np.full(len(ACTUATOR_PAIRS), UNDEFINED_PAIR_ANGLE_DEG)
    for idx, (i, j) in enumerate(ACTUATOR_PAIRS):
        ti, tj = ots.twists[i], ots.twists[j]
        if ti is None or tj is None:
            continue
        angles[idx] = pair_angle_deg(ti.angular, tj.angular)
    min_index = int(np.argmin(angles))
    if ots.near_singular and abs(ots.det_jd) < DET_SINGULAR_FRACTION * reference_det:
        angles[min_index] = 0.0
    return OmegaVector(
        angles_deg=angles,
        min_value=float(angles[min_index]),
        min_index=min_index,
        pair=ACTUATOR_PAIRS[min_index],
        near_singular=ots.near_singular,
        det_jd=ots.det_jd,
    )


def omega_indices(pose: Pose, geometry: RobotGeometry) -> OmegaVector:
    """The six pairwise proximity indices and their minimum at a pose."""
    return omega_from_output_twists(
        output_twists(pose, geometry), geometry.home_det_jd()
    )
