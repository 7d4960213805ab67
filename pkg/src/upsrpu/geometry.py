"""Geometry model of the 3UPS+RPU parallel robot.

The robot has three external UPS limbs anchored at A0, B0, C0 on the fixed
platform and at A1, B1, C1 on the mobile platform, plus a central RPU limb
from D0 to the mobile-platform origin.  Anchor coordinates are first-class
configuration: the generator below is a convenience that places them on
circles, but every anchor can be overridden explicitly.

Anchor generator convention (the "D" side has negative y, the "I" side is
its mirror across the x-z plane):

    A0 = r1 * (cos(beta_fd), -sin(beta_fd), 0)      limb 1, D side
    B0 = r2 * (cos(beta_fi), +sin(beta_fi), 0)      limb 2, I side
    C0 = r3 * (cos(beta_fi), -sin(beta_fi), 0)      limb 3, mirror of limb 2
    D0 = (0, d_s, 0)                                central limb

and analogously for the mobile anchors with (rm1..rm3, beta_md, beta_mi).
Limbs 2 and 3 therefore form the mirrored pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Raised for physically inconsistent geometry or parameters."""


@dataclass
class Pose:
    """Task-space location of the mobile platform.

    x, z are the platform-origin translations in the fixed frame (the y
    translation is structurally zero); theta is the rotation about the
    fixed y axis and psi the rotation about the platform z axis.
    """

    x: float
    z: float
    theta: float
    psi: float

    def origin(self) -> np.ndarray:
        return np.array([self.x, 0.0, self.z])

    def rotation(self) -> np.ndarray:
        """Platform orientation, composed as Rot_y(theta) @ Rot_z(psi)."""
        return rot_y(self.theta) @ rot_z(self.psi)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.z, self.theta, self.psi])

    @classmethod
    def from_array(cls, a) -> "Pose":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass
class AnchorLayout:
    """Circle-placement parameters for the anchor generator (lengths in m,
    angles in degrees)."""

    r1: float = 0.3
    r2: float = 0.3
    r3: float = 0.3
    beta_fd: float = 5.0
    beta_fi: float = 90.0
    d_s: float = 0.0
    rm1: float = 0.2
    rm2: float = 0.2
    rm3: float = 0.2
    beta_md: float = 70.0
    beta_mi: float = 30.0


def generate_anchors(layout: AnchorLayout) -> tuple[np.ndarray, np.ndarray]:
    """Place the anchors per the circle convention in the module docstring.

    Returns (fixed_anchors, mobile_anchors): a (4,3) array with rows
    A0, B0, C0, D0 and a (3,3) array with rows A1, B1, C1.
    """
    for name in ("r1", "r2", "r3", "rm1", "rm2", "rm3"):
        if getattr(layout, name) <= 0:
            raise ConfigurationError(f"anchor radius {name} must be > 0")

    def on_circle(radius, angle_deg, side):
        a = np.radians(angle_deg)
        return radius * np.array([np.cos(a), side * np.sin(a), 0.0])

    fixed = np.vstack(
        [
            on_circle(layout.r1, layout.beta_fd, -1.0),
            on_circle(layout.r2, layout.beta_fi, +1.0),
            on_circle(layout.r3, layout.beta_fi, -1.0),
            np.array([0.0, layout.d_s, 0.0]),
        ]
    )
    mobile = np.vstack(
        [
            on_circle(layout.rm1, layout.beta_md, -1.0),
            on_circle(layout.rm2, layout.beta_mi, +1.0),
            on_circle(layout.rm3, layout.beta_mi, -1.0),
        ]
    )
    return fixed, mobile


# Actuator stroke limits.  The published table prints three entries for the
# four actuators; the fourth is filled in per limb ordering (external limbs
# share the external stroke, the central limb gets the remaining value).
DEFAULT_JOINT_MAX = np.array([0.93, 0.93, 0.93, 0.82])
DEFAULT_JOINT_MIN = np.array([0.65, 0.64, 0.65, 0.65])
DEFAULT_SOCKET_LIMIT_DEG = np.array([38.0, 38.0, 38.0])


@dataclass
class RobotGeometry:
    """Full geometric description used by the kinematics.

    fixed_anchors: (4,3) rows A0, B0, C0, D0 in the fixed frame [m]
    mobile_anchors: (3,3) rows A1, B1, C1 in the mobile frame [m]
    joint_min/joint_max: actuator stroke limits [m]
    socket_limit_deg: spherical-socket angle limits of the external limbs
    home: a comfortably non-singular pose used as reference configuration
    """

    fixed_anchors: np.ndarray
    mobile_anchors: np.ndarray
    joint_min: np.ndarray = field(default_factory=lambda: DEFAULT_JOINT_MIN.copy())
    joint_max: np.ndarray = field(default_factory=lambda: DEFAULT_JOINT_MAX.copy())
    socket_limit_deg: np.ndarray = field(
        default_factory=lambda: DEFAULT_SOCKET_LIMIT_DEG.copy()
    )
    home: Pose = field(default_factory=lambda: Pose(0.0, 0.75, 0.0, 0.0))

    def __post_init__(self):
        self.fixed_anchors = np.asarray(self.fixed_anchors, dtype=float)
        self.mobile_anchors = np.asarray(self.mobile_anchors, dtype=float)
        self.joint_min = np.asarray(self.joint_min, dtype=float)
        self.joint_max = np.asarray(self.joint_max, dtype=float)
        self.socket_limit_deg = np.asarray(self.socket_limit_deg, dtype=float)
        self._home_det = None
        self.validate()

    def validate(self):
        if self.fixed_anchors.shape != (4, 3):
            raise ConfigurationError("fixed_anchors must be 4 points (A0,B0,C0,D0)")
        if self.mobile_anchors.shape != (3, 3):
            raise ConfigurationError("mobile_anchors must be 3 points (A1,B1,C1)")
        if self.joint_min.shape != (4,) or self.joint_max.shape != (4,):
            raise ConfigurationError("joint limits must have 4 entries")
        if np.any(self.joint_min >= self.joint_max):
            raise ConfigurationError("joint_min must be < joint_max per actuator")
        if self.socket_limit_deg.shape != (3,):
            raise ConfigurationError("socket_limit_deg must have 3 entries")
        for pts, label in ((self.fixed_anchors[:3], "fixed"), (self.mobile_anchors, "mobile")):
            for i in range(3):
                for j in range(i + 1, 3):
                    if np.allclose(pts[i], pts[j]):
                        raise ConfigurationError(
                            f"{label} anchors {i + 1} and {j + 1} coincide"
                        )

    def home_det_jd(self) -> float:
        """|det J_D| at the home pose, cached; reference scale for
        singularity-proximity cutoffs."""
        if self._home_det is None:
            from .kinematics import jacobians

            jd, _ = jacobians(self.home, self)
            self._home_det = abs(float(np.linalg.det(jd)))
        return self._home_det


def default_geometry() -> RobotGeometry:
    """Geometry with the shipped dimensions of the knee-rehabilitation robot
    (r = 0.3 m / 0.2 m circles, beta_FD = 5 deg, beta_FI = 90 deg,
    beta_MD = 70 deg, beta_MI = 30 deg, d_s = 0)."""
    fixed, mobile = generate_anchors(AnchorLayout())
    return RobotGeometry(fixed_anchors=fixed, mobile_anchors=mobile)
