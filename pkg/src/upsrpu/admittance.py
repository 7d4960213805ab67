"""Per-axis second-order admittance filter.

The force error on each task axis drives a mass-spring-damper system
    m * ddx + c * dx + k * x = e
whose output displaces the position reference (x here is the reference
offset, not the robot position).  Axes are decoupled: the parameter
matrices are diagonal, shipped with the stiffness/damping/inertia settings
used on the knee-rehabilitation robot.

The filter is stepped with the exact zero-order-hold discretization of the
per-axis linear system, so the discrete response is independent of the
integration step for piecewise-constant inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .geometry import Pose

# Shipped admittance settings: translations x/z then rotations theta/psi.
DEFAULT_STIFFNESS = np.array([250.0, 500.0, 25.0, 25.0])
DEFAULT_DAMPING = np.array([894.0, 894.0, 89.4, 89.4])
DEFAULT_INERTIA = np.array([200.0, 200.0, 20.0, 20.0])


@dataclass
class AdmittanceParams:
    """Diagonal stiffness k, damping c and inertia m per task axis.

    Units are SI: N/m, N s/m, kg on the translational axes and N m/rad,
    N m s/rad, kg m^2 on the rotational ones.
    """

    stiffness: np.ndarray = field(default_factory=lambda: DEFAULT_STIFFNESS.copy())
    damping: np.ndarray = field(default_factory=lambda: DEFAULT_DAMPING.copy())
    inertia: np.ndarray = field(default_factory=lambda: DEFAULT_INERTIA.copy())

    def __post_init__(self):
        self.stiffness = np.asarray(self.stiffness, dtype=float)
        self.damping = np.asarray(self.damping, dtype=float)
        self.inertia = np.asarray(self.inertia, dtype=float)
        for name in ("stiffness", "damping", "inertia"):
            v = getattr(self, name)
            if v.shape != (4,) or np.any(v <= 0):
                raise ValueError(f"admittance {name} must be 4 positive values")


@dataclass
class AdmittanceState:
    """Reference offset and its rate, per task axis."""

    offset: np.ndarray
    rate: np.ndarray

    @classmethod
    def zero(cls) -> "AdmittanceState":
        return cls(np.zeros(4), np.zeros(4))

    def reset(self):
        self.offset[:] = 0.0
        self.rate[:] = 0.0


class AdmittanceModel:
    """Steps the four decoupled second-order filters.

    Discrete transition matrices are cached per step size; the caller is
    expected to step at the fixed controller period.
    """

    def __init__(self, params: AdmittanceParams | None = None):
        self.params = params or AdmittanceParams()
        self._cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def _discretize(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        if dt not in self._cache:
            ad = np.zeros((4, 2, 2))
            bd = np.zeros((4, 2))
            for axis in range(4):
                k = self.params.stiffness[axis]
                c = self.params.damping[axis]
                m = self.params.inertia[axis]
                # Augmented-matrix exponential gives the exact ZOH pair.
                aug = np.zeros((3, 3))
                aug[0, 1] = 1.0
                aug[1, 0] = -k / m
                aug[1, 1] = -c / m
                aug[1, 2] = 1.0 / m
                phi = expm(aug * dt)
                ad[axis] = phi[:2, :2]
                bd[axis] = phi[:2, 2]
            self._cache[dt] = (ad, bd)
        return self._cache[dt]

    def step(
        self, state: AdmittanceState, gated_error: np.ndarray, dt: float
    ) -> AdmittanceState:
        """Advance the filter by dt with the (already gated) force error
        held constant over the interval.  Mutates and returns state."""
        if dt <= 0:
            raise ValueError("dt must be > 0")
        gated_error = np.asarray(gated_error, dtype=float)
        ad, bd = self._discretize(dt)
        for axis in range(4):
            z = ad[axis] @ (state.offset[axis], state.rate[axis]) + bd[axis] * gated_error[axis]
            state.offset[axis], state.rate[axis] = z
        return state

    def steady_state_offset(self, error: np.ndarray) -> np.ndarray:
        """Offset reached under a constant error: e / k per axis."""
        return np.asarray(error, dtype=float) / self.params.stiffness


def compose_reference(reference: Pose, offset: np.ndarray) -> Pose:
    """Componentwise sum of the planned reference and the admittance offset."""
    return Pose.from_array(reference.as_array() + np.asarray(offset, dtype=float))
