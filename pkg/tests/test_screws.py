import numpy as np
import pytest

from upsrpu.geometry import Pose
from upsrpu.kinematics import forward_kinematics, inverse_kinematics, jacobians
from upsrpu.screws import (
    ACTUATOR_PAIRS,
    Screw,
    omega_indices,
    output_twists,
    pair_angle_deg,
    reciprocal_product,
    transmission_wrenches,
    twist_map,
)

from conftest import sample_workspace_poses


class TestReciprocalProduct:
    def test_rotation_about_force_line(self):
        twist = Screw(np.array([0, 0, 1.0]), np.zeros(3), "twist")
        wrench = Screw(np.array([0, 0, 1.0]), np.zeros(3), "wrench")
        assert reciprocal_product(twist, wrench) == 0.0

    def test_translation_along_force(self):
        twist = Screw(np.zeros(3), np.array([1.0, 0, 0]), "twist")
        wrench = Screw(np.array([1.0, 0, 0]), np.zeros(3), "wrench")
        assert reciprocal_product(twist, wrench) == 1.0

    def test_rotation_against_couple(self):
        twist = Screw(np.array([0, 0, 1.0]), np.zeros(3), "twist")
        wrench = Screw(np.zeros(3), np.array([0, 0, 1.0]), "wrench")
        assert reciprocal_product(twist, wrench) == 1.0


class TestTransmissionWrenches:
    def test_central_wrench_through_origin(self, simple_geometry):
        wrenches = transmission_wrenches(Pose(0, 0.7, 0, 0), simple_geometry)
        assert np.allclose(wrenches[3].angular, [0, 0, 1], atol=1e-12)
        assert np.allclose(wrenches[3].linear, 0.0)

    def test_external_wrench_direction(self, simple_geometry):
        wrenches = transmission_wrenches(Pose(0, 0.7, 0, 0), simple_geometry)
        expected = np.array([-0.1, 0, 0.7]) / np.hypot(0.1, 0.7)
        assert np.allclose(wrenches[0].angular, expected, atol=1e-9)

    def test_moment_orthogonal_to_force(self, geometry):
        for pose in sample_workspace_poses(geometry, 10, seed=2):
            for w in transmission_wrenches(pose, geometry)[:3]:
                assert abs(w.angular @ w.linear) < 1e-14

    def test_force_parts_are_unit(self, geometry):
        for w in transmission_wrenches(geometry.home, geometry):
            assert np.linalg.norm(w.angular) == pytest.approx(1.0, abs=1e-12)


class TestOutputTwists:
    def test_reciprocity_against_other_wrenches(self, geometry):
        worst = 0.0
        for pose in sample_workspace_poses(geometry, 100, seed=7, min_omega_deg=1.0):
            ots = output_twists(pose, geometry)
            wrenches = transmission_wrenches(pose, geometry)
            for i in range(4):
                if ots.twists[i] is None:
                    continue
                for j in range(4):
                    if i != j:
                        worst = max(
                            worst, abs(reciprocal_product(ots.twists[i], wrenches[j]))
                        )
        assert worst < 1e-8

    def test_directions_match_fk_differencing(self, geometry):
        delta = 1e-6
        for pose in sample_workspace_poses(geometry, 15, seed=9, min_omega_deg=5.0):
            joints = inverse_kinematics(pose, geometry)[0]
            ots = output_twists(pose, geometry)
            tmap = twist_map(pose)
            for i in range(4):
                if ots.twists[i] is None:
                    continue
                plus, minus = joints.copy(), joints.copy()
                plus[i] += delta
                minus[i] -= delta
                rates = (
                    forward_kinematics(plus, geometry, pose).as_array()
                    - forward_kinematics(minus, geometry, pose).as_array()
                ) / (2 * delta)
                omega = (tmap @ rates)[:3]
                angle = pair_angle_deg(omega / np.linalg.norm(omega), ots.twists[i].angular)
                assert angle < 0.01

    def test_mirror_symmetric_pair(self, simple_geometry):
        ots = output_twists(Pose(0.03, 0.71, 0.15, 0.0), simple_geometry)
        mirror = np.array([1.0, -1.0, 1.0])
        w2, w3 = ots.twists[1].angular, ots.twists[2].angular
        # Twist directions carry solver sign; compare as lines.
        assert min(
            np.linalg.norm(w2 - mirror * w3), np.linalg.norm(w2 + mirror * w3)
        ) < 1e-9


class TestOmegaIndices:
    def test_identical_directions_zero(self):
        u = np.array([0.3, -0.5, 0.81])
        u = u / np.linalg.norm(u)
        assert pair_angle_deg(u, u) == pytest.approx(0.0, abs=1e-6)
        assert pair_angle_deg(u, -u) == pytest.approx(0.0, abs=1e-6)

    def test_orthogonal_directions_ninety(self):
        assert pair_angle_deg(np.array([1.0, 0, 0]), np.array([0, 1.0, 0])) == pytest.approx(90.0)

    def test_ordering_and_min_identification(self, geometry):
        om = omega_indices(Pose(0, 0.75, 0, 0.95), geometry)
        assert om.angles_deg.shape == (6,)
        assert np.all((om.angles_deg >= 0) & (om.angles_deg <= 180))
        assert om.min_value == pytest.approx(np.min(om.angles_deg))
        assert om.pair == ACTUATOR_PAIRS[int(np.argmin(om.angles_deg))]

    def test_min_decreases_along_sweep_to_singularity(self, geometry):
        def det_at(psi):
            return np.linalg.det(jacobians(Pose(0, 0.75, 0, psi), geometry)[0])

        lo, hi = 1.0, 1.1
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if det_at(lo) * det_at(mid) <= 0:
                hi = mid
            else:
                lo = mid
        singular_psi = 0.5 * (lo + hi)
        ref = geometry.home_det_jd()
        crossed_half_degree = None
        for step in np.geomspace(0.1, 1e-7, 30):
            pose = Pose(0, 0.75, 0, singular_psi - step)
            ratio = abs(det_at(singular_psi - step)) / ref
            value = omega_indices(pose, geometry).min_value
            if crossed_half_degree is None and value < 0.5:
                crossed_half_degree = ratio
        assert crossed_half_degree is not None
        # The index crosses 0.5 deg while the determinant is still far from
        # its numerical floor.
        assert crossed_half_degree > 1e-9

    def test_linear_parts_align_near_singularity(self, geometry):
        pose = Pose(0, 0.75, 0, 1.0471879)  # a hair away from the singular psi
        om = omega_indices(pose, geometry)
        assert om.min_value < 0.1
        ots = output_twists(pose, geometry)
        i, j = om.pair
        cross = np.cross(ots.twists[i].linear, ots.twists[j].linear)
        assert np.linalg.norm(cross) < 1e-2

    def test_symmetry_of_pair_matrix(self, geometry):
        # Omega_{i,j} = Omega_{j,i} holds by construction: the six stored
        # values cover each unordered pair once.
        seen = set()
        for i, j in ACTUATOR_PAIRS:
            assert (j, i) not in seen
            seen.add((i, j))
        assert len(seen) == 6

    def test_pure_translation_sentinel(self):
        # A twist with an undefined (zero angular) direction poisons no
        # comparison: its pairs read the maximally non-singular sentinel.
        from upsrpu.screws import OutputTwists, omega_from_output_twists

        unit = np.array([1.0, 0.0, 0.0])
        twists = [
            None,
            Screw(unit, np.zeros(3)),
            Screw(np.array([0.0, 1.0, 0.0]), np.zeros(3)),
            Screw(unit, np.zeros(3)),
        ]
        om = omega_from_output_twists(
            OutputTwists(twists, near_singular=False, det_jd=1.0), reference_det=1.0
        )
        # Pairs (1,2), (1,3), (1,4) involve the undefined twist.
        assert np.allclose(om.angles_deg[:3], 180.0)
        assert om.angles_deg[4] == pytest.approx(0.0)  # limbs 2 and 4 parallel
        assert om.pair == (1, 3)
