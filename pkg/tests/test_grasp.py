"""Grasp screening against hand-checked scenes.

Scene numbers below were frozen from closed-form geometry worked out
on paper: ray exit points against a rotated 300x100 box and a circle,
cone half-angles atan(mu), and the saturated squeeze 4 * 15.04.
"""

import math
import random

import pytest

from auxsim import grasp
from auxsim.geometry import body_fk, mount_rays, pentagon_unit

GEOM = pentagon_unit()
MU = 0.6
PAIRS_PLUS = ((0, 1), (2, 3))
PAIRS_MINUS = ((1, 2), (3, 0))


def menu(theta_deg):
    rays = mount_rays(GEOM, theta_deg)
    center = body_fk(GEOM, theta_deg).center
    dirs = [r[1] for r in rays]
    pt = rays[0][0]
    radius = math.hypot(pt[0] - center[0], pt[1] - center[1])
    return dirs, radius


BOX = grasp.SceneObject("slab", "box", (300.0, 100.0), (0.0, 0.0, 9.0), 1.0)
DISC = grasp.SceneObject("disc", "circle", (120.0,), (0.0, 0.0, 0.0), 1.0)


class TestRayMenus:
    def test_cross_rays_are_cardinal(self):
        dirs, radius = menu(0.0)
        assert dirs == [270.0, 0.0, 90.0, 180.0]
        assert radius == pytest.approx(54.322858732732584, abs=1e-9)

    def test_folded_rays_pair_up(self):
        dirs, radius = menu(144.0)
        assert dirs == pytest.approx([270.0, 288.0, 90.0, 108.0])
        assert radius == pytest.approx(46.28266244969101, abs=1e-9)
        # both pairs straddle an 18 degree gap
        assert (dirs[1] - dirs[0]) % 360.0 == pytest.approx(18.0)
        assert (dirs[3] - dirs[2]) % 360.0 == pytest.approx(18.0)


class TestFrozenScenes:
    def test_box_at_9_deg_parallel_mode_succeeds(self):
        # pair mean rays meet the long faces dead on: psi = 0, all four
        # fingers saturate their cap and the squeeze tops out at 60.16
        dirs, radius = menu(144.0)
        v = grasp.grasp_trial(dirs, BOX, MU, PAIRS_PLUS, radius)
        assert v.success and v.reason == "closure_ok"
        assert v.usable_contacts == 4
        assert v.squeeze_n == pytest.approx(60.16, abs=1e-9)
        assert v.capacity_n == pytest.approx(36.096, abs=1e-9)
        assert v.weight_n == pytest.approx(9.81)
        for ct in v.contacts:
            assert ct.psi_deg == pytest.approx(0.0, abs=1e-9)
            assert ct.rho_mm == pytest.approx(50.623256289400146, abs=1e-9)

    def test_box_at_54_deg_cross_mode_all_slip(self):
        # cardinal rays hit faces tilted 54 off square: misalignment is
        # 54 on the long faces and 36 on the short ones, both outside
        # the 30.96 degree cone for mu = 0.6
        dirs, radius = menu(0.0)
        tilted = grasp.SceneObject("slab", "box", (300.0, 100.0), (0.0, 0.0, 54.0), 1.0)
        v = grasp.grasp_trial(dirs, tilted, MU, None, radius)
        assert not v.success and v.reason == "slip"
        assert v.usable_contacts == 0
        psis = sorted(round(ct.psi_deg, 9) for ct in v.contacts)
        assert psis == [36.0, 36.0, 54.0, 54.0]
        assert math.degrees(math.atan(MU)) == pytest.approx(30.963756532073521)

    def test_circle_cross_mode_succeeds(self):
        dirs, radius = menu(0.0)
        v = grasp.grasp_trial(dirs, DISC, MU, None, radius)
        assert v.success and v.reason == "closure_ok"
        assert all(ct.rho_mm == pytest.approx(120.0, abs=1e-12) for ct in v.contacts)
        assert all(ct.psi_deg == pytest.approx(0.0, abs=1e-9) for ct in v.contacts)
        assert v.squeeze_n == pytest.approx(60.16, abs=1e-9)

    def test_frictionless_weightless_circle_succeeds(self):
        # mu = 0 still closes on a centered circle (pure normal squeeze)
        # and zero weight needs no carry capacity
        obj = grasp.SceneObject("disc", "circle", (120.0,), (0.0, 0.0, 0.0), 0.0)
        dirs, radius = menu(0.0)
        v = grasp.grasp_trial(dirs, obj, 0.0, None, radius)
        assert v.success and v.capacity_n == 0.0 and v.weight_n == 0.0

    def test_frictionless_massive_box_slips(self):
        obj = grasp.SceneObject("slab", "box", (300.0, 100.0), (0.0, 0.0, 9.0), 5.0)
        dirs, radius = menu(144.0)
        v = grasp.grasp_trial(dirs, obj, 0.0, PAIRS_PLUS, radius)
        assert not v.success and v.reason == "slip"
        assert v.usable_contacts == 4  # the grip closes; the carry fails
        assert v.capacity_n == 0.0 and v.weight_n == pytest.approx(49.05)


class TestReachAnnulus:
    def test_too_far_is_unreachable(self):
        dirs, radius = menu(0.0)
        far = grasp.SceneObject("disc", "circle", (300.0,), (0.0, 0.0, 0.0), 1.0)
        v = grasp.grasp_trial(dirs, far, MU, None, radius)
        assert not v.success and v.reason == "unreachable"
        assert v.usable_contacts == 0 and v.contacts == ()

    def test_too_close_is_unreachable(self):
        dirs, radius = menu(0.0)
        near = grasp.SceneObject("disc", "circle", (40.0,), (0.0, 0.0, 0.0), 1.0)
        # rho - mount radius = -14.3 mm, behind even the tucked tip
        v = grasp.grasp_trial(dirs, near, MU, None, radius)
        assert not v.success and v.reason == "unreachable"

    def test_annulus_bounds_come_from_finger_reach(self):
        assert grasp.REACH_MIN_MM == pytest.approx(-6.695397756809919, abs=1e-9)
        assert grasp.REACH_MAX_MM == pytest.approx(120.0, abs=1e-12)

    def test_offset_object_loses_far_fingers(self):
        dirs, radius = menu(0.0)
        off = grasp.SceneObject("disc", "circle", (80.0,), (90.0, 0.0, 0.0), 1.0)
        contacts = grasp.cast_contacts(dirs, off, MU, None, radius)
        hit = {ct.finger for ct in contacts}
        assert 1 in hit            # the +x finger reaches the near side
        assert 3 not in hit        # the -x ray exits 170 mm out, past reach


class TestClosureLp:
    def test_two_opposed_contacts_close(self):
        c = [
            grasp.Contact(0, (50.0, 0.0), (1.0, 0.0), (-1.0, 0.0), 50.0, 0.0, True),
            grasp.Contact(2, (-50.0, 0.0), (-1.0, 0.0), (1.0, 0.0), 50.0, 0.0, True),
        ]
        squeeze = grasp.closure_squeeze_n(c, 0.5, cap_n=10.0)
        assert squeeze == pytest.approx(20.0, abs=1e-6)

    def test_same_side_contacts_cannot_close(self):
        c = [
            grasp.Contact(0, (50.0, 10.0), (1.0, 0.0), (-1.0, 0.0), 51.0, 0.0, True),
            grasp.Contact(1, (50.0, -10.0), (1.0, 0.0), (-1.0, 0.0), 51.0, 0.0, True),
        ]
        assert grasp.closure_squeeze_n(c, 0.0, cap_n=10.0) <= 1e-9

    def test_degenerate_raises(self):
        c = [grasp.Contact(0, (50.0, 0.0), (1.0, 0.0), (-1.0, 0.0), 50.0, 0.0, True)]
        with pytest.raises(grasp.GraspDegenerateError):
            grasp.closure_squeeze_n(c, 0.5)
        with pytest.raises(grasp.GraspDegenerateError):
            grasp.closure_squeeze_n([], 0.5)


class TestDeterminism:
    def test_identical_calls_identical_verdicts(self):
        dirs, radius = menu(144.0)
        first = grasp.grasp_trial(dirs, BOX, MU, PAIRS_PLUS, radius)
        for _ in range(10):
            again = grasp.grasp_trial(dirs, BOX, MU, PAIRS_PLUS, radius)
            assert again == first  # bit-for-bit, dataclass equality on floats


def random_scene(rng):
    if rng.random() < 0.5:
        obj = grasp.SceneObject(
            "o", "circle", (rng.uniform(40.0, 200.0),),
            (rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0), 0.0),
            rng.uniform(0.0, 3.0))
    else:
        obj = grasp.SceneObject(
            "o", "box", (rng.uniform(80.0, 350.0), rng.uniform(60.0, 200.0)),
            (rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0), rng.uniform(0.0, 180.0)),
            rng.uniform(0.0, 3.0))
    theta = rng.choice([0.0, 144.0, -144.0])
    pairs = None if theta == 0.0 else (PAIRS_PLUS if theta > 0 else PAIRS_MINUS)
    return obj, theta, pairs


class TestMonotonicity:
    def test_more_friction_never_hurts(self):
        rng = random.Random(90125)
        for _ in range(200):
            obj, theta, pairs = random_scene(rng)
            dirs, radius = menu(theta)
            prev_success = False
            for mu in (0.15, 0.4, 0.9):
                v = grasp.grasp_trial(dirs, obj, mu, pairs, radius)
                assert not (prev_success and not v.success), (obj, mu)
                prev_success = v.success

    def test_higher_cap_never_less_capacity(self):
        rng = random.Random(54321)
        for _ in range(200):
            obj, theta, pairs = random_scene(rng)
            dirs, radius = menu(theta)
            prev = -1.0
            for cap in (5.0, 15.04, 40.0):
                v = grasp.grasp_trial(dirs, obj, 0.5, pairs, radius, cap_n=cap)
                assert v.capacity_n >= prev - 1e-9
                prev = v.capacity_n


class TestSceneObjectValidation:
    def test_good_objects_pass(self):
        assert BOX.validate() == []
        assert DISC.validate() == []

    def test_problems_are_collected(self):
        bad = grasp.SceneObject("x", "torus", (1.0, 2.0, 3.0), (0, 0, 0), -1.0)
        problems = bad.validate()
        assert len(problems) == 2
        assert any("unknown shape" in p for p in problems)
        assert any("mass_kg" in p for p in problems)

    def test_degenerate_sizes_rejected(self):
        assert grasp.SceneObject("x", "circle", (0.0,)).validate()
        assert grasp.SceneObject("x", "box", (10.0, -1.0)).validate()
        assert grasp.SceneObject("x", "box", (10.0,)).validate()
