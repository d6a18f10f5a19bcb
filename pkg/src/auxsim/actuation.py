"""Vacuum chamber response and the two-chamber finger.

Chambers contract toward their commanded level with first-order lag;
the step function is the exact integral so tick size never changes a
trajectory endpoint. Finger joint angles ride quasi-statically on the
chamber contractions: the joints are much lighter than the air path,
so the lag lives entirely in the chambers.

Joint map, contractions in [0, 1]:
    base joint   phi1 = c2 * (120 + 24 * c1)   degrees
    tip joint    phi2 = c1 * 105               degrees
Full vacuum in both chambers curls the tip 249 degrees from the mount
ray, past straight-back, which tucks the pad under the body.
"""

from __future__ import annotations

import math

Vec = tuple[float, float]

TAU_FINGER_CHAMBER_S = 0.18
TAU_BODY_CHAMBER_S = 0.08

LINKS_MM: tuple[float, float, float] = (40.0, 40.0, 40.0)

BASE_JOINT_FULL_DEG = 120.0
BASE_JOINT_BOOST_DEG = 24.0
TIP_JOINT_FULL_DEG = 105.0

F_TIP_CAP_N = 15.04
F_STAGE1_CAP_N = 11.13
BLOCK_RAMP_DEG = 10.0  # force rises linearly over the first 10 deg of blocked travel

PAD_CONTACT_MIN_DEG = 200.0  # tip angle past this plants the friction pad


def chamber_step(contraction: float, target: float, dt_s: float, tau_s: float) -> float:
    """Advance one chamber by dt_s: exact first-order relaxation toward target."""
    if dt_s < 0.0 or tau_s <= 0.0:
        raise ValueError("dt_s must be >= 0 and tau_s > 0")
    return target + (contraction - target) * math.exp(-dt_s / tau_s)


def joint_targets(c1: float, c2: float) -> tuple[float, float]:
    """Steady-state joint angles (phi1, phi2) for chamber contractions (c1, c2)."""
    _check_contraction(c1)
    _check_contraction(c2)
    phi1 = c2 * (BASE_JOINT_FULL_DEG + BASE_JOINT_BOOST_DEG * c1)
    phi2 = c1 * TIP_JOINT_FULL_DEG
    return phi1, phi2


def finger_fk(phi1_deg: float, phi2_deg: float, links: tuple[float, float, float] = LINKS_MM) -> tuple[Vec, Vec, Vec, Vec]:
    """Joint points (base, knuckle, mid, tip) in the finger frame.

    x runs along the mount ray away from the body, y is the curl side.
    """
    l1, l2, l3 = links
    r1 = math.radians(phi1_deg)
    r12 = math.radians(phi1_deg + phi2_deg)
    p0: Vec = (0.0, 0.0)
    p1: Vec = (l1, 0.0)
    p2: Vec = (p1[0] + l2 * math.cos(r1), p1[1] + l2 * math.sin(r1))
    p3: Vec = (p2[0] + l3 * math.cos(r12), p2[1] + l3 * math.sin(r12))
    return p0, p1, p2, p3


def reach_mm(phi1_deg: float, phi2_deg: float) -> float:
    """Tip distance along the mount ray. Negative means tucked behind the mount."""
    return finger_fk(phi1_deg, phi2_deg)[3][0]


def tip_angle_deg(phi1_deg: float, phi2_deg: float) -> float:
    return phi1_deg + phi2_deg


def pad_engaged(phi1_deg: float, phi2_deg: float) -> bool:
    """Is the tip pad rolled under far enough to grip the ground?"""
    return tip_angle_deg(phi1_deg, phi2_deg) >= PAD_CONTACT_MIN_DEG


def blocked_force_n(c1: float, c2: float, phi1_deg: float, phi2_deg: float) -> tuple[float, float]:
    """(stage1, tip) contact forces when the joints are held at the given angles.

    Each stage pushes with its cap scaled by the driving contraction, ramping
    in over the first BLOCK_RAMP_DEG of angle deficit so the force vanishes
    smoothly at the unblocked steady state.
    """
    _check_contraction(c1)
    _check_contraction(c2)
    want1, want2 = joint_targets(c1, c2)
    deficit1 = max(0.0, want1 - phi1_deg)
    deficit2 = max(0.0, want2 - phi2_deg)
    stage1 = F_STAGE1_CAP_N * min(c2, deficit1 / BLOCK_RAMP_DEG)
    tip = F_TIP_CAP_N * min(c1, deficit2 / BLOCK_RAMP_DEG)
    return stage1, tip


def _check_contraction(c: float) -> None:
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"contraction {c} outside [0, 1]")
