"""Crawling on friction pads: step kinematics and turn bookkeeping.

Crawling happens in the open cross mode. One adjacent leg pair curls
until its pads plant, then re-extends; the planted pads shove the body
away from that pair along the pair's mean ray. How much of the stroke
actually turns into travel depends on each pad's grip: a pad holding
fraction h of the stroke drags its side of the body accordingly, so
unequal grip twists the body about the planted feet.

Turning happens folded: releasing the latch with one diagonal anchored
and refolding with the other rotates the whole body by half the fold
travel per release-refold subcycle, with no net fold change.
"""

from __future__ import annotations

import math

Vec = tuple[float, float]

CROSS_PAIRS = ((0, 1), (1, 2), (2, 3), (3, 0))


def hold_fraction(mu_foot: float, load_n: float, grip_required_n: float) -> float:
    """Fraction of the stroke a pad carries before it skids."""
    if grip_required_n <= 0.0:
        raise ValueError("grip_required_n must be positive")
    if mu_foot < 0.0 or load_n < 0.0:
        raise ValueError("mu_foot and load_n must be >= 0")
    return min(1.0, mu_foot * load_n / grip_required_n)


def pair_mean_dir_deg(dir_a_deg: float, dir_b_deg: float) -> float:
    diff = (dir_b_deg - dir_a_deg + 180.0) % 360.0 - 180.0
    return (dir_a_deg + diff / 2.0) % 360.0


def step_motion(
    foot_a: Vec,
    foot_b: Vec,
    dir_a_deg: float,
    dir_b_deg: float,
    stroke_mm: float,
    hold_a: float,
    hold_b: float,
) -> tuple[Vec, float]:
    """Body displacement and twist from one stroke against two planted pads.

    Feet and ray directions are in the world frame. Returns the translation
    of the feet midpoint (mm) and the rotation about it (radians, CCW).
    """
    mean = pair_mean_dir_deg(dir_a_deg, dir_b_deg)
    r = math.radians((mean + 180.0) % 360.0)  # pads push the body off their side
    ux, uy = math.cos(r), math.sin(r)
    h_mid = 0.5 * (hold_a + hold_b)
    translation = (ux * stroke_mm * h_mid, uy * stroke_mm * h_mid)
    bx, by = foot_b[0] - foot_a[0], foot_b[1] - foot_a[1]
    baseline = math.hypot(bx, by)
    if baseline == 0.0:
        return translation, 0.0
    ex, ey = bx / baseline, by / baseline
    # differential drag perpendicular to the feet baseline twists the body
    twist = stroke_mm * (hold_b - hold_a) * (ex * uy - ey * ux) / baseline
    return translation, twist


def turn_heading_step_deg(theta_step_deg: float, unit0_anchored: bool) -> float:
    """Heading change while the fold moves by theta_step_deg.

    The heading follows plate 0, which only moves when its diagonal is
    free; relative to the anchored diagonal it rotates at half the fold
    rate (its world orientation is theta/2 - 90 plus a constant).
    """
    return 0.0 if unit0_anchored else theta_step_deg / 2.0
