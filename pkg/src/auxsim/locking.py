"""Fold drive, detent basins, and the magnet latch.

The four body chambers sit in the four hinge wedges. Pumping a chamber
pulls its wedge shut: chambers 1 and 3 (the odd hinges) drive the fold
toward +theta_max, chambers 0 and 2 toward -theta_max. The net drive is
the difference of the two pair means, overdriven a little past unity so
the latch capture band is reachable before full vacuum.

The latch is a Schmitt pair: it grabs within LOCK_CAPTURE_DEG of a fold
extreme and snaps theta to the exact stop, holds with zero input, and
lets go only when the opposing chamber pair is pumped hard enough. An
armed flag keeps it from re-grabbing until theta has backed off by
LOCK_REARM_DEG. With no drive at all, theta relaxes into the nearest
detent (the open pinwheel in the middle is itself stable).
"""

from __future__ import annotations

K_DRIVE = 1.15
DRIVE_DEADBAND = 0.05
LOCK_CAPTURE_DEG = 1.0
LOCK_REARM_DEG = 5.0
RELEASE_CONTRACTION = 0.8
SETTLE_SNAP_DEG = 0.5
TAU_THETA_S = 0.05

EV_LOCK_ENGAGED = 1
EV_LOCK_RELEASED = 2
EV_SETTLED_NEUTRAL = 4

MODE_CROSS = "cross_link"
MODE_PARALLEL_PLUS = "parallel_plus"
MODE_PARALLEL_MINUS = "parallel_minus"
MODE_TRANSITIONAL = "transitional"


def nearest_stable_deg(theta_deg: float, theta_max_deg: float) -> float:
    """The detent theta falls into with no drive applied."""
    if abs(theta_deg) < 0.5 * theta_max_deg:
        return 0.0
    return theta_max_deg if theta_deg > 0.0 else -theta_max_deg


def fold_target_deg(theta_deg: float, drive: float, theta_max_deg: float) -> float:
    """Quasi-static angle the fold relaxes toward under the given drive."""
    if abs(drive) < DRIVE_DEADBAND:
        return nearest_stable_deg(theta_deg, theta_max_deg)
    t = K_DRIVE * drive
    if t > 1.0:
        t = 1.0
    elif t < -1.0:
        t = -1.0
    return t * theta_max_deg


def release_pair(theta_deg: float) -> tuple[int, int]:
    """Body chamber indices that can pop the latch at the current fold sign."""
    return (0, 2) if theta_deg > 0.0 else (1, 3)


def mode_name(theta_deg: float, locked: bool, theta_max_deg: float) -> str:
    if locked and theta_deg == theta_max_deg:
        return MODE_PARALLEL_PLUS
    if locked and theta_deg == -theta_max_deg:
        return MODE_PARALLEL_MINUS
    if theta_deg == 0.0:
        return MODE_CROSS
    return MODE_TRANSITIONAL
