"""Reference tick kernel, pure Python.

Twin of _kernel_cy. Keep every expression and branch in lockstep with
the .pyx file so the two produce bit-identical trajectories.

State layout:
    ch, tg, decay  double[12]: chamber contractions, targets, per-tick
                   decay factors exp(-dt/tau). Indices 0..3 are the body
                   chambers at hinges 0..3; 4..11 are finger chambers
                   (f0.c1, f0.c2, f1.c1, ..., f3.c2).
    fold_f         double[3]: theta_deg, theta_max_deg, theta decay factor
    fold_i         int[2]: locked, armed
"""

from __future__ import annotations

IMPL = "python"

_K_DRIVE = 1.15
_DRIVE_DEADBAND = 0.05
_LOCK_CAPTURE_DEG = 1.0
_LOCK_REARM_DEG = 5.0
_RELEASE_CONTRACTION = 0.8
_SETTLE_SNAP_DEG = 0.5

EV_LOCK_ENGAGED = 1
EV_LOCK_RELEASED = 2
EV_SETTLED_NEUTRAL = 4


def tick(ch, tg, decay, fold_f, fold_i):
    """Advance chambers and the fold by one tick. Returns an event bitmask."""
    for i in range(12):
        ch[i] = tg[i] + (ch[i] - tg[i]) * decay[i]
    theta = fold_f[0]
    tmax = fold_f[1]
    k = fold_f[2]
    locked = fold_i[0]
    armed = fold_i[1]
    c_plus = 0.5 * (ch[1] + ch[3])
    c_minus = 0.5 * (ch[0] + ch[2])
    drive = c_plus - c_minus
    ev = 0
    if locked:
        opp = c_minus if theta > 0.0 else c_plus
        if opp >= _RELEASE_CONTRACTION:
            locked = 0
            armed = 0
            ev |= EV_LOCK_RELEASED
    if not locked:
        adrive = drive if drive >= 0.0 else -drive
        if adrive < _DRIVE_DEADBAND:
            atheta = theta if theta >= 0.0 else -theta
            if atheta < 0.5 * tmax:
                target = 0.0
            else:
                target = tmax if theta > 0.0 else -tmax
        else:
            t = _K_DRIVE * drive
            if t > 1.0:
                t = 1.0
            elif t < -1.0:
                t = -1.0
            target = t * tmax
        theta = target + (theta - target) * k
        atheta = theta if theta >= 0.0 else -theta
        if not armed and tmax - atheta > _LOCK_REARM_DEG:
            armed = 1
        if armed and tmax - atheta < _LOCK_CAPTURE_DEG:
            theta = tmax if theta > 0.0 else -tmax
            locked = 1
            armed = 0
            ev |= EV_LOCK_ENGAGED
        elif theta != 0.0 and atheta < _SETTLE_SNAP_DEG and adrive < _DRIVE_DEADBAND:
            theta = 0.0
            ev |= EV_SETTLED_NEUTRAL
    fold_f[0] = theta
    fold_i[0] = locked
    fold_i[1] = armed
    return ev


def run_idle(ch, tg, decay, fold_f, fold_i, n_ticks):
    """Tick up to n_ticks, stopping early at the first event.

    Returns (ticks_done, event_mask).
    """
    done = 0
    while done < n_ticks:
        ev = tick(ch, tg, decay, fold_f, fold_i)
        done += 1
        if ev:
            return done, ev
    return done, 0
