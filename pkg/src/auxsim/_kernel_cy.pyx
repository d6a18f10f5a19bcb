# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tick kernel. Twin of _kernel_py; keep expressions in lockstep."""

IMPL = "cython"

cdef double _K_DRIVE = 1.15
cdef double _DRIVE_DEADBAND = 0.05
cdef double _LOCK_CAPTURE_DEG = 1.0
cdef double _LOCK_REARM_DEG = 5.0
cdef double _RELEASE_CONTRACTION = 0.8
cdef double _SETTLE_SNAP_DEG = 0.5

EV_LOCK_ENGAGED = 1
EV_LOCK_RELEASED = 2
EV_SETTLED_NEUTRAL = 4


cdef int _tick(double[:] ch, double[:] tg, double[:] decay,
               double[:] fold_f, int[:] fold_i) nogil:
    cdef int i
    cdef double theta, tmax, k, c_plus, c_minus, drive, opp
    cdef double adrive, atheta, t, target
    cdef int locked, armed, ev
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
            ev |= 2
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
        if (not armed) and tmax - atheta > _LOCK_REARM_DEG:
            armed = 1
        if armed and tmax - atheta < _LOCK_CAPTURE_DEG:
            theta = tmax if theta > 0.0 else -tmax
            locked = 1
            armed = 0
            ev |= 1
        elif theta != 0.0 and atheta < _SETTLE_SNAP_DEG and adrive < _DRIVE_DEADBAND:
            theta = 0.0
            ev |= 4
    fold_f[0] = theta
    fold_i[0] = locked
    fold_i[1] = armed
    return ev


def tick(double[:] ch, double[:] tg, double[:] decay,
         double[:] fold_f, int[:] fold_i):
    """Advance chambers and the fold by one tick. Returns an event bitmask."""
    return _tick(ch, tg, decay, fold_f, fold_i)


def run_idle(double[:] ch, double[:] tg, double[:] decay,
             double[:] fold_f, int[:] fold_i, long n_ticks):
    """Tick up to n_ticks, stopping early at the first event.

    Returns (ticks_done, event_mask).
    """
    cdef long done = 0
    cdef int ev = 0
    with nogil:
        while done < n_ticks:
            ev = _tick(ch, tg, decay, fold_f, fold_i)
            done += 1
            if ev:
                break
    if ev:
        return done, ev
    return done, 0
