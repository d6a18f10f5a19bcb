"""Planar grasp screening: ray contacts, friction cones, closure.

The gripper hangs over the scene, fingers radiating from the body
axis along their mount rays. A finger can touch an object where its
ray exits the object's footprint, provided that exit sits inside the
finger's reach annulus. A touch is only usable when the direction the
finger can push lies inside the friction cone at that surface point:
in the open cross mode each finger pushes straight down its own ray,
in a folded mode the bonded pair pushes along the pair's mean ray.

Lifting is screened with a linear program: maximize total squeeze
subject to planar force and torque balance, Coulomb cones, and the
per-finger force cap. The out-of-plane carry capacity is the friction
the squeeze can mobilize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import actuation

Vec = tuple[float, float]

REACH_MIN_MM = actuation.reach_mm(144.0, 105.0)  # tip tucked behind the mount
REACH_MAX_MM = actuation.reach_mm(0.0, 0.0)

REASON_OK = "closure_ok"
REASON_SLIP = "slip"
REASON_UNREACHABLE = "unreachable"
REASON_WEAK = "insufficient_force"

_SQUEEZE_TOL_N = 1e-9
_CONE_TOL_DEG = 1e-9


class GraspDegenerateError(ValueError):
    """Closure asked with fewer than two contacts."""


@dataclass(frozen=True)
class SceneObject:
    object_id: str
    shape: str  # "circle" | "box"
    size_mm: tuple[float, ...]  # circle: (radius,), box: (width, height)
    pose_mm_deg: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mass_kg: float = 1.0

    def validate(self) -> list[str]:
        problems = []
        if self.shape == "circle":
            if len(self.size_mm) != 1 or self.size_mm[0] <= 0.0:
                problems.append(f"object {self.object_id}: circle needs one positive radius")
        elif self.shape == "box":
            if len(self.size_mm) != 2 or any(s <= 0.0 for s in self.size_mm):
                problems.append(f"object {self.object_id}: box needs two positive sides")
        else:
            problems.append(f"object {self.object_id}: unknown shape {self.shape!r}")
        if self.mass_kg < 0.0:
            problems.append(f"object {self.object_id}: mass_kg must be >= 0")
        return problems


@dataclass(frozen=True)
class Contact:
    finger: int
    point: Vec
    normal_out: Vec  # unit surface normal, out of the object
    push: Vec  # unit direction the finger presses
    rho_mm: float
    psi_deg: float  # push vs inward normal misalignment
    usable: bool


@dataclass(frozen=True)
class GraspVerdict:
    success: bool
    reason: str
    usable_contacts: int
    squeeze_n: float
    capacity_n: float
    weight_n: float
    contacts: tuple[Contact, ...]


def _ray_exit(dir_deg: float, obj: SceneObject) -> tuple[Vec, Vec] | None:
    """Exit point and outward normal of the ray (origin, dir) through the object."""
    r = math.radians(dir_deg)
    d = (math.cos(r), math.sin(r))
    cx, cy, rot = obj.pose_mm_deg
    if obj.shape == "circle":
        radius = obj.size_mm[0]
        b = d[0] * cx + d[1] * cy
        disc = b * b - (cx * cx + cy * cy) + radius * radius
        if disc < 0.0:
            return None
        t = b + math.sqrt(disc)
        if t <= 0.0:
            return None
        p = (t * d[0], t * d[1])
        n = ((p[0] - cx) / radius, (p[1] - cy) / radius)
        return p, n
    # box: slab test in the box frame
    rr = math.radians(rot)
    c, s = math.cos(rr), math.sin(rr)
    ox = c * (0.0 - cx) + s * (0.0 - cy)
    oy = -s * (0.0 - cx) + c * (0.0 - cy)
    dx = c * d[0] + s * d[1]
    dy = -s * d[0] + c * d[1]
    hx, hy = obj.size_mm[0] / 2.0, obj.size_mm[1] / 2.0
    t_enter, t_exit = -math.inf, math.inf
    exit_normal_box = (0.0, 0.0)
    for o, dd, h, axis in ((ox, dx, hx, 0), (oy, dy, hy, 1)):
        if dd == 0.0:
            if abs(o) > h:
                return None
            continue
        t1 = (-h - o) / dd
        t2 = (h - o) / dd
        lo, hi = min(t1, t2), max(t1, t2)
        t_enter = max(t_enter, lo)
        if hi < t_exit:
            t_exit = hi
            sign = 1.0 if dd > 0.0 else -1.0
            exit_normal_box = (sign, 0.0) if axis == 0 else (0.0, sign)
    if t_enter > t_exit or t_exit <= 0.0:
        return None
    p = (t_exit * d[0], t_exit * d[1])
    nbx, nby = exit_normal_box
    n = (c * nbx - s * nby, s * nbx + c * nby)
    return p, n


def _push_directions(
    ray_dirs_deg: list[float],
    pairs: tuple[tuple[int, int], ...] | None,
) -> list[float]:
    """Direction each finger presses, degrees. Bonded pairs share their mean ray."""
    out = [(d + 180.0) % 360.0 for d in ray_dirs_deg]
    for a, b in pairs or ():
        da, db = ray_dirs_deg[a], ray_dirs_deg[b]
        diff = (db - da + 180.0) % 360.0 - 180.0
        mean = da + diff / 2.0
        for i in (a, b):
            out[i] = (mean + 180.0) % 360.0
    return out


def cast_contacts(
    ray_dirs_deg: list[float],
    obj: SceneObject,
    mu: float,
    pairs: tuple[tuple[int, int], ...] | None,
    mount_radius_mm: float,
) -> list[Contact]:
    """Contacts for each finger ray that reaches the object at all.

    ``pairs`` names bonded finger index pairs when the body is folded
    (None in the open cross mode). mount_radius_mm is the body-axis-to-
    mount distance; a contact counts only when its radius falls inside
    the tip's reach annulus.
    """
    cone_deg = math.degrees(math.atan(mu))
    pushes = _push_directions(ray_dirs_deg, pairs)
    contacts = []
    for i, ray_deg in enumerate(ray_dirs_deg):
        hit = _ray_exit(ray_deg, obj)
        if hit is None:
            continue
        p, n = hit
        rho = math.hypot(*p)
        if not (REACH_MIN_MM <= rho - mount_radius_mm <= REACH_MAX_MM):
            continue
        pr = math.radians(pushes[i])
        push = (math.cos(pr), math.sin(pr))
        into = (-n[0], -n[1])
        dot = max(-1.0, min(1.0, push[0] * into[0] + push[1] * into[1]))
        psi = math.degrees(math.acos(dot))
        usable = psi <= cone_deg + _CONE_TOL_DEG
        contacts.append(Contact(i, p, n, push, rho, psi, usable))
    return contacts


def closure_squeeze_n(
    contacts: list[Contact],
    mu: float,
    cap_n: float = actuation.F_TIP_CAP_N,
) -> float:
    """Largest total normal squeeze that stays in planar equilibrium.

    Raises GraspDegenerateError with fewer than two contacts.
    """
    if len(contacts) < 2:
        raise GraspDegenerateError("closure needs at least two contacts")
    m = len(contacts)
    # variables: per contact, normal magnitude n_i >= 0 and tangential t_i
    a_eq = np.zeros((3, 2 * m))
    for i, ct in enumerate(contacts):
        nx, ny = -ct.normal_out[0], -ct.normal_out[1]  # press into the surface
        tx, ty = -ct.normal_out[1], ct.normal_out[0]
        px, py = ct.point
        a_eq[0, 2 * i] = nx
        a_eq[1, 2 * i] = ny
        a_eq[2, 2 * i] = px * ny - py * nx
        a_eq[0, 2 * i + 1] = tx
        a_eq[1, 2 * i + 1] = ty
        a_eq[2, 2 * i + 1] = px * ty - py * tx
    b_eq = np.zeros(3)
    # |t_i| <= mu * n_i
    a_ub = np.zeros((2 * m, 2 * m))
    for i in range(m):
        a_ub[2 * i, 2 * i] = -mu
        a_ub[2 * i, 2 * i + 1] = 1.0
        a_ub[2 * i + 1, 2 * i] = -mu
        a_ub[2 * i + 1, 2 * i + 1] = -1.0
    b_ub = np.zeros(2 * m)
    c = np.zeros(2 * m)
    c[0::2] = -1.0
    bounds = [(0.0, cap_n) if k % 2 == 0 else (None, None) for k in range(2 * m)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not res.success:
        return 0.0
    return float(-res.fun)


def grasp_trial(
    ray_dirs_deg: list[float],
    obj: SceneObject,
    mu: float,
    pairs: tuple[tuple[int, int], ...] | None,
    mount_radius_mm: float,
    cap_n: float = actuation.F_TIP_CAP_N,
) -> GraspVerdict:
    """Screen one grasp attempt and say why it fails if it does."""
    contacts = cast_contacts(ray_dirs_deg, obj, mu, pairs, mount_radius_mm)
    weight = obj.mass_kg * 9.81
    usable = [ct for ct in contacts if ct.usable]
    if len(usable) < 2:
        reason = REASON_SLIP if any(not ct.usable for ct in contacts) else REASON_UNREACHABLE
        return GraspVerdict(False, reason, len(usable), 0.0, 0.0, weight, tuple(contacts))
    squeeze = closure_squeeze_n(usable, mu, cap_n)
    capacity = mu * squeeze
    if squeeze <= _SQUEEZE_TOL_N:
        return GraspVerdict(False, REASON_WEAK, len(usable), squeeze, capacity, weight, tuple(contacts))
    if weight > 0.0 and capacity <= weight:
        return GraspVerdict(False, REASON_SLIP, len(usable), squeeze, capacity, weight, tuple(contacts))
    return GraspVerdict(True, REASON_OK, len(usable), squeeze, capacity, weight, tuple(contacts))
