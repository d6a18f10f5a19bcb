"""Planar kinematics of the four-unit folding ring.

The body is a closed loop of four congruent rigid plates, pinned
corner-to-corner so the pin points form a rhombus linkage with one
degree of freedom. The fold coordinate ``theta`` is signed: 0 is the
open pinwheel state, +theta_max closes every odd hinge wedge flush,
-theta_max closes the even ones. Adjacent plates counter-rotate by
theta/2 relative to the neutral pinwheel, so in the frame of plate 0
the orientations are (0, 90 - theta/2, 180, 270 - theta/2) degrees.

Everything here is pure geometry: no dynamics, no state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

Vec = tuple[float, float]

CLOSURE_TOL = 1e-9
CONTACT_AREA_TOL = 1e-9


class ThetaRangeError(ValueError):
    """Fold angle outside the admissible interval for this outline."""


class ClosureError(RuntimeError):
    """Hinge loop failed to close; the outline cannot form a ring."""


class LatticeConnectivityError(ValueError):
    """Requested tiling cannot be hinged without plates overlapping."""


def _rot(deg: float) -> tuple[float, float, float, float]:
    r = math.radians(deg)
    c, s = math.cos(r), math.sin(r)
    return c, -s, s, c


def _apply(m: tuple[float, float, float, float], p: Vec) -> Vec:
    return (m[0] * p[0] + m[1] * p[1], m[2] * p[0] + m[3] * p[1])


def _add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def _sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def _corner_angle_deg(outline: tuple[Vec, ...], idx: int) -> float:
    """Interior angle at a vertex of a convex CCW polygon."""
    n = len(outline)
    v = outline[idx]
    a = _sub(outline[(idx - 1) % n], v)
    b = _sub(outline[(idx + 1) % n], v)
    dot = a[0] * b[0] + a[1] * b[1]
    na = math.hypot(*a)
    nb = math.hypot(*b)
    return math.degrees(math.acos(max(-1.0, min(1.0, dot / (na * nb)))))


def _signed_area(pts: list[Vec] | tuple[Vec, ...]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


@dataclass
class UnitGeometry:
    """One rigid plate of the ring, in its own local frame.

    outline      CCW convex vertex loop, millimetres
    hinge_next   index of the corner pinned to the next plate (CCW around the ring)
    hinge_prev   index of the corner pinned to the previous plate
    mount_point  where a finger bolts on (local)
    mount_dir_deg  finger axis direction (local), pointing away from the body
    """

    outline: tuple[Vec, ...]
    hinge_next: int
    hinge_prev: int
    mount_point: Vec = (0.0, 0.0)
    mount_dir_deg: float = 270.0

    alpha_deg: float = field(init=False)
    side_mm: float = field(init=False)
    chord_mm: float = field(init=False)
    theta_max_deg: float = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.outline)
        if n < 3:
            raise ValueError("outline needs at least 3 vertices")
        if not (0 <= self.hinge_next < n and 0 <= self.hinge_prev < n):
            raise ValueError("hinge index out of range")
        if self.hinge_next == self.hinge_prev:
            raise ValueError("hinge corners must be distinct vertices")
        if _signed_area(self.outline) <= 0.0:
            raise ValueError("outline must wind counterclockwise")
        for i in range(n):
            a = _sub(self.outline[(i + 1) % n], self.outline[i])
            b = _sub(self.outline[(i + 2) % n], self.outline[(i + 1) % n])
            if a[0] * b[1] - a[1] * b[0] < -1e-9:
                raise ValueError("outline must be convex")

        a_next = _corner_angle_deg(self.outline, self.hinge_next)
        a_prev = _corner_angle_deg(self.outline, self.hinge_prev)
        if abs(a_next - a_prev) > 1e-9:
            raise ValueError(
                f"hinge corner angles differ ({a_next:.6f} vs {a_prev:.6f} deg); "
                "the ring would jam asymmetrically"
            )
        e_next = self._facing_edge_next()
        e_prev = self._facing_edge_prev()
        len_n = math.hypot(*_sub(e_next[1], e_next[0]))
        len_p = math.hypot(*_sub(e_prev[1], e_prev[0]))
        if abs(len_n - len_p) > 1e-9:
            raise ValueError("facing edges at the two hinge corners must match in length")

        self.alpha_deg = a_next
        self.side_mm = len_n
        self.chord_mm = math.hypot(*_sub(self.outline[self.hinge_next], self.outline[self.hinge_prev]))
        self.theta_max_deg = 360.0 - 2.0 * self.alpha_deg
        if self.theta_max_deg <= 0.0:
            raise ValueError("hinge corners too blunt; no fold travel")

    def _facing_edge_next(self) -> tuple[Vec, Vec]:
        # edge leaving the next-hinge corner CCW; mates across hinge i
        n = len(self.outline)
        return (self.outline[self.hinge_next], self.outline[(self.hinge_next + 1) % n])

    def _facing_edge_prev(self) -> tuple[Vec, Vec]:
        # edge leaving the prev-hinge corner CW; mates across hinge i-1
        n = len(self.outline)
        return (self.outline[self.hinge_prev], self.outline[(self.hinge_prev - 1) % n])


def pentagon_unit(side_mm: float = 40.0, alpha_deg: float = 108.0, skirt_mm: float = 15.0) -> UnitGeometry:
    """Five-sided plate whose two hinge corners sit on a shared chord.

    The two facing edges (length ``side_mm``) rise from the hinge corners
    at (alpha_deg - 90)/2 above the chord and meet at an inner apex, so
    closing a wedge brings facing edges flush exactly when the wedge hits
    zero. The other two corners hang ``skirt_mm`` below the chord and
    carry the finger mount on the resulting keel edge.

    alpha_deg must lie in (90, 180). Angles in degrees, lengths in mm.
    """
    if not (90.0 < alpha_deg < 180.0):
        raise ValueError("alpha_deg must be in (90, 180) for the pentagon outline")
    if side_mm <= 0.0 or skirt_mm <= 0.0:
        raise ValueError("side_mm and skirt_mm must be positive")
    h = math.radians((alpha_deg - 90.0) / 2.0)
    d = 2.0 * side_mm * math.cos(h)
    hinge_p: Vec = (0.0, 0.0)
    hinge_n: Vec = (d, 0.0)
    apex: Vec = (side_mm * math.cos(h), side_mm * math.sin(h))
    a_p = math.radians(math.degrees(h) - alpha_deg)
    a_n = math.radians(180.0 - math.degrees(h) + alpha_deg)
    v3: Vec = (hinge_p[0] + skirt_mm * math.cos(a_p), hinge_p[1] + skirt_mm * math.sin(a_p))
    v2: Vec = (hinge_n[0] + skirt_mm * math.cos(a_n), hinge_n[1] + skirt_mm * math.sin(a_n))
    outline = (hinge_p, v3, v2, hinge_n, apex)
    keel_mid: Vec = ((v3[0] + v2[0]) / 2.0, (v3[1] + v2[1]) / 2.0)
    return UnitGeometry(outline, hinge_next=3, hinge_prev=0, mount_point=keel_mid, mount_dir_deg=270.0)


def square_unit(side_mm: float = 40.0) -> UnitGeometry:
    """Square plate hinged at two adjacent corners (one edge is the chord)."""
    if side_mm <= 0.0:
        raise ValueError("side_mm must be positive")
    l = side_mm
    outline = ((0.0, 0.0), (l, 0.0), (l, l), (0.0, l))
    return UnitGeometry(outline, hinge_next=1, hinge_prev=2, mount_point=(0.0, l / 2.0), mount_dir_deg=180.0)


def theta_range(alpha_deg: float) -> tuple[float, float]:
    """Admissible fold magnitude interval [0, 360 - 2*alpha] for hinge corner angle alpha."""
    if not (0.0 < alpha_deg < 180.0):
        raise ValueError("alpha_deg must be in (0, 180)")
    return (0.0, 360.0 - 2.0 * alpha_deg)


def unit_separation(side_mm: float, theta_deg: float) -> float:
    """Gap between facing edge midpoints across one hinge opened to theta_deg.

    Pure chord formula: side * sin(theta/2).
    """
    if not (0.0 <= theta_deg <= 360.0):
        raise ValueError("theta_deg must be in [0, 360]")
    if side_mm <= 0.0:
        raise ValueError("side_mm must be positive")
    return side_mm * math.sin(math.radians(theta_deg) / 2.0)


@dataclass(frozen=True)
class UnitPose:
    position: Vec
    orientation_deg: float


@dataclass(frozen=True)
class BodyPose:
    """Poses of the four plates in the plate-0-fixed body frame."""

    theta_deg: float
    units: tuple[UnitPose, UnitPose, UnitPose, UnitPose]
    hinges: tuple[Vec, Vec, Vec, Vec]
    center: Vec


def _chain(geom: UnitGeometry, theta_deg: float) -> tuple[list[Vec], list[float]]:
    """Unchecked pose chain; callers guard the theta range."""
    half = theta_deg / 2.0
    omegas = [0.0, 90.0 - half, 180.0, 270.0 - half]
    x_n = geom.outline[geom.hinge_next]
    x_p = geom.outline[geom.hinge_prev]
    ts: list[Vec] = [(0.0, 0.0)]
    for i in range(3):
        m_i = _rot(omegas[i])
        m_j = _rot(omegas[i + 1])
        ts.append(_sub(_add(ts[i], _apply(m_i, x_n)), _apply(m_j, x_p)))
    # loop closure: hinge 3 reached from unit 3 must land back on unit 0's prev corner
    close_from_3 = _add(ts[3], _apply(_rot(omegas[3]), x_n))
    close_from_0 = _add(ts[0], _apply(_rot(omegas[0]), x_p))
    residual = math.hypot(*(_sub(close_from_3, close_from_0)))
    if residual > CLOSURE_TOL:
        raise ClosureError(f"hinge loop misclosed by {residual:.3e} mm at theta={theta_deg}")
    return ts, omegas


def body_fk(geom: UnitGeometry, theta_deg: float) -> BodyPose:
    """Placement of the four plates at signed fold angle theta_deg.

    Raises ThetaRangeError outside [-theta_max, +theta_max].
    """
    tmax = geom.theta_max_deg
    if not (-tmax - 1e-9 <= theta_deg <= tmax + 1e-9):
        raise ThetaRangeError(f"theta {theta_deg} outside [-{tmax}, {tmax}]")
    ts, omegas = _chain(geom, theta_deg)
    units = tuple(UnitPose(t, w % 360.0) for t, w in zip(ts, omegas))
    hinges = []
    x_n = geom.outline[geom.hinge_next]
    for i in range(4):
        hinges.append(_add(ts[i], _apply(_rot(omegas[i]), x_n)))
    cx = sum(p[0] for p in hinges) / 4.0
    cy = sum(p[1] for p in hinges) / 4.0
    return BodyPose(theta_deg, units, tuple(hinges), (cx, cy))


def unit_polygons(geom: UnitGeometry, theta_deg: float) -> list[list[Vec]]:
    """World-frame vertex loops of all four plates (body frame of plate 0)."""
    pose = body_fk(geom, theta_deg)
    return _polys_from(geom, [u.position for u in pose.units], [u.orientation_deg for u in pose.units])


def _polys_from(geom: UnitGeometry, ts: list[Vec], omegas: list[float]) -> list[list[Vec]]:
    polys = []
    for t, w in zip(ts, omegas):
        m = _rot(w)
        polys.append([_add(t, _apply(m, v)) for v in geom.outline])
    return polys


def hinge_gaps(geom: UnitGeometry, theta_deg: float) -> tuple[float, float, float, float]:
    """Distance between facing edge midpoints at each of the four hinges.

    Even hinges carry wedge (theta_max + theta)/2, odd ones (theta_max - theta)/2.
    """
    pose = body_fk(geom, theta_deg)
    e_n = geom._facing_edge_next()
    e_p = geom._facing_edge_prev()
    gaps = []
    for i in range(4):
        j = (i + 1) % 4
        m_i = _rot(pose.units[i].orientation_deg)
        m_j = _rot(pose.units[j].orientation_deg)
        mid_n = _add(pose.units[i].position, _apply(m_i, ((e_n[0][0] + e_n[1][0]) / 2.0, (e_n[0][1] + e_n[1][1]) / 2.0)))
        mid_p = _add(pose.units[j].position, _apply(m_j, ((e_p[0][0] + e_p[1][0]) / 2.0, (e_p[0][1] + e_p[1][1]) / 2.0)))
        gaps.append(math.hypot(*_sub(mid_n, mid_p)))
    return tuple(gaps)  # type: ignore[return-value]


def _clip_convex(subject: list[Vec], clip: list[Vec]) -> list[Vec]:
    """Sutherland-Hodgman intersection of two convex CCW polygons."""
    out = subject
    n = len(clip)
    for i in range(n):
        if not out:
            return []
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        inp = out
        out = []
        prev = inp[-1]
        prev_in = ex * (prev[1] - ay) - ey * (prev[0] - ax) >= 0.0
        for cur in inp:
            cur_in = ex * (cur[1] - ay) - ey * (cur[0] - ax) >= 0.0
            if cur_in != prev_in:
                dx, dy = cur[0] - prev[0], cur[1] - prev[1]
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = -(ex * (prev[1] - ay) - ey * (prev[0] - ax)) / denom
                    out.append((prev[0] + t * dx, prev[1] + t * dy))
            if cur_in:
                out.append(cur)
            prev, prev_in = cur, cur_in
    return out


def overlap_area(poly_a: list[Vec], poly_b: list[Vec]) -> float:
    """Intersection area of two convex polygons (either winding)."""
    a = list(poly_a) if _signed_area(poly_a) >= 0.0 else list(reversed(poly_a))
    b = list(poly_b) if _signed_area(poly_b) >= 0.0 else list(reversed(poly_b))
    inter = _clip_convex(a, b)
    if len(inter) < 3:
        return 0.0
    return abs(_signed_area(inter))


def self_contact(geom: UnitGeometry, theta_deg: float) -> bool:
    """Would plates interpenetrate if the ring were forced to |theta| = theta_deg?

    Accepts magnitudes past theta_max (that is the point of asking).
    """
    if not (0.0 <= theta_deg < 360.0):
        raise ValueError("theta_deg must be in [0, 360)")
    try:
        ts, omegas = _chain(geom, theta_deg)
    except ClosureError:
        return True
    polys = _polys_from(geom, ts, omegas)
    for i in range(4):
        for j in range(i + 1, 4):
            if overlap_area(polys[i], polys[j]) > CONTACT_AREA_TOL:
                return True
    return False


def mount_rays(geom: UnitGeometry, theta_deg: float) -> list[tuple[Vec, float]]:
    """Finger mount point and outward axis direction for each plate, body frame."""
    pose = body_fk(geom, theta_deg)
    rays = []
    for u in pose.units:
        m = _rot(u.orientation_deg)
        pt = _add(u.position, _apply(m, geom.mount_point))
        rays.append((pt, (u.orientation_deg + geom.mount_dir_deg) % 360.0))
    return rays


# --- lattices -------------------------------------------------------------

_RING_SLOT = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}


@dataclass(frozen=True)
class LatticeSpec:
    """A rows x cols sheet of hinged plates (counted in plates, not rings)."""

    geometry: UnitGeometry
    rows: int = 2
    cols: int = 2

    def __post_init__(self) -> None:
        if self.rows < 2 or self.cols < 2:
            raise ValueError("lattice needs at least 2x2 plates")
        if (self.rows, self.cols) != (2, 2) and len(self.geometry.outline) != 4:
            # two hinge corners per plate cannot give every plate four neighbours
            raise LatticeConnectivityError(
                "outlines with only two hinge corners tile as a single 2x2 ring; "
                "larger sheets need four-corner plates"
            )
        if self.rows % 2 or self.cols % 2:
            raise LatticeConnectivityError("plate counts must be even (whole rings)")


def _vertex_mean(poly: list[Vec]) -> Vec:
    return (sum(p[0] for p in poly) / len(poly), sum(p[1] for p in poly) / len(poly))


def _ring_axes(geom: UnitGeometry, theta_deg: float) -> tuple[list[list[Vec]], Vec, Vec]:
    """Ring plate polygons plus the plate-center step vectors along each axis."""
    ts, omegas = _checked_chain(geom, theta_deg)
    ring = _polys_from(geom, ts, omegas)
    cents = [_vertex_mean(p) for p in ring]
    return ring, _sub(cents[1], cents[0]), _sub(cents[3], cents[0])


def lattice_polygons(spec: LatticeSpec, theta_deg: float) -> list[list[Vec]]:
    """Vertex loops for every plate of the sheet at fold angle theta_deg."""
    ring, u_step, v_step = _ring_axes(spec.geometry, theta_deg)
    u_vec = _scale(u_step, 2.0)
    v_vec = _scale(v_step, 2.0)
    polys = []
    for r in range(spec.rows):
        for c in range(spec.cols):
            k = _RING_SLOT[(r % 2, c % 2)]
            off = _add(_scale(v_vec, float(r // 2)), _scale(u_vec, float(c // 2)))
            polys.append([_add(p, off) for p in ring[k]])
    return polys


def _checked_chain(geom: UnitGeometry, theta_deg: float) -> tuple[list[Vec], list[float]]:
    tmax = geom.theta_max_deg
    if not (-tmax - 1e-9 <= theta_deg <= tmax + 1e-9):
        raise ThetaRangeError(f"theta {theta_deg} outside [-{tmax}, {tmax}]")
    return _chain(geom, theta_deg)


def _scale(v: Vec, k: float) -> Vec:
    return (v[0] * k, v[1] * k)


def lattice_extents(spec: LatticeSpec, theta_deg: float) -> tuple[float, float]:
    """Sheet extents measured along its own two lattice axes.

    The axes follow the plate-center-to-neighbour directions, which rotate
    with theta; fixed-frame bounding boxes would mix the two strains.
    """
    _, (ux, uy), (vx, vy) = _ring_axes(spec.geometry, theta_deg)
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise ThetaRangeError("lattice axes degenerate at this theta")
    ux, uy = ux / nu, uy / nu
    vx, vy = vx / nv, vy / nv
    lo_u = hi_u = lo_v = hi_v = None
    for poly in lattice_polygons(spec, theta_deg):
        for x, y in poly:
            pu = x * ux + y * uy
            pv = x * vx + y * vy
            lo_u = pu if lo_u is None else min(lo_u, pu)
            hi_u = pu if hi_u is None else max(hi_u, pu)
            lo_v = pv if lo_v is None else min(lo_v, pv)
            hi_v = pv if hi_v is None else max(hi_v, pv)
    return (hi_u - lo_u, hi_v - lo_v)


def poisson_ratio(spec: LatticeSpec, theta_deg: float, dtheta_deg: float = 0.01) -> float:
    """Incremental transverse/axial strain ratio of the sheet at theta_deg.

    Central difference over +/- dtheta_deg; the loading axis is the first
    lattice axis. theta_deg must sit strictly inside (0, theta_max) with
    room for the stencil: extents are stationary at the neutral point
    and the flat states, where the ratio degenerates to 0/0.
    """
    if dtheta_deg <= 0.0:
        raise ValueError("dtheta_deg must be positive")
    tmax = spec.geometry.theta_max_deg
    if not (0.0 < theta_deg - dtheta_deg and theta_deg + dtheta_deg < tmax):
        raise ThetaRangeError(
            f"theta {theta_deg} with stencil {dtheta_deg} must sit inside (0, {tmax})"
        )
    u0, v0 = lattice_extents(spec, theta_deg)
    u_hi, v_hi = lattice_extents(spec, theta_deg + dtheta_deg)
    u_lo, v_lo = lattice_extents(spec, theta_deg - dtheta_deg)
    eps_u = (u_hi - u_lo) / u0
    eps_v = (v_hi - v_lo) / v0
    if eps_u == 0.0:
        raise ThetaRangeError("axial strain vanishes here; ratio undefined")
    return -eps_v / eps_u
