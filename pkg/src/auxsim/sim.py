"""Tick-driven simulator: chambers, fold latch, maneuvers, pose.

One Simulator owns all mutable state: twelve chamber contractions, the
signed fold angle with its latch, the planar pose (body center plus an
unbounded heading, degrees CCW), the scene, and an event log. Commands
either tweak chamber targets directly or start a maneuver; a maneuver
is a small state machine stepped around every kernel tick until done.

Everything is deterministic: no randomness, fixed tick, exact snaps at
detents so repeated runs and replays are bit-identical.
"""

from __future__ import annotations

import math
from array import array

from . import actuation, gait, grasp, kernel, locking
from .config import SimConfig
from .geometry import body_fk, mount_rays

CHAMBER_IDS = (
    "body.0", "body.1", "body.2", "body.3",
    "f0.c1", "f0.c2", "f1.c1", "f1.c2",
    "f2.c1", "f2.c2", "f3.c1", "f3.c2",
)
_CHAMBER_INDEX = {cid: i for i, cid in enumerate(CHAMBER_IDS)}

REJECT_LOCKED = "locked: run release first"
REJECT_NOT_LOCKED = "release: latch not engaged"
REJECT_TURN_UNSETTLED = "turn requires a settled cross stance"
REJECT_TURN_SLIP = "turn anchors cannot hold: frictionless feet"
REJECT_TRANSITIONAL = "grasp requires a settled mode"

_SNAP_EPS = 1e-3
_PLANT_LEVEL = 0.999

_FOLD_PAIR = {1: (1, 3), -1: (0, 2)}


def _rotv(deg: float, p: tuple[float, float]) -> tuple[float, float]:
    r = math.radians(deg)
    c, s = math.cos(r), math.sin(r)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


class Simulator:
    def __init__(self, config: SimConfig | None = None, scene: list[grasp.SceneObject] | None = None):
        self.config = config or SimConfig()
        self.config.validate()
        self.geom = self.config.geometry()
        self.scene = {obj.object_id: obj for obj in (scene or [])}
        dt = self.config.tick_s
        self.ch = array("d", [0.0] * 12)
        self.tg = array("d", [0.0] * 12)
        decay_body = math.exp(-dt / self.config.tau_body_chamber_s)
        decay_finger = math.exp(-dt / self.config.tau_finger_s)
        self.decay = array("d", [decay_body] * 4 + [decay_finger] * 8)
        self.fold_f = array("d", [0.0, self.geom.theta_max_deg, math.exp(-dt / self.config.tau_fold_s)])
        self.fold_i = array("i", [0, 1])
        self.x_mm = 0.0
        self.y_mm = 0.0
        self.heading_deg = 0.0
        self.tick_count = 0
        self.last_stable_mode = locking.MODE_CROSS
        self.events: list[dict] = []
        self.verdicts: list[dict] = []
        self.maneuver: _Maneuver | None = None

    # --- basic state views -------------------------------------------------

    @property
    def theta_deg(self) -> float:
        return self.fold_f[0]

    @property
    def locked(self) -> bool:
        return bool(self.fold_i[0])

    @property
    def t_s(self) -> float:
        return self.tick_count * self.config.tick_s

    @property
    def mode(self) -> str:
        return locking.mode_name(self.fold_f[0], self.locked, self.geom.theta_max_deg)

    @property
    def transitional(self) -> bool:
        return self.mode == locking.MODE_TRANSITIONAL

    def _update_stable_mode(self) -> None:
        m = self.mode
        if m != locking.MODE_TRANSITIONAL:
            self.last_stable_mode = m

    def finger_chambers(self, k: int) -> tuple[float, float]:
        c1 = min(1.0, max(0.0, self.ch[4 + 2 * k]))
        c2 = min(1.0, max(0.0, self.ch[5 + 2 * k]))
        return c1, c2

    def finger_joints(self, k: int) -> tuple[float, float]:
        return actuation.joint_targets(*self.finger_chambers(k))

    def body_to_world(self, p_body: tuple[float, float], center_body: tuple[float, float]) -> tuple[float, float]:
        dx, dy = _rotv(self.heading_deg, (p_body[0] - center_body[0], p_body[1] - center_body[1]))
        return (self.x_mm + dx, self.y_mm + dy)

    def _mount_state(self) -> tuple[list[tuple[tuple[float, float], float]], tuple[float, float]]:
        pose = body_fk(self.geom, self.fold_f[0])
        return mount_rays(self.geom, self.fold_f[0]), pose.center

    def mount_radius_mm(self) -> float:
        rays, center = self._mount_state()
        pt = rays[0][0]
        return math.hypot(pt[0] - center[0], pt[1] - center[1])

    # --- events ------------------------------------------------------------

    def _log(self, name: str, **data) -> None:
        self.events.append({"tick": self.tick_count, "t_s": self.t_s, "name": name, "data": data})

    def _log_kernel_events(self, ev: int) -> None:
        if ev & kernel.EV_LOCK_ENGAGED:
            self._log("lock_engaged", theta_deg=self.fold_f[0])
        if ev & kernel.EV_LOCK_RELEASED:
            self._log("lock_released", theta_deg=self.fold_f[0])
        if ev & kernel.EV_SETTLED_NEUTRAL:
            self._log("settled_neutral")

    # --- commands ----------------------------------------------------------

    def apply_command(self, op: str, args: dict | None = None) -> tuple[bool, str | None]:
        """Run or start a command. Returns (accepted, rejection_reason)."""
        args = args or {}
        accepted, reason = self._dispatch(op, args)
        if accepted:
            self._log("command_accepted", op=op, args=args)
        else:
            self._log("command_rejected", op=op, args=args, reason=reason)
        return accepted, reason

    def _dispatch(self, op: str, args: dict) -> tuple[bool, str | None]:
        if op == "set_chamber":
            cid = args.get("chamber")
            if cid not in _CHAMBER_INDEX:
                return False, f"unknown chamber {cid!r}"
            target = args.get("target")
            if not isinstance(target, (int, float)) or not (0.0 <= float(target) <= 1.0):
                return False, f"target {target!r} outside [0, 1]"
            self.tg[_CHAMBER_INDEX[cid]] = float(target)
            return True, None
        if op == "halt":
            for i in range(12):
                self.tg[i] = 0.0
            if self.maneuver is not None:
                self._log("maneuver_aborted", maneuver=self.maneuver.name)
                self.maneuver = None
            return True, None
        if op == "grasp":
            return self._grasp_now(args.get("object"))
        if op in ("fold", "release", "turn", "crawl"):
            if self.maneuver is not None:
                return False, f"busy: {self.maneuver.name} running"
            return self._start_maneuver(op, args)
        return False, f"unknown op {op!r}"

    def _start_maneuver(self, op: str, args: dict) -> tuple[bool, str | None]:
        if op == "fold":
            direction = args.get("direction")
            if direction not in (1, -1):
                return False, "fold direction must be 1 or -1"
            if self.locked:
                return False, REJECT_LOCKED
            self.maneuver = _FoldManeuver(direction)
        elif op == "release":
            if not self.locked:
                return False, REJECT_NOT_LOCKED
            self.maneuver = _ReleaseManeuver()
        elif op == "turn":
            direction = args.get("direction")
            if direction not in (1, -1):
                return False, "turn direction must be 1 or -1"
            if self.locked:
                # the latch would fight the first pump leg: hold and refuse
                self._log("lock_hold", theta_deg=self.fold_f[0])
                return False, REJECT_LOCKED
            if self.mode != locking.MODE_CROSS:
                return False, REJECT_TURN_UNSETTLED
            if min(self.config.mu_feet) <= 0.0:
                return False, REJECT_TURN_SLIP
            self.maneuver = _TurnManeuver(direction)
        else:  # crawl
            pair = tuple(args.get("pair", ()))
            steps = args.get("steps", 1)
            if pair not in gait.CROSS_PAIRS and pair[::-1] not in gait.CROSS_PAIRS:
                return False, f"crawl pair {pair!r} is not an adjacent leg pair"
            if not isinstance(steps, int) or steps < 1:
                return False, "crawl steps must be a positive integer"
            if pair not in gait.CROSS_PAIRS:
                pair = pair[::-1]
            self.maneuver = _CrawlManeuver(pair, steps, auto_release=self.locked)
        self.maneuver.start(self)
        self._log("maneuver_started", maneuver=self.maneuver.name)
        return True, None

    def _grasp_now(self, object_id) -> tuple[bool, str | None]:
        obj = self.scene.get(object_id)
        if obj is None:
            return False, f"unknown object {object_id!r}"
        theta = self.fold_f[0]
        mode = self.mode
        if mode == locking.MODE_TRANSITIONAL:
            return False, REJECT_TRANSITIONAL
        rays, center = self._mount_state()
        dirs = [r[1] for r in rays]
        if mode == locking.MODE_CROSS:
            pairs = None
        elif theta > 0.0:
            pairs = ((0, 1), (2, 3))
        else:
            pairs = ((1, 2), (3, 0))
        rel_c = _rotv(-self.heading_deg, (obj.pose_mm_deg[0] - self.x_mm, obj.pose_mm_deg[1] - self.y_mm))
        rel = grasp.SceneObject(
            obj.object_id, obj.shape, obj.size_mm,
            (rel_c[0], rel_c[1], obj.pose_mm_deg[2] - self.heading_deg),
            obj.mass_kg,
        )
        verdict = grasp.grasp_trial(dirs, rel, self.config.mu_grip, pairs, self.mount_radius_mm())
        record = {
            "tick": self.tick_count,
            "t_s": self.t_s,
            "object": obj.object_id,
            "mode": mode,
            "success": verdict.success,
            "reason": verdict.reason,
            "usable_contacts": verdict.usable_contacts,
            "squeeze_n": verdict.squeeze_n,
            "capacity_n": verdict.capacity_n,
            "weight_n": verdict.weight_n,
        }
        self.verdicts.append(record)
        self._log("grasp_verdict", **record)
        return True, None

    # --- time --------------------------------------------------------------

    def tick(self) -> int:
        theta_prev = self.fold_f[0]
        if self.maneuver is not None:
            self.maneuver.before(self)
        ev = kernel.tick(self.ch, self.tg, self.decay, self.fold_f, self.fold_i)
        self.tick_count += 1
        self._update_stable_mode()
        if ev:
            self._log_kernel_events(ev)
        if self.maneuver is not None:
            if self.maneuver.after(self, ev, theta_prev):
                self._log("maneuver_done", maneuver=self.maneuver.name)
                self.maneuver = None
        return ev

    def run_ticks(self, n: int) -> None:
        for _ in range(n):
            self.tick()

    def idle_fast(self, n: int) -> None:
        """Advance n ticks with no commands pending, batching through the kernel."""
        if self.maneuver is not None:
            self.run_ticks(n)
            return
        remaining = n
        while remaining > 0:
            done, ev = kernel.run_idle(self.ch, self.tg, self.decay, self.fold_f, self.fold_i, remaining)
            self.tick_count += done
            remaining -= done
            self._update_stable_mode()
            if ev:
                self._log_kernel_events(ev)

    def run_until(self, t_s: float) -> None:
        target = round(t_s / self.config.tick_s)
        while self.tick_count < target:
            self.tick()

    # --- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        fingers = []
        for k in range(4):
            c1, c2 = self.finger_chambers(k)
            phi1, phi2 = actuation.joint_targets(c1, c2)
            fingers.append({
                "c1": c1,
                "c2": c2,
                "phi1_deg": phi1,
                "phi2_deg": phi2,
                "reach_mm": actuation.reach_mm(phi1, phi2),
                "pad": actuation.pad_engaged(phi1, phi2),
            })
        return {
            "tick": self.tick_count,
            "t_s": self.t_s,
            "x_mm": self.x_mm,
            "y_mm": self.y_mm,
            "heading_deg": self.heading_deg,
            "theta_deg": self.fold_f[0],
            "locked": self.locked,
            "mode": self.last_stable_mode,
            "transitional": self.transitional,
            "chambers": {cid: self.ch[i] for i, cid in enumerate(CHAMBER_IDS)},
            "targets": {cid: self.tg[i] for i, cid in enumerate(CHAMBER_IDS)},
            "fingers": fingers,
            "maneuver": self.maneuver.name if self.maneuver else None,
        }

    # --- helpers shared by maneuvers ----------------------------------------

    def _set_body_pair(self, pair: tuple[int, int], target: float) -> None:
        for i in pair:
            self.tg[i] = target

    def _snap_chambers(self, indices, value: float) -> bool:
        if all(abs(self.ch[i] - value) <= _SNAP_EPS for i in indices):
            for i in indices:
                self.ch[i] = value
            return True
        return False

    def _anchor_midpoint_body(self, evens: bool) -> tuple[tuple[float, float], tuple[float, float]]:
        """(feet midpoint, body center) of an anchored diagonal, body frame."""
        rays, center = self._mount_state()
        a, b = (0, 2) if evens else (1, 3)
        pa, pb = rays[a][0], rays[b][0]
        return ((pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0), center


class _Maneuver:
    name = "?"

    def start(self, sim: Simulator) -> None:
        pass

    def before(self, sim: Simulator) -> None:
        pass

    def after(self, sim: Simulator, ev: int, theta_prev: float) -> bool:
        raise NotImplementedError


class _FoldManeuver(_Maneuver):
    def __init__(self, direction: int):
        self.name = f"fold{direction:+d}"
        self.direction = direction
        self.phase = "pump"

    def before(self, sim: Simulator) -> None:
        if self.phase == "pump":
            sim._set_body_pair(_FOLD_PAIR[self.direction], 1.0)

    def after(self, sim: Simulator, ev: int, theta_prev: float) -> bool:
        if self.phase == "pump" and ev & kernel.EV_LOCK_ENGAGED:
            self.phase = "vent"
            sim._set_body_pair((0, 1, 2, 3), 0.0)
        elif self.phase == "vent" and sim._snap_chambers(range(4), 0.0):
            return True
        return False


class _ReleaseManeuver(_Maneuver):
    def __init__(self):
        self.name = "release"
        self.phase = "pump"
        self.pair = (0, 2)

    def start(self, sim: Simulator) -> None:
        self.pair = locking.release_pair(sim.fold_f[0])

    def before(self, sim: Simulator) -> None:
        if self.phase == "pump":
            sim._set_body_pair(self.pair, 1.0)

    def after(self, sim: Simulator, ev: int, theta_prev: float) -> bool:
        if self.phase == "pump" and ev & kernel.EV_LOCK_RELEASED:
            self.phase = "vent"
            sim._set_body_pair((0, 1, 2, 3), 0.0)
        elif self.phase == "vent" and sim.fold_f[0] == 0.0 and sim._snap_chambers(range(4), 0.0):
            return True
        return False


class _TurnManeuver(_Maneuver):
    """Fold, unfold, fold again with alternating anchored diagonals.

    Each pump leg anchors the odd diagonal, so plate 0 rides the free
    diagonal and gains half the fold travel of heading; the unfold in
    between anchors the even diagonal instead, keeping what was gained.
    Two pump legs net direction * theta_max and the body ends magnet
    locked, holding the new heading with zero input.
    """

    def __init__(self, direction: int):
        self.name = f"turn{direction:+d}"
        self.direction = direction
        self.phase = "fold_a"
        self.odd_anchor = True
        self.unfold_venting = False
        self.pin = (0.0, 0.0)
        self.heading_phase_start = 0.0

    def start(self, sim: Simulator) -> None:
        self._enter_phase(sim, "fold_a")

    def _enter_phase(self, sim: Simulator, phase: str) -> None:
        self.phase = phase
        self.odd_anchor = phase != "unfold"
        mid_b, center_b = sim._anchor_midpoint_body(evens=not self.odd_anchor)
        self.pin = sim.body_to_world(mid_b, center_b)
        self.heading_phase_start = sim.heading_deg

    def before(self, sim: Simulator) -> None:
        if self.phase in ("fold_a", "fold_b"):
            sim._set_body_pair(_FOLD_PAIR[self.direction], 1.0)
        elif self.phase == "unfold" and not self.unfold_venting:
            sim._set_body_pair(locking.release_pair(float(self.direction)), 1.0)

    def _track_pose(self, sim: Simulator, theta_prev: float) -> None:
        dtheta = sim.fold_f[0] - theta_prev
        if dtheta != 0.0:
            sim.heading_deg += gait.turn_heading_step_deg(dtheta, not self.odd_anchor)
        mid_b, center_b = sim._anchor_midpoint_body(evens=not self.odd_anchor)
        off = _rotv(sim.heading_deg, (center_b[0] - mid_b[0], center_b[1] - mid_b[1]))
        sim.x_mm = self.pin[0] + off[0]
        sim.y_mm = self.pin[1] + off[1]

    def after(self, sim: Simulator, ev: int, theta_prev: float) -> bool:
        self._track_pose(sim, theta_prev)
        half = self.direction * sim.geom.theta_max_deg / 2.0
        if self.phase == "fold_a" and ev & kernel.EV_LOCK_ENGAGED:
            sim.heading_deg = self.heading_phase_start + half  # exact leg total
            sim._set_body_pair((0, 1, 2, 3), 0.0)
            self.unfold_venting = False
            self._enter_phase(sim, "unfold")
        elif self.phase == "unfold":
            if ev & kernel.EV_LOCK_RELEASED:
                self.unfold_venting = True
                sim._set_body_pair((0, 1, 2, 3), 0.0)
            # residual vacuum keeps draining on its own; refold as soon
            # as the fold settles back through exact zero
            if self.unfold_venting and sim.fold_f[0] == 0.0 and not sim.locked:
                self._enter_phase(sim, "fold_b")
        elif self.phase == "fold_b" and ev & kernel.EV_LOCK_ENGAGED:
            sim.heading_deg = self.heading_phase_start + half
            self.phase = "final_vent"
            sim._set_body_pair((0, 1, 2, 3), 0.0)
        elif self.phase == "final_vent" and sim._snap_chambers(range(4), 0.0):
            sim._log("turn_complete", heading_deg=sim.heading_deg, theta_deg=sim.fold_f[0])
            return True
        return False


class _CrawlManeuver(_Maneuver):
    def __init__(self, pair: tuple[int, int], steps: int, auto_release: bool):
        self.name = f"crawl{pair[0]}{pair[1]}"
        self.pair = pair
        self.steps = steps
        self.step_idx = 0
        self.phase = "auto_release" if auto_release else "curl"
        self.sub = _ReleaseManeuver() if auto_release else None
        self.feet: list[tuple[float, float]] = []
        self.dirs: list[float] = []
        self.holds: list[float] = []
        self.reach_prev = 0.0

    def start(self, sim: Simulator) -> None:
        if self.sub is not None:
            sim._log("auto_release", reason="crawl needs the open cross stance")
            self.sub.start(sim)

    def _finger_chamber_indices(self) -> tuple[int, ...]:
        a, b = self.pair
        return (4 + 2 * a, 5 + 2 * a, 4 + 2 * b, 5 + 2 * b)

    def before(self, sim: Simulator) -> None:
        if self.phase == "auto_release":
            self.sub.before(sim)
        elif self.phase == "curl":
            for i in self._finger_chamber_indices():
                sim.tg[i] = 1.0
        elif self.phase == "extend":
            for i in self._finger_chamber_indices():
                sim.tg[i] = 0.0

    def _plant(self, sim: Simulator) -> None:
        rays, center_b = sim._mount_state()
        load = sim.config.foot_load_n()
        self.feet = []
        self.dirs = []
        self.holds = []
        for k in self.pair:
            pt_b, dir_b = rays[k]
            mount_w = sim.body_to_world(pt_b, center_b)
            dir_w = dir_b + sim.heading_deg
            reach = actuation.reach_mm(*sim.finger_joints(k))
            r = math.radians(dir_w)
            self.feet.append((mount_w[0] + reach * math.cos(r), mount_w[1] + reach * math.sin(r)))
            self.dirs.append(dir_w)
            self.holds.append(gait.hold_fraction(sim.config.mu_feet[k], load, sim.config.foot_grip_n))
        self.reach_prev = actuation.reach_mm(*sim.finger_joints(self.pair[0]))
        sim._log("step_planted", step=self.step_idx, feet=self.feet, holds=self.holds)

    def _apply_stroke(self, sim: Simulator, ds: float) -> None:
        if ds == 0.0:
            return
        trans, twist = gait.step_motion(
            self.feet[0], self.feet[1], self.dirs[0], self.dirs[1], ds, self.holds[0], self.holds[1]
        )
        mx = (self.feet[0][0] + self.feet[1][0]) / 2.0
        my = (self.feet[0][1] + self.feet[1][1]) / 2.0
        if twist != 0.0:
            cx, cy = sim.x_mm - mx, sim.y_mm - my
            ct, st = math.cos(twist), math.sin(twist)
            sim.x_mm = mx + ct * cx - st * cy
            sim.y_mm = my + st * cx + ct * cy
            sim.heading_deg += math.degrees(twist)
        sim.x_mm += trans[0]
        sim.y_mm += trans[1]

    def after(self, sim: Simulator, ev: int, theta_prev: float) -> bool:
        if self.phase == "auto_release":
            if self.sub.after(sim, ev, theta_prev):
                self.sub = None
                self.phase = "curl"
            return False
        idx = self._finger_chamber_indices()
        if self.phase == "curl":
            if all(sim.ch[i] >= _PLANT_LEVEL for i in idx):
                for i in idx:
                    sim.ch[i] = 1.0
                self._plant(sim)
                self.phase = "extend"
            return False
        # extend: planted pads convert tip re-extension into travel
        snapped = sim._snap_chambers(idx, 0.0)
        reach_now = actuation.reach_mm(*sim.finger_joints(self.pair[0]))
        self._apply_stroke(sim, reach_now - self.reach_prev)
        self.reach_prev = reach_now
        if snapped:
            self.step_idx += 1
            sim._log("step_done", step=self.step_idx, x_mm=sim.x_mm, y_mm=sim.y_mm,
                     heading_deg=sim.heading_deg)
            if self.step_idx >= self.steps:
                return True
            self.phase = "curl"
        return False
