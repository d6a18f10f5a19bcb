// Pure view-model: everything the panel draws derives from one snapshot
// through these functions, so the render path stays trivially testable.

import {
  AckFrameT,
  CHAMBER_IDS,
  ChamberId,
  SimStateT,
} from "./protocol";

export interface ChamberRow {
  id: ChamberId;
  fraction: number; // contraction 0..1, drawn as the fill level
  target: number;
}

export interface UnitGlyph {
  bearingDeg: number; // where the unit sits around the body center
  radius: number; // 0..1 of the cross-stance mount circle
  orientationDeg: number;
  fingerDirDeg: number; // world direction the mounted finger points
}

export interface FingerGauge {
  curl1: number;
  curl2: number;
  reachMm: number;
  pad: boolean;
}

export interface PanelView {
  tick: number;
  tS: number;
  mode: SimStateT["mode"];
  locked: boolean;
  transitional: boolean;
  thetaDeg: number;
  maneuver: string | null;
  pose: { xMm: number; yMm: number; headingDeg: number };
  chambers: ChamberRow[];
  units: UnitGlyph[];
  fingers: FingerGauge[];
}

// odd units counter-rotate by theta/2 while evens hold; finger mounts sit
// 270 deg around each unit (neutral cross dirs 270/0/90/180)
function unitOrientationDeg(i: number, thetaDeg: number): number {
  return i * 90 + (i % 2 === 1 ? -thetaDeg / 2 : 0);
}

// schematic ring contraction: full circle at neutral, tightened when folded
function ringRadius(thetaDeg: number): number {
  return 0.5 + 0.5 * Math.cos((thetaDeg * Math.PI) / 360);
}

export function viewOf(state: SimStateT): PanelView {
  const units: UnitGlyph[] = [];
  for (let i = 0; i < 4; i++) {
    const orient = state.heading_deg + unitOrientationDeg(i, state.theta_deg);
    units.push({
      bearingDeg: state.heading_deg + 45 + i * 90,
      radius: ringRadius(state.theta_deg),
      orientationDeg: orient,
      fingerDirDeg: (orient + 270) % 360,
    });
  }
  return {
    tick: state.tick,
    tS: state.t_s,
    mode: state.mode,
    locked: state.locked,
    transitional: state.transitional,
    thetaDeg: state.theta_deg,
    maneuver: state.maneuver,
    pose: { xMm: state.x_mm, yMm: state.y_mm, headingDeg: state.heading_deg },
    chambers: CHAMBER_IDS.map((id) => ({
      id,
      fraction: state.chambers[id],
      target: state.targets[id],
    })),
    units,
    fingers: state.fingers.map((f) => ({
      curl1: f.c1,
      curl2: f.c2,
      reachMm: f.reach_mm,
      pad: f.pad,
    })),
  };
}

// Rejections surface the server's reason string verbatim; no rewording.
export function toastText(ack: AckFrameT): string {
  if (ack.accepted) {
    return `${ack.op} accepted (tick ${ack.apply_tick})`;
  }
  return `${ack.op} rejected: ${ack.reason}`;
}

export const STALE_AFTER_MS = 1500;

export function isStale(lastFrameMs: number, nowMs: number): boolean {
  return nowMs - lastFrameMs > STALE_AFTER_MS;
}

export interface TrailSegment {
  mode: SimStateT["mode"];
  points: [number, number][];
}

// Drawn path of the body center. Segments never span a mode switch, so the
// polyline cannot interpolate across one.
export class Trail {
  segments: TrailSegment[] = [];
  private total = 0;

  constructor(private readonly cap = 4000) {}

  push(xMm: number, yMm: number, mode: SimStateT["mode"]): void {
    const last = this.segments[this.segments.length - 1];
    if (!last || last.mode !== mode) {
      this.segments.push({ mode, points: [[xMm, yMm]] });
    } else {
      const tail = last.points[last.points.length - 1];
      if (tail[0] === xMm && tail[1] === yMm) return;
      last.points.push([xMm, yMm]);
    }
    this.total += 1;
    while (this.total > this.cap && this.segments.length) {
      const head = this.segments[0];
      head.points.shift();
      this.total -= 1;
      if (head.points.length === 0) this.segments.shift();
    }
  }

  clear(): void {
    this.segments = [];
    this.total = 0;
  }
}
