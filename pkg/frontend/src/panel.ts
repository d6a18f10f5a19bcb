// Operator panel entry point. Everything here is DOM plumbing; the state
// it draws comes straight from viewOf() on the newest snapshot.

import { PanelClient } from "./client";
import { isStale, PanelView, toastText, Trail, viewOf } from "./model";
import { build, CHAMBER_IDS, ChamberId, GAIT_PAIRS } from "./protocol";

const MM_PER_PX = 2.2;
const UNIT_HALF_PX = 26;
const MOUNT_RADIUS_PX = 54.3 / MM_PER_PX / 0.4; // exaggerated so the fold reads

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const modeEl = document.getElementById("mode-badge")!;
const lockEl = document.getElementById("lock-badge")!;
const thetaEl = document.getElementById("theta-value")!;
const poseEl = document.getElementById("pose-value")!;
const timeEl = document.getElementById("time-value")!;
const maneuverEl = document.getElementById("maneuver-value")!;
const chambersEl = document.getElementById("chambers")!;
const toastsEl = document.getElementById("toasts")!;

let client: PanelClient | null = null;
let view: PanelView | null = null;
let goal: [number, number] | null = null;
const trail = new Trail();

// --- session --------------------------------------------------------------

async function connect() {
  const base = (document.getElementById("server-url") as HTMLInputElement).value;
  statusEl.textContent = "connecting...";
  const doc = {
    version: 1,
    tick_s: 0.005,
    realtime: true,
    scene: [
      { object_id: "slab", shape: "box", size_mm: [300, 100],
        pose_mm_deg: [0, 260, 9], mass_kg: 1.0 },
    ],
    commands: [],
  };
  const resp = await fetch(`${base}/session`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(doc),
  });
  if (!resp.ok) {
    statusEl.textContent = `session refused: ${await resp.text()}`;
    return;
  }
  const { session_id } = await resp.json();
  const ws = new WebSocket(`${base.replace(/^http/, "ws")}/session/${session_id}`);
  client = new PanelClient(ws, {
    onSnapshot: (frame) => {
      view = viewOf(frame.state);
      trail.push(frame.state.x_mm, frame.state.y_mm, frame.state.mode);
      for (const ev of frame.events) {
        if (ev.name === "lock_engaged" || ev.name === "lock_released") {
          toast(`${ev.name} at t=${ev.t_s.toFixed(2)}s`, false);
        }
      }
      updateReadouts();
    },
    onAck: (ack) => toast(toastText(ack), !ack.accepted),
    onProtocolError: (reason) => toast(reason, true),
  });
  ws.onmessage = (ev) => client!.handleFrame(ev.data as string);
  ws.onopen = () => (statusEl.textContent = `session ${session_id}`);
  ws.onclose = () => (statusEl.textContent = "disconnected");
}

function toast(text: string, isError: boolean) {
  const el = document.createElement("div");
  el.className = isError ? "toast error" : "toast";
  el.textContent = text;
  toastsEl.prepend(el);
  while (toastsEl.children.length > 6) toastsEl.lastChild!.remove();
  setTimeout(() => el.remove(), 6000);
}

// --- readouts and chamber grid ---------------------------------------------

const chamberButtons = new Map<ChamberId, HTMLButtonElement>();
for (const id of CHAMBER_IDS) {
  const btn = document.createElement("button");
  btn.className = "chamber";
  btn.innerHTML = `<span class="fill"></span><span class="label">${id}</span>`;
  btn.onclick = () => {
    if (!client || !view) return;
    const row = view.chambers.find((r) => r.id === id)!;
    client.send(build.setChamber(id, row.target < 0.5));
  };
  chambersEl.appendChild(btn);
  chamberButtons.set(id, btn);
}

function updateReadouts() {
  if (!view) return;
  modeEl.textContent = view.mode;
  modeEl.className = `badge mode-${view.mode}${view.transitional ? " transitional" : ""}`;
  lockEl.textContent = view.locked ? "LOCKED" : "unlocked";
  lockEl.className = view.locked ? "badge locked" : "badge";
  thetaEl.textContent = `${view.thetaDeg.toFixed(1)} deg`;
  poseEl.textContent =
    `x ${view.pose.xMm.toFixed(1)}  y ${view.pose.yMm.toFixed(1)}  ` +
    `hdg ${view.pose.headingDeg.toFixed(1)}`;
  timeEl.textContent = `t ${view.tS.toFixed(2)}s  tick ${view.tick}`;
  maneuverEl.textContent = view.maneuver ?? "idle";
  for (const row of view.chambers) {
    const btn = chamberButtons.get(row.id)!;
    (btn.firstElementChild as HTMLElement).style.height = `${row.fraction * 100}%`;
    btn.classList.toggle("pulling", row.target > 0.5);
  }
}

// --- canvas ----------------------------------------------------------------

function worldToScreen(xMm: number, yMm: number, v: PanelView): [number, number] {
  return [
    canvas.width / 2 + (xMm - v.pose.xMm) / MM_PER_PX,
    canvas.height / 2 - (yMm - v.pose.yMm) / MM_PER_PX,
  ];
}

function drawBody(v: PanelView) {
  const [cx, cy] = worldToScreen(v.pose.xMm, v.pose.yMm, v);
  for (const u of v.units) {
    const b = (u.bearingDeg * Math.PI) / 180;
    const ux = cx + Math.cos(b) * u.radius * MOUNT_RADIUS_PX;
    const uy = cy - Math.sin(b) * u.radius * MOUNT_RADIUS_PX;
    ctx.save();
    ctx.translate(ux, uy);
    ctx.rotate((-u.orientationDeg * Math.PI) / 180);
    ctx.fillStyle = v.locked ? "#2b3f63" : "#24354f";
    ctx.strokeStyle = "#6ea8ff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.rect(-UNIT_HALF_PX, -UNIT_HALF_PX, UNIT_HALF_PX * 2, UNIT_HALF_PX * 2);
    ctx.fill();
    ctx.stroke();
    ctx.restore();
    // finger ray out of the mount edge
    const f = v.fingers[v.units.indexOf(u)];
    const d = (u.fingerDirDeg * Math.PI) / 180;
    const len = UNIT_HALF_PX + f.reachMm / MM_PER_PX / 2;
    ctx.strokeStyle = f.pad ? "#ffb454" : "#8fe388";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(ux + Math.cos(d) * UNIT_HALF_PX, uy - Math.sin(d) * UNIT_HALF_PX);
    ctx.lineTo(ux + Math.cos(d) * len, uy - Math.sin(d) * len);
    ctx.stroke();
  }
  // heading arrow
  const h = (v.pose.headingDeg * Math.PI) / 180;
  ctx.strokeStyle = "#e6e6e6";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + Math.cos(h) * 30, cy - Math.sin(h) * 30);
  ctx.stroke();
}

function drawFrame() {
  ctx.fillStyle = "#10151d";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!view) {
    requestAnimationFrame(drawFrame);
    return;
  }
  // floor grid every 100 mm, camera locked on the body
  ctx.strokeStyle = "#1c2533";
  ctx.lineWidth = 1;
  const step = 100 / MM_PER_PX;
  const ox = (-view.pose.xMm / MM_PER_PX + canvas.width / 2) % step;
  const oy = (view.pose.yMm / MM_PER_PX + canvas.height / 2) % step;
  for (let x = ox; x < canvas.width; x += step) {
    ctx.beginPath(); ctx.moveTo(x, 0); ctx.lineTo(x, canvas.height); ctx.stroke();
  }
  for (let y = oy; y < canvas.height; y += step) {
    ctx.beginPath(); ctx.moveTo(0, y); ctx.lineTo(canvas.width, y); ctx.stroke();
  }
  for (const seg of trail.segments) {
    ctx.strokeStyle = seg.mode === "cross_link" ? "#3f6e4f" : "#6e5a3f";
    ctx.lineWidth = 2;
    ctx.beginPath();
    seg.points.forEach(([x, y], i) => {
      const [sx, sy] = worldToScreen(x, y, view!);
      if (i === 0) ctx.moveTo(sx, sy); else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }
  if (goal) {
    const [gx, gy] = worldToScreen(goal[0], goal[1], view);
    ctx.strokeStyle = "#d46a6a";
    ctx.beginPath();
    ctx.arc(gx, gy, 8, 0, 2 * Math.PI);
    ctx.stroke();
  }
  drawBody(view);
  requestAnimationFrame(drawFrame);
}

canvas.onclick = (ev) => {
  if (!view) return;
  const r = canvas.getBoundingClientRect();
  goal = [
    view.pose.xMm + (ev.clientX - r.left - canvas.width / 2) * MM_PER_PX,
    view.pose.yMm - (ev.clientY - r.top - canvas.height / 2) * MM_PER_PX,
  ];
};

// --- command buttons --------------------------------------------------------

function wire(id: string, fn: () => void) {
  (document.getElementById(id) as HTMLButtonElement).onclick = () => {
    if (client) fn();
  };
}

const pairSelect = document.getElementById("pair-select") as HTMLSelectElement;
GAIT_PAIRS.forEach((pair, i) => {
  const opt = document.createElement("option");
  opt.value = String(i);
  opt.textContent = `feet ${pair[0]}+${pair[1]}`;
  pairSelect.appendChild(opt);
});

wire("fold-plus", () => client!.send(build.fold(1)));
wire("fold-minus", () => client!.send(build.fold(-1)));
wire("release", () => client!.send(build.release()));
wire("turn-left", () => client!.send(build.turn(1)));
wire("turn-right", () => client!.send(build.turn(-1)));
wire("gait-step", () =>
  client!.send(build.gaitStep(GAIT_PAIRS[Number(pairSelect.value)])));
wire("grasp", () => client!.send(build.grasp(
  (document.getElementById("grasp-object") as HTMLInputElement).value || "slab")));
wire("halt", () => client!.send(build.halt()));
(document.getElementById("connect") as HTMLButtonElement).onclick = connect;

setInterval(() => {
  if (client && client.lastFrameMs && isStale(client.lastFrameMs, Date.now())) {
    statusEl.textContent = "stale: no snapshots";
  }
}, 500);

drawFrame();
