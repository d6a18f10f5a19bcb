// Wire protocol for the auxsim control service. The server is the single
// source of truth; these schemas mirror what it sends and the builders
// below are the only messages the panel ever puts on the socket.

import { z } from "zod";

export const CHAMBER_IDS = [
  "body.0", "body.1", "body.2", "body.3",
  "f0.c1", "f0.c2", "f1.c1", "f1.c2",
  "f2.c1", "f2.c2", "f3.c1", "f3.c2",
] as const;

export type ChamberId = (typeof CHAMBER_IDS)[number];

export const GAIT_PAIRS: [number, number][] = [[0, 1], [1, 2], [2, 3], [3, 0]];

const chamberTable = z.object(
  Object.fromEntries(CHAMBER_IDS.map((id) => [id, z.number()])) as Record<
    ChamberId,
    z.ZodNumber
  >,
);

export const FingerState = z.object({
  c1: z.number(),
  c2: z.number(),
  phi1_deg: z.number(),
  phi2_deg: z.number(),
  reach_mm: z.number(),
  pad: z.boolean(),
});

export const SimState = z.object({
  tick: z.number().int(),
  t_s: z.number(),
  x_mm: z.number(),
  y_mm: z.number(),
  heading_deg: z.number(),
  theta_deg: z.number(),
  locked: z.boolean(),
  mode: z.enum(["cross_link", "parallel_plus", "parallel_minus", "transitional"]),
  transitional: z.boolean(),
  chambers: chamberTable,
  targets: chamberTable,
  fingers: z.array(FingerState).length(4),
  maneuver: z.string().nullable(),
});

export const SimEvent = z.object({
  tick: z.number().int(),
  t_s: z.number(),
  name: z.string(),
  data: z.record(z.unknown()),
});

export const SnapshotFrame = z.object({
  type: z.literal("snapshot"),
  state: SimState,
  events: z.array(SimEvent),
});

export const AckFrame = z.object({
  type: z.literal("ack"),
  seq: z.number().int().nullable(),
  op: z.string().nullable(),
  accepted: z.boolean(),
  reason: z.string().nullable(),
  apply_tick: z.number().int(),
});

export const ErrorFrame = z.object({
  type: z.literal("error"),
  reason: z.string(),
});

export const ServerFrame = z.discriminatedUnion("type", [
  SnapshotFrame,
  AckFrame,
  ErrorFrame,
]);

export type SimStateT = z.infer<typeof SimState>;
export type SimEventT = z.infer<typeof SimEvent>;
export type SnapshotFrameT = z.infer<typeof SnapshotFrame>;
export type AckFrameT = z.infer<typeof AckFrame>;
export type ServerFrameT = z.infer<typeof ServerFrame>;

// Outbound. Keep this schema in lockstep with the server's command parser;
// the round-trip suite proves every builder output satisfies it, and the
// committed catalogue is replayed against the real parser server-side.

export const Command = z.discriminatedUnion("type", [
  z.object({
    type: z.literal("set_chamber"),
    id: z.enum(CHAMBER_IDS),
    state: z.enum(["vacuum", "ambient"]),
  }),
  z.object({ type: z.literal("fold"), dir: z.union([z.literal(1), z.literal(-1)]) }),
  z.object({ type: z.literal("release") }),
  z.object({ type: z.literal("turn"), dir: z.union([z.literal(1), z.literal(-1)]) }),
  z.object({
    type: z.literal("start_gait"),
    pair: z.tuple([z.number().int(), z.number().int()]),
    steps: z.number().int().positive(),
  }),
  z.object({ type: z.literal("grasp"), object: z.string().min(1) }),
  z.object({ type: z.literal("halt") }),
  z.object({ type: z.literal("advance"), ticks: z.number().int().positive() }),
  z.object({ type: z.literal("reset") }),
  z.object({ type: z.literal("load_config"), config: z.record(z.unknown()) }),
]);

export type CommandT = z.infer<typeof Command>;

export const build = {
  setChamber: (id: ChamberId, on: boolean): CommandT => ({
    type: "set_chamber",
    id,
    state: on ? "vacuum" : "ambient",
  }),
  fold: (dir: 1 | -1): CommandT => ({ type: "fold", dir }),
  release: (): CommandT => ({ type: "release" }),
  turn: (dir: 1 | -1): CommandT => ({ type: "turn", dir }),
  gaitStep: (pair: [number, number], steps = 1): CommandT => ({
    type: "start_gait",
    pair,
    steps,
  }),
  grasp: (object: string): CommandT => ({ type: "grasp", object }),
  halt: (): CommandT => ({ type: "halt" }),
  advance: (ticks: number): CommandT => ({ type: "advance", ticks }),
  reset: (): CommandT => ({ type: "reset" }),
  loadConfig: (config: Record<string, unknown>): CommandT => ({
    type: "load_config",
    config,
  }),
};
