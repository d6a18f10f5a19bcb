// Thin session socket: tags outgoing commands with a sequence number,
// matches acks back to what was sent, and keeps only the newest snapshot
// (latest wins; the server already coalesces for slow readers).

import { AckFrameT, CommandT, ServerFrame, SnapshotFrameT } from "./protocol";

export interface SocketLike {
  send(data: string): void;
  close(): void;
}

export interface ClientHandlers {
  onSnapshot?(frame: SnapshotFrameT): void;
  onAck?(ack: AckFrameT, sent: CommandT | undefined): void;
  onProtocolError?(reason: string): void;
}

export class PanelClient {
  snapshot: SnapshotFrameT | null = null;
  lastFrameMs = 0;

  private seq = 0;
  private pending = new Map<number, CommandT>();

  constructor(
    private readonly sock: SocketLike,
    private readonly handlers: ClientHandlers = {},
    private readonly now: () => number = () => Date.now(),
  ) {}

  send(cmd: CommandT): number {
    this.seq += 1;
    this.sock.send(JSON.stringify({ ...cmd, seq: this.seq }));
    this.pending.set(this.seq, cmd);
    return this.seq;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  handleFrame(text: string): void {
    let raw: unknown;
    try {
      raw = JSON.parse(text);
    } catch {
      this.handlers.onProtocolError?.("frame is not JSON");
      return;
    }
    const parsed = ServerFrame.safeParse(raw);
    if (!parsed.success) {
      this.handlers.onProtocolError?.(`unrecognized frame: ${parsed.error.issues[0]?.message}`);
      return;
    }
    const frame = parsed.data;
    this.lastFrameMs = this.now();
    if (frame.type === "snapshot") {
      this.snapshot = frame; // latest wins
      this.handlers.onSnapshot?.(frame);
    } else if (frame.type === "ack") {
      const sent = frame.seq === null ? undefined : this.pending.get(frame.seq);
      if (frame.seq !== null) this.pending.delete(frame.seq);
      this.handlers.onAck?.(frame, sent);
    } else {
      this.handlers.onProtocolError?.(frame.reason);
    }
  }

  close(): void {
    this.sock.close();
  }
}
