/**
 * Session view: the client-side mirror of every pane's render state.
 *
 * Strictly server-authoritative: a pane's state is the last snapshot with
 * all subsequent diff changes folded in, nothing more. The store also keeps
 * the raw per-display message log so tests can compare the UI's received
 * sequence against a sim display message for message.
 */

import { Envelope, RenderState } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ActuatorEvent {
  t: number;
  actuator: string;
  value: unknown;
  cue: string | null;
}

export class UiSessionView {
  readonly panes = new Map<string, RenderState>();
  readonly received = new Map<string, Envelope[]>();
  readonly actuatorLog: ActuatorEvent[] = [];
  readonly errors: { re: number | null; reason: string }[] = [];
  status: ConnectionStatus = "connecting";
  clockMode: "virtual" | "real" = "real";
  lastSeq = 0;

  pane(displayId: string): RenderState | undefined {
    return this.panes.get(displayId);
  }

  paneByRole(role: string): RenderState | undefined {
    for (const state of this.panes.values()) {
      if (state.role === role) return state;
    }
    return undefined;
  }

  /** Fold one hub message into the view. Unknown types are ignored. */
  apply(message: Envelope): void {
    if (typeof message.seq === "number") this.lastSeq = message.seq;
    switch (message.type) {
      case "snapshot": {
        const state = (message.payload as { state: RenderState }).state;
        this.panes.set(state.display_id, state);
        this.record(state.display_id, message);
        break;
      }
      case "diff": {
        const payload = message.payload as {
          display_id: string;
          changes: Partial<RenderState>;
        };
        const current = this.panes.get(payload.display_id);
        if (current === undefined) {
          throw new Error(`diff for ${payload.display_id} before any snapshot`);
        }
        this.panes.set(payload.display_id, { ...current, ...payload.changes });
        this.record(payload.display_id, message);
        break;
      }
      case "actuator":
        this.actuatorLog.push(message.payload as unknown as ActuatorEvent);
        break;
      case "error":
        this.errors.push(message.payload as { re: number | null; reason: string });
        break;
      default:
        break; // acks need no state
    }
  }

  private record(displayId: string, message: Envelope): void {
    const log = this.received.get(displayId);
    if (log === undefined) {
      this.received.set(displayId, [message]);
    } else {
      log.push(message);
    }
  }

  /** Raw snapshot/diff sequence for one display, for substitutability checks. */
  stream(displayId: string): Envelope[] {
    return this.received.get(displayId) ?? [];
  }
}
