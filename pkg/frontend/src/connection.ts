/**
 * Hub connection: one WebSocket, ordered delivery into the session view,
 * fire-and-forget interactions with a retry queue, reconnect with capped
 * exponential backoff.
 *
 * The socket is injected through a factory so tests can use the `ws`
 * package (or a fake) while the browser uses the native WebSocket.
 */

import { Envelope, encode } from "./protocol.js";
import { UiSessionView } from "./store.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  readyState: number;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export interface ConnectionOptions {
  socketFactory: SocketFactory;
  reconnect?: boolean;
  maxBackoffMs?: number;
  onMessage?: (message: Envelope) => void;
  /** Raw frame tap, before parsing; used by substitutability checks. */
  onFrame?: (frame: string) => void;
}

export class HubConnection {
  readonly view: UiSessionView;
  private socket: SocketLike | null = null;
  private seq = 0;
  private attempts = 0;
  private closed = false;
  /** Interactions that could not be sent yet; flushed on (re)connect. */
  readonly pending: Envelope[] = [];

  constructor(private url: string, private options: ConnectionOptions, view?: UiSessionView) {
    this.view = view ?? new UiSessionView();
    this.connect();
  }

  private connect(): void {
    this.view.status = "connecting";
    const socket = this.options.socketFactory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.view.status = "connected";
      const queued = this.pending.splice(0, this.pending.length);
      for (const message of queued) {
        socket.send(encode(message));
      }
    };
    socket.onmessage = (event) => {
      const frame = String(event.data);
      this.options.onFrame?.(frame);
      const message = JSON.parse(frame) as Envelope;
      this.view.apply(message);
      this.options.onMessage?.(message);
    };
    socket.onclose = () => {
      this.view.status = "disconnected";
      if (!this.closed && (this.options.reconnect ?? true)) {
        const backoff = Math.min(
          1000 * 2 ** this.attempts,
          this.options.maxBackoffMs ?? 30_000,
        );
        this.attempts += 1;
        setTimeout(() => this.connect(), backoff);
      }
    };
  }

  /**
   * Send one interaction. The UI applies no local state change here; panes
   * update only when the hub's diff comes back. Returns false when the
   * message had to be queued (retry indicator).
   */
  send(type: string, payload: Record<string, unknown>): boolean {
    this.seq += 1;
    const message: Envelope = { type, seq: this.seq, payload };
    if (this.socket !== null && this.socket.readyState === OPEN) {
      try {
        this.socket.send(encode(message));
        return true;
      } catch {
        // fall through to the queue
      }
    }
    this.pending.push(message);
    return false;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
