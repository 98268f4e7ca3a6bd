import { describe, expect, it } from "vitest";

import * as actions from "../src/interactions.js";
import { HubConnection, SocketLike } from "../src/connection.js";

describe("interaction builders produce device-identical schemas", () => {
  it("vote with privacy", () => {
    expect(actions.vote("var-1", "alice", "goal", "private")).toEqual({
      type: "poll-op",
      payload: { op: "vote", poll_id: "var-1", user: "alice", option: "goal", privacy: "private" },
    });
  });

  it("activation gesture mirrors the designated-hand-gesture message", () => {
    expect(actions.activationGesture("wall")).toEqual({
      type: "input-event",
      payload: { display_id: "wall", kind: "hand-gesture", action: "activate" },
    });
    expect(actions.activationGesture("wall", false).payload.action).toBe("deactivate");
  });

  it("token, cast, transport, obstacle, panel ops", () => {
    expect(actions.tokenRequest("u").payload).toEqual({ op: "request", user: "u" });
    expect(actions.tokenPass("u", "v").payload).toEqual({ op: "pass", user: "u", to: "v" });
    expect(actions.seek(1500, "u").payload).toEqual({ cmd: "seek", position_ms: 1500, user: "u" });
    expect(actions.cast("u", { kind: "news", payload: {} }, "surround-wall").payload.target).toBe(
      "surround-wall",
    );
    expect(actions.obstacleToggle({ x: 0, y: 0, w: 10, h: 10 }, false).payload.present).toBe(false);
    expect(actions.movePanel("table", "panel-001", 10, 20).payload).toEqual({
      display_id: "table",
      kind: "touch",
      action: "move-panel",
      panel_id: "panel-001",
      x: 10,
      y: 20,
    });
    expect(actions.wizardInject("feed-event", { event: { type: "goal" } }).payload).toEqual({
      kind: "feed-event",
      event: { type: "goal" },
    });
  });
});

class FakeSocket implements SocketLike {
  static instances: FakeSocket[] = [];
  sent: string[] = [];
  readyState = 0;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;

  constructor() {
    FakeSocket.instances.push(this);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }

  open(): void {
    this.readyState = 1;
    this.onopen?.();
  }
}

describe("HubConnection", () => {
  it("queues sends while connecting and flushes on open (retry indicator)", () => {
    FakeSocket.instances = [];
    const connection = new HubConnection("ws://x", {
      socketFactory: () => new FakeSocket(),
      reconnect: false,
    });
    const socket = FakeSocket.instances[0];
    const delivered = connection.send("token-op", { op: "request", user: "u" });
    expect(delivered).toBe(false);
    expect(connection.pending).toHaveLength(1);

    socket.open();
    expect(connection.pending).toHaveLength(0);
    expect(socket.sent).toHaveLength(1);
    expect(JSON.parse(socket.sent[0])).toEqual({
      type: "token-op",
      seq: 1,
      payload: { op: "request", user: "u" },
    });
  });

  it("applies no local state change on send; panes move only on hub diffs", () => {
    FakeSocket.instances = [];
    const connection = new HubConnection("ws://x", {
      socketFactory: () => new FakeSocket(),
      reconnect: false,
    });
    const socket = FakeSocket.instances[0];
    socket.open();
    socket.onmessage?.({
      data: JSON.stringify({
        type: "snapshot",
        seq: 1,
        payload: {
          state: {
            display_id: "wall",
            role: "surround-wall",
            mode: "hibernated",
            brightness: 0,
            content: [],
            token: { holder: null, queue: [] },
            environment: {},
            polls: [],
            cast: null,
            wizard: null,
            media: null,
            sports: null,
            plot: null,
            panels: null,
          },
        },
      }),
    });
    connection.send("input-event", { display_id: "wall", kind: "hand-gesture", action: "activate" });
    expect(connection.view.pane("wall")?.mode).toBe("hibernated"); // unchanged until the diff
    socket.onmessage?.({
      data: JSON.stringify({
        type: "diff",
        seq: 2,
        payload: { display_id: "wall", changes: { mode: "glance", brightness: 0.6 } },
      }),
    });
    expect(connection.view.pane("wall")?.mode).toBe("glance");
  });

  it("marks the view disconnected on close", () => {
    FakeSocket.instances = [];
    const connection = new HubConnection("ws://x", {
      socketFactory: () => new FakeSocket(),
      reconnect: false,
    });
    const socket = FakeSocket.instances[0];
    socket.open();
    expect(connection.view.status).toBe("connected");
    socket.close();
    expect(connection.view.status).toBe("disconnected");
  });
});
