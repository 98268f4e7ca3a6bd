/**
 * UI substitutability: the browser client must be indistinguishable from a
 * sim display at the message level.
 *
 * Three checks against a real served hub (virtual clock):
 *  1. Twin runs: the UI client and a bare recorder registered as the same
 *     display, fed the identical scripted session on fresh hubs, receive
 *     byte-identical snapshot/diff streams.
 *  2. Parallel run: a UI personal pane and a sim personal pane for the same
 *     user, connected simultaneously, receive payload-identical streams
 *     (the display id and the hub's emission counter are the only
 *     legitimate differences between the two mirrors).
 *  3. Scripted session equality: activate wall -> vote privately -> request
 *     token -> cast, once via the UI's interaction builders and once via raw
 *     injection, leaves the hub in an identical state.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { HubConnection } from "../src/connection.js";
import * as actions from "../src/interactions.js";
import { HubProcess, RawClient, sleep, startHub } from "./hubharness.js";

const WALL_REGISTRATION = {
  display_id: "wall",
  role: "surround-wall",
  capabilities: ["video"],
};

//: last action is a wall-visible end marker: once a client sees it, every
//: earlier frame for that connection has been delivered (FIFO per socket).
const END_MARKER = "script-done";

const DRIVER_SCRIPT: { type: string; payload: Record<string, unknown> }[] = [
  {
    type: "wizard-inject",
    payload: {
      kind: "feed-event",
      event: { type: "register-match", match_id: "derby", home: "harbor-fc", away: "northside", t_ms: 0 },
    },
  },
  { type: "wizard-inject", payload: { kind: "feed-event", event: { type: "kick-off", match_id: "derby", t_ms: 0 } } },
  { type: "clock-sync", payload: { now_ms: 1000 } },
  {
    type: "wizard-inject",
    payload: {
      kind: "feed-event",
      event: { type: "goal", match_id: "derby", team: "harbor-fc", t_ms: 1000 },
    },
  },
  { type: "clock-sync", payload: { now_ms: 2000 } },
  {
    type: "wizard-inject",
    payload: {
      kind: "feed-event",
      event: {
        type: "var-review",
        match_id: "derby",
        t_ms: 2000,
        question: "Goal stands?",
        options: ["goal", "offside"],
      },
    },
  },
  { type: "token-op", payload: { op: "request", user: "driver" } },
  {
    type: "poll-op",
    payload: { op: "vote", poll_id: "var-derby-2000", user: "driver", option: "goal", privacy: "public" },
  },
  { type: "wizard-inject", payload: { kind: "environment", actuator: "ceiling-light", value: 0.2 } },
  { type: "clock-sync", payload: { now_ms: 3000 } },
  { type: "wizard-inject", payload: { kind: "environment", actuator: END_MARKER, value: 1 } },
];

async function driveScript(port: number): Promise<void> {
  const driver = new RawClient(port);
  await driver.ready();
  for (const message of DRIVER_SCRIPT) {
    driver.send(message.type, message.payload);
  }
  await driver.waitFor(
    () => driver.ofType("ack").length + driver.ofType("error").length >= DRIVER_SCRIPT.length,
  );
  const errors = driver.ofType("error");
  if (errors.length > 0) {
    throw new Error(`driver script rejected: ${JSON.stringify(errors)}`);
  }
  driver.close();
}

function streamOf(frames: string[]): string[] {
  return frames.filter((frame) => {
    const type = (JSON.parse(frame) as { type: string }).type;
    return type === "snapshot" || type === "diff";
  });
}

describe("UI substitutability", () => {
  let hub: HubProcess;

  beforeAll(async () => {
    hub = await startHub();
  }, 60_000);

  afterAll(async () => {
    await hub.stop();
  });

  it(
    "twin runs: UI client and sim recorder receive byte-identical wall streams",
    { timeout: 120_000 },
    async () => {
      // run A: the browser UI's connection + store, recording raw frames
      const hubA = await startHub();
      const uiFrames: string[] = [];
      const ui = new HubConnection(`ws://127.0.0.1:${hubA.port}/ws`, {
        socketFactory: (url) => new WebSocket(url) as never,
        reconnect: false,
        onFrame: (frame) => uiFrames.push(frame),
      });
      await waitFor(() => ui.view.status === "connected");
      ui.send("register", actions.register("wall", "surround-wall", ["video"]).payload);
      await waitFor(() => ui.view.pane("wall") !== undefined);
      await driveScript(hubA.port);
      await waitFor(() => uiFrames.some((frame) => frame.includes(END_MARKER)));
      const uiStream = streamOf(uiFrames);
      ui.close();
      await hubA.stop();

      // run B: a bare recorder (no UI code), identical registration + script
      const hubB = await startHub();
      const sim = new RawClient(hubB.port);
      await sim.ready();
      sim.send("register", WALL_REGISTRATION);
      await sim.waitFor(() => sim.ofType("snapshot").length === 1);
      await driveScript(hubB.port);
      await sim.waitFor(() => sim.frames.some((frame) => frame.includes(END_MARKER)));
      const simStream = sim.streamFrames();
      sim.close();
      await hubB.stop();

      expect(uiStream.length).toBeGreaterThan(2);
      expect(uiStream).toEqual(simStream); // message-level diff: empty
    },
  );

  it(
    "parallel run: UI pane and sim pane for the same user see payload-identical streams",
    { timeout: 120_000 },
    async () => {
      const simPhone = new RawClient(hub.port);
      await simPhone.ready();
      simPhone.send("register", {
        display_id: "a-sim-phone",
        role: "personal",
        capabilities: ["touch"],
        user: "parallel",
      });
      await simPhone.waitFor(() => simPhone.ofType("snapshot").length === 1);

      const uiFrames: string[] = [];
      const ui = new HubConnection(`ws://127.0.0.1:${hub.port}/ws`, {
        socketFactory: (url) => new WebSocket(url) as never,
        reconnect: false,
        onFrame: (frame) => uiFrames.push(frame),
      });
      await waitFor(() => ui.view.status === "connected");
      ui.send(
        "register",
        actions.register("b-ui-phone", "personal", ["touch"], "parallel").payload,
      );
      await waitFor(() => ui.view.pane("b-ui-phone") !== undefined);

      await driveScript(hub.port);
      await waitFor(() => uiFrames.some((frame) => frame.includes(END_MARKER)));
      await simPhone.waitFor(() => simPhone.frames.some((frame) => frame.includes(END_MARKER)));

      const normalize = (frame: string, displayId: string): string | null => {
        const message = JSON.parse(frame) as {
          type: string;
          payload: Record<string, unknown>;
        };
        if (message.type !== "snapshot" && message.type !== "diff") return null;
        const text = JSON.stringify(message.payload).replaceAll(displayId, "PHONE");
        return `${message.type} ${text}`;
      };
      const uiStream = uiFrames
        .map((frame) => normalize(frame, "b-ui-phone"))
        .filter((entry): entry is string => entry !== null);
      const simStream = simPhone.frames
        .map((frame) => normalize(frame, "a-sim-phone"))
        .filter((entry): entry is string => entry !== null);

      expect(uiStream.length).toBeGreaterThan(1);
      expect(uiStream).toEqual(simStream);
      ui.close();
      simPhone.close();
    },
  );

  it(
    "scripted UI session equals the same script via sim-display injection",
    { timeout: 120_000 },
    async () => {
      const finalStates: string[] = [];
      for (const mode of ["ui", "sim"] as const) {
        const twin = await startHub();
        const acked = { count: 0 };
        let sendInteraction: (type: string, payload: Record<string, unknown>) => void;
        let uiConn: HubConnection | null = null;
        let rawConn: RawClient | null = null;

        if (mode === "ui") {
          uiConn = new HubConnection(`ws://127.0.0.1:${twin.port}/ws`, {
            socketFactory: (url) => new WebSocket(url) as never,
            reconnect: false,
            onMessage: (message) => {
              if (message.type === "ack") acked.count += 1;
            },
          });
          await waitFor(() => uiConn!.view.status === "connected");
          sendInteraction = (type, payload) => uiConn!.send(type, payload);
        } else {
          rawConn = new RawClient(twin.port);
          await rawConn.ready();
          sendInteraction = (type, payload) => rawConn!.send(type, payload);
        }

        // identical session: register room, activate wall, vote privately,
        // request token, cast
        const session: actions.Interaction[] = [
          actions.register("wall", "surround-wall", []),
          actions.register("phone", "personal", [], "tester"),
          actions.activationGesture("wall", true),
          {
            type: "poll-op",
            payload: { op: "open", poll_id: "mvp", question: "MVP?", options: ["h09", "a10"] },
          },
          actions.vote("mvp", "tester", "h09", "private"),
          actions.tokenRequest("tester"),
          actions.cast("tester", { kind: "news", payload: { headline: "breaking" } }, "surround-wall"),
          actions.clockSync(1000),
        ];
        for (const interaction of session) {
          sendInteraction(interaction.type, interaction.payload);
        }
        // every session message is acked back to this connection
        if (mode === "ui") {
          await waitFor(() => acked.count >= session.length);
        } else {
          await rawConn!.waitFor(() => rawConn!.ofType("ack").length >= session.length);
          expect(rawConn!.ofType("error")).toEqual([]);
        }

        // the authoritative end state, read back as a fresh full snapshot via
        // identical re-registration (reconnect recovery)
        const probe = new RawClient(twin.port);
        await probe.ready();
        probe.send("register", { display_id: "wall", role: "surround-wall", capabilities: [] });
        await probe.waitFor(() => probe.ofType("snapshot").length === 1);
        const snapshot = probe.ofType("snapshot")[0] as { payload: { state: unknown } };
        finalStates.push(JSON.stringify(snapshot.payload.state));

        probe.close();
        uiConn?.close();
        rawConn?.close();
        await twin.stop();
      }
      expect(finalStates[0]).toEqual(finalStates[1]);
      // sanity: the session really happened, and the private vote is counted
      // without ever naming the voter in the public list
      expect(finalStates[0]).toContain('"holder":"tester"');
      expect(finalStates[0]).toContain("breaking");
      expect(finalStates[0]).toContain('"total":1');
      expect(finalStates[0]).toContain('"public_votes":[]');
    },
  );
});

async function waitFor(predicate: () => boolean, timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await sleep(25);
  }
}
