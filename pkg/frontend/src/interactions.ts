/**
 * Interaction payload builders. Each builder produces exactly the payload a
 * sim display (or any device) would send for the same action, so the hub
 * cannot tell the UI apart from scripted clients.
 */

export interface Interaction {
  type: string;
  payload: Record<string, unknown>;
}

export function register(
  displayId: string,
  role: string,
  capabilities: string[] = [],
  user?: string,
): Interaction {
  const payload: Record<string, unknown> = {
    display_id: displayId,
    role,
    capabilities,
  };
  if (user !== undefined) payload.user = user;
  return { type: "register", payload };
}

export function transport(cmd: "play" | "pause", user: string): Interaction {
  return { type: "transport", payload: { cmd, user } };
}

export function seek(positionMs: number, user: string): Interaction {
  return { type: "transport", payload: { cmd: "seek", position_ms: positionMs, user } };
}

export function vote(
  pollId: string,
  user: string,
  option: string,
  privacy: "public" | "private",
): Interaction {
  return {
    type: "poll-op",
    payload: { op: "vote", poll_id: pollId, user, option, privacy },
  };
}

export function tokenRequest(user: string): Interaction {
  return { type: "token-op", payload: { op: "request", user } };
}

export function tokenPass(user: string, to: string): Interaction {
  return { type: "token-op", payload: { op: "pass", user, to } };
}

export function tokenRelease(user: string): Interaction {
  return { type: "token-op", payload: { op: "release", user } };
}

export function cast(
  user: string,
  content: { kind: string; payload: Record<string, unknown> },
  target: string,
): Interaction {
  return { type: "cast", payload: { user, content, target } };
}

/** The "activate wall" button: stands in for the designated hand gesture. */
export function activationGesture(displayId: string, activate = true): Interaction {
  return {
    type: "input-event",
    payload: {
      display_id: displayId,
      kind: "hand-gesture",
      action: activate ? "activate" : "deactivate",
    },
  };
}

export function touch(displayId: string): Interaction {
  return { type: "input-event", payload: { display_id: displayId, kind: "touch" } };
}

export function openPanel(
  displayId: string,
  w: number,
  h: number,
  seat: "left" | "right",
): Interaction {
  return {
    type: "input-event",
    payload: { display_id: displayId, kind: "touch", action: "open-panel", w, h, seat },
  };
}

export function movePanel(displayId: string, panelId: string, x: number, y: number): Interaction {
  return {
    type: "input-event",
    payload: { display_id: displayId, kind: "touch", action: "move-panel", panel_id: panelId, x, y },
  };
}

export function rotatePanel(displayId: string, panelId: string, turns = 1): Interaction {
  return {
    type: "input-event",
    payload: {
      display_id: displayId,
      kind: "touch",
      action: "rotate-panel",
      panel_id: panelId,
      turns,
    },
  };
}

export function obstacleToggle(
  rect: { x: number; y: number; w: number; h: number },
  present: boolean,
): Interaction {
  return { type: "object-detect", payload: { rect, present } };
}

export function wizardInject(kind: string, body: Record<string, unknown>): Interaction {
  return { type: "wizard-inject", payload: { kind, ...body } };
}

export function clockSync(nowMs: number): Interaction {
  return { type: "clock-sync", payload: { now_ms: nowMs } };
}
