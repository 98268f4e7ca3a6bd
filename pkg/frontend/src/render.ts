/**
 * Pane renderers: pure functions from render state to HTML strings.
 *
 * Panes draw only what the latest snapshot+diffs contain. Brightness maps to
 * dimming on a dark scheme (a hibernated pane is fully dark); a disconnected
 * session renders a reconnect overlay on every pane.
 */

import {
  AvatarWire,
  CueWire,
  MatchPaneWire,
  PollWire,
  RenderState,
} from "./protocol.js";
import { ConnectionStatus } from "./store.js";

const FACTION_PALETTE = [
  "#e4572e",
  "#4f9d69",
  "#4062bb",
  "#ffc145",
  "#9b5de5",
  "#00b4d8",
  "#f15bb5",
  "#8ac926",
];

export function escapeHtml(value: unknown): string {
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function factionColor(index: number): string {
  return FACTION_PALETTE[index % FACTION_PALETTE.length];
}

function formatClock(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}

function cueCard(cue: CueWire): string {
  const body = Object.entries(cue.payload)
    .filter(([key]) => !["options", "question", "poll_id"].includes(key))
    .slice(0, 4)
    .map(([key, value]) => `<span class="kv">${escapeHtml(key)}: ${escapeHtml(value)}</span>`)
    .join(" ");
  return (
    `<article class="cue cue-${escapeHtml(cue.kind)} attn-${cue.attention}" data-cue="${escapeHtml(cue.id)}">` +
    `<header>${escapeHtml(cue.kind)}</header>${body}</article>`
  );
}

function pollCard(poll: PollWire, front: boolean): string {
  const options = poll.options
    .map((option) => {
      const count = poll.counts[option] ?? 0;
      const share = poll.total > 0 ? Math.round((100 * count) / poll.total) : 0;
      return (
        `<li data-option="${escapeHtml(option)}">` +
        `<span class="opt">${escapeHtml(option)}</span>` +
        `<span class="bar" style="width:${share}%"></span>` +
        `<span class="count">${count} (${share}%)</span></li>`
      );
    })
    .join("");
  const voters = poll.public_votes
    .map((v) => `<span class="voter">${escapeHtml(v.user)}: ${escapeHtml(v.option)}</span>`)
    .join(" ");
  return (
    `<section class="poll ${front ? "poll-front" : ""} poll-${poll.state}" data-poll="${escapeHtml(poll.poll_id)}">` +
    `<h3>${escapeHtml(poll.question)}</h3><ul>${options}</ul>` +
    `<footer class="voters">${voters}</footer></section>`
  );
}

function matchPane(match: MatchPaneWire): string {
  return (
    `<div class="match" data-match="${escapeHtml(match.match_id)}">` +
    `<span class="teams">${escapeHtml(match.home)} ${match.score[0]}–${match.score[1]} ${escapeHtml(match.away)}</span>` +
    `<span class="phase">${escapeHtml(match.phase)} ${formatClock(match.clock_ms)}</span></div>`
  );
}

function avatarDot(avatar: AvatarWire): string {
  const badges: string[] = [];
  if (avatar.badges.goals > 0) badges.push(`<b class="goals">${avatar.badges.goals}</b>`);
  if (avatar.badges.yellow > 0) badges.push(`<b class="yellow">${avatar.badges.yellow}</b>`);
  if (avatar.badges.red > 0) badges.push(`<b class="red">${avatar.badges.red}</b>`);
  return (
    `<div class="avatar side-${avatar.team_color_side}" data-player="${escapeHtml(avatar.player_id)}" ` +
    `style="left:${(avatar.x * 100).toFixed(2)}%;top:${(avatar.y * 100).toFixed(2)}%">` +
    `<i class="fatigue" style="--fatigue:${avatar.fatigue.toFixed(3)}"></i>` +
    `<label>${escapeHtml(avatar.name)}</label>${badges.join("")}</div>`
  );
}

function overlay(state: RenderState): string {
  let html = "";
  if (state.cast !== null) {
    html +=
      `<aside class="overlay cast-overlay"><header>cast by ${escapeHtml(state.cast.user)}</header>` +
      cueFromContent(state.cast.kind, state.cast.payload) +
      `</aside>`;
  }
  if (state.wizard !== null) {
    html += `<aside class="overlay wizard-overlay">${cueFromContent(state.wizard.kind, state.wizard.payload)}</aside>`;
  }
  return html;
}

function cueFromContent(kind: string, payload: Record<string, unknown>): string {
  const body = Object.entries(payload)
    .slice(0, 4)
    .map(([key, value]) => `<span class="kv">${escapeHtml(key)}: ${escapeHtml(value)}</span>`)
    .join(" ");
  return `<article class="cue cue-${escapeHtml(kind)}"><header>${escapeHtml(kind)}</header>${body}</article>`;
}

function tvPane(state: RenderState): string {
  const matches = state.sports?.matches ?? [];
  const grid = matches.length > 0 ? `<div class="tv-grid grid-${matches.length}">${matches.map(matchPane).join("")}</div>` : "";
  let media = "";
  if (state.media !== null) {
    const m = state.media;
    const progress = m.duration_ms > 0 ? (100 * m.position_ms) / m.duration_ms : 0;
    media =
      `<div class="media media-${m.state}"><span class="title">${escapeHtml(m.media_id)}</span>` +
      `<progress max="100" value="${progress.toFixed(3)}"></progress>` +
      `<span class="clock">${formatClock(m.position_ms)} / ${formatClock(m.duration_ms)} (${m.state})</span></div>`;
  }
  return media + grid + overlay(state);
}

function wallPane(state: RenderState): string {
  const focusPolls = state.mode === "focus" ? state.polls.filter((p) => p.state === "open") : [];
  const polls = state.polls.map((poll) => pollCard(poll, focusPolls.includes(poll))).join("");
  const cues = state.content.map(cueCard).join("");
  return `<div class="videoboard">${polls}${cues}</div>` + overlay(state);
}

function tablePane(state: RenderState): string {
  let html = "";
  const matches = state.sports?.matches ?? [];
  for (const match of matches) {
    const avatars = (match.avatars ?? []).map(avatarDot).join("");
    html += `<div class="field" data-match="${escapeHtml(match.match_id)}">${avatars}</div>`;
  }
  if (state.plot !== null) {
    const markers = state.plot.markers
      .map(
        (m) =>
          `<div class="marker" data-character="${escapeHtml(m.character)}" ` +
          `style="left:${(m.x * 100).toFixed(2)}%;top:${(m.y * 100).toFixed(2)}%;--faction:${factionColor(m.color)}">` +
          `<label>${escapeHtml(m.name)}</label></div>`,
      )
      .join("");
    const events = state.plot.events
      .map((e) => `<span class="region-event">${escapeHtml(e.region)}: ${escapeHtml(e.kind)}</span>`)
      .join("");
    html += `<div class="plot-map">${markers}<footer>${events}</footer></div>`;
  }
  if (state.panels !== null) {
    const panels = state.panels
      .map(
        (p) =>
          `<div class="panel ${p.hidden ? "panel-hidden" : ""}" data-panel="${escapeHtml(p.id)}" draggable="true" ` +
          `style="left:${p.rect.x}px;top:${p.rect.y}px;width:${p.rect.w}px;height:${p.rect.h}px;transform:rotate(${p.rotation}deg)">` +
          `${escapeHtml(p.id)}</div>`,
      )
      .join("");
    html += `<div class="panel-layer">${panels}</div>`;
  }
  return html + state.content.map(cueCard).join("") + overlay(state);
}

function remotePane(state: RenderState): string {
  const token = state.token;
  const holder = token.holder === null ? "free" : token.holder;
  const polls = state.polls.map((poll) => pollCard(poll, poll.state === "open")).join("");
  return (
    `<div class="remote">` +
    `<div class="transport"><button data-action="play">play</button><button data-action="pause">pause</button>` +
    `<input data-action="seek" type="range" min="0" max="100" /></div>` +
    `<div class="token">token: <span class="holder">${escapeHtml(holder)}</span> queue: ${token.queue.map(escapeHtml).join(", ")}` +
    `<button data-action="token-request">request</button><button data-action="token-release">release</button></div>` +
    `<div class="privacy"><label><input type="checkbox" data-action="privacy-toggle" /> vote privately</label></div>` +
    `<div class="cast-controls"><button data-action="cast">cast to wall</button></div>` +
    `<div class="wake"><button data-action="activate-wall">activate wall</button>` +
    `<button data-action="deactivate-wall">deactivate wall</button></div>` +
    polls +
    state.content.map(cueCard).join("") +
    `</div>`
  );
}

/** One pane, dark scheme, brightness as dimming. */
export function renderPane(state: RenderState | undefined, status: ConnectionStatus): string {
  if (status !== "connected") {
    return `<div class="pane pane-disconnected"><div class="reconnect-overlay">reconnecting…</div></div>`;
  }
  if (state === undefined) {
    return `<div class="pane pane-empty"><div class="waiting">no snapshot yet</div></div>`;
  }
  let inner: string;
  switch (state.role) {
    case "primary-tv":
      inner = tvPane(state);
      break;
    case "surround-wall":
      inner = wallPane(state);
      break;
    case "augmen-table":
      inner = tablePane(state);
      break;
    default:
      inner = remotePane(state);
      break;
  }
  const dark = state.mode === "hibernated" ? " pane-dark" : "";
  return (
    `<div class="pane pane-${escapeHtml(state.role)} mode-${state.mode}${dark}" ` +
    `data-display="${escapeHtml(state.display_id)}" style="--pane-brightness:${state.brightness.toFixed(3)}">` +
    `${inner}</div>`
  );
}

export function renderStatusBar(status: ConnectionStatus, clockMode: "virtual" | "real", nowMs: number): string {
  return (
    `<div class="statusbar status-${status}">` +
    `<span class="conn">${status}</span>` +
    `<span class="clock-mode">${clockMode} clock</span>` +
    `<span class="now">${formatClock(nowMs)}</span></div>`
  );
}
