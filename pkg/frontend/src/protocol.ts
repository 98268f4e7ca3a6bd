/**
 * Wire protocol mirror: envelope shapes and the render-state schema the hub
 * publishes. The UI never invents state; everything rendered comes from
 * these structures as delivered in snapshots and diffs.
 */

export interface Envelope {
  type: string;
  seq: number;
  payload: Record<string, unknown>;
}

export interface CueWire {
  id: string;
  start_ms: number;
  end_ms: number;
  target: string;
  kind: string;
  attention: "ambient" | "glance" | "focus";
  activation: "auto" | "on-demand";
  priority: number;
  payload: Record<string, unknown>;
  source?: "track" | "live";
}

export interface PollWire {
  poll_id: string;
  question: string;
  options: string[];
  state: "open" | "closed";
  counts: Record<string, number>;
  total: number;
  public_votes: { user: string; option: string }[];
}

export interface TokenWire {
  holder: string | null;
  queue: string[];
}

export interface MediaWire {
  media_id: string;
  position_ms: number;
  duration_ms: number;
  rate: string;
  state: "playing" | "paused";
}

export interface AvatarWire {
  player_id: string;
  name: string;
  x: number;
  y: number;
  team_color_side: "home" | "away";
  badges: { goals: number; yellow: number; red: number };
  fatigue: number;
}

export interface MatchPaneWire {
  match_id: string;
  home: string;
  away: string;
  score: [number, number];
  phase: string;
  clock_ms: number;
  avatars?: AvatarWire[];
}

export interface PlotMarkerWire {
  character: string;
  name: string;
  x: number;
  y: number;
  color: number;
  image: string | null;
}

export interface PanelWire {
  id: string;
  rect: { x: number; y: number; w: number; h: number };
  rotation: number;
  seat: string;
  hidden: boolean;
}

export interface RenderState {
  display_id: string;
  role: string;
  mode: "hibernated" | "ambient" | "glance" | "focus";
  brightness: number;
  content: CueWire[];
  token: TokenWire;
  environment: Record<string, unknown>;
  polls: PollWire[];
  cast: { user: string; kind: string; payload: Record<string, unknown>; at: number } | null;
  wizard: { kind: string; payload: Record<string, unknown>; at: number } | null;
  media: MediaWire | null;
  sports: { matches: MatchPaneWire[] } | null;
  plot: { markers: PlotMarkerWire[]; events: { region: string; kind: string }[] } | null;
  panels: PanelWire[] | null;
}

export function encode(message: Envelope): string {
  return JSON.stringify(message);
}

export function decode(frame: string): Envelope {
  const message = JSON.parse(frame);
  if (typeof message !== "object" || message === null || Array.isArray(message)) {
    throw new Error("envelope must be a JSON object");
  }
  return message as Envelope;
}
