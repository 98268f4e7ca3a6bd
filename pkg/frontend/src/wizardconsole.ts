/**
 * Facilitator console: load a scenario document, step through it manually,
 * and fire one-off injections. Steps are delivered as ordinary protocol
 * messages, so a console-driven run is indistinguishable from a scripted one.
 */

import { HubConnection } from "./connection.js";
import { escapeHtml } from "./render.js";

interface ScenarioStep {
  trigger: Record<string, unknown>;
  actions: Record<string, unknown>[];
}

interface ScenarioDoc {
  name: string;
  preamble?: {
    contents?: Record<string, { kind: string; payload?: Record<string, unknown> }>;
  };
  steps: ScenarioStep[];
}

export class WizardConsole {
  scenario: ScenarioDoc | null = null;
  cursor = 0;
  virtualNow = 0;
  log: string[] = [];

  constructor(private connection: HubConnection) {}

  load(document: string): string | null {
    try {
      const parsed = JSON.parse(document) as ScenarioDoc;
      if (typeof parsed.name !== "string" || !Array.isArray(parsed.steps)) {
        return "scenario needs a name and a steps list";
      }
      this.scenario = parsed;
      this.cursor = 0;
      this.log.push(`loaded scenario ${parsed.name} (${parsed.steps.length} steps)`);
      return null;
    } catch (exc) {
      return `malformed scenario: ${String(exc)}`;
    }
  }

  /** Fire the next step's actions; at-time triggers advance the virtual clock. */
  step(): boolean {
    if (this.scenario === null || this.cursor >= this.scenario.steps.length) {
      return false;
    }
    const step = this.scenario.steps[this.cursor];
    this.cursor += 1;
    const at = step.trigger["at_ms"];
    if (typeof at === "number" && at > this.virtualNow) {
      this.virtualNow = at;
      this.connection.send("clock-sync", { now_ms: at });
    }
    for (const action of step.actions) {
      this.runAction(action);
    }
    this.log.push(`step ${this.cursor}/${this.scenario.steps.length} fired`);
    return true;
  }

  private runAction(action: Record<string, unknown>): void {
    if ("show" in action) {
      const show = action["show"] as { content: string; target: string };
      const content = this.scenario?.preamble?.contents?.[show.content];
      if (content !== undefined) {
        this.connection.send("wizard-inject", {
          kind: "show",
          content: { kind: content.kind, payload: content.payload ?? {} },
          target: show.target,
        });
      }
      return;
    }
    const inject = action["inject"] as Record<string, unknown> | undefined;
    if (inject === undefined) return;
    const kind = inject["kind"];
    if (kind === "input") {
      const payload: Record<string, unknown> = {};
      for (const [key, value] of Object.entries(inject)) {
        if (key !== "kind" && key !== "input_kind") payload[key] = value;
      }
      payload["kind"] = inject["input_kind"] ?? "touch";
      this.connection.send("input-event", payload);
    } else if (kind === "feed") {
      this.connection.send("wizard-inject", { kind: "feed-event", event: inject["event"] ?? {} });
    } else if (kind === "environment" || kind === "presence") {
      const body: Record<string, unknown> = {};
      for (const [key, value] of Object.entries(inject)) {
        if (key !== "kind") body[key] = value;
      }
      this.connection.send("wizard-inject", { kind, ...body });
    } else if (kind === "message") {
      this.connection.send("wizard-inject", { kind: "message", message: inject["message"] ?? {} });
    }
  }

  render(): string {
    const name = this.scenario === null ? "none" : this.scenario.name;
    const total = this.scenario?.steps.length ?? 0;
    const entries = this.log.slice(-8).map((line) => `<li>${escapeHtml(line)}</li>`).join("");
    return (
      `<div class="wizard-console">` +
      `<header>scenario: ${escapeHtml(name)} (${this.cursor}/${total})</header>` +
      `<textarea data-action="scenario-text" rows="6" placeholder="paste scenario JSON"></textarea>` +
      `<div class="controls"><button data-action="scenario-load">load</button>` +
      `<button data-action="scenario-step">step</button>` +
      `<button data-action="inject-presence-out">user leaves</button>` +
      `<button data-action="inject-presence-in">user returns</button>` +
      `<button data-action="inject-lighting">dim lights</button>` +
      `<button data-action="inject-goal">inject goal</button>` +
      `<button data-action="inject-var">inject VAR</button></div>` +
      `<ul class="wizard-log">${entries}</ul></div>`
    );
  }
}
