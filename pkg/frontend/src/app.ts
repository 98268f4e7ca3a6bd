/**
 * Room overview: every pane in one window, a personal remote, and the
 * facilitator console. Browser-only glue; all state lives in the session
 * view and every pane re-renders from it on each hub message.
 */

import { HubConnection } from "./connection.js";
import * as actions from "./interactions.js";
import { renderPane, renderStatusBar } from "./render.js";
import { WizardConsole } from "./wizardconsole.js";

const DISPLAYS = [
  { id: "ui-tv", role: "primary-tv", capabilities: ["video"] },
  { id: "ui-wall", role: "surround-wall", capabilities: ["video"] },
  { id: "ui-table", role: "augmen-table", capabilities: ["touch", "map"] },
];

function currentUser(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("user") ?? "guest";
}

export function bootstrap(root: HTMLElement): void {
  const url = `ws://${window.location.host}/ws`;
  const user = currentUser();
  const personalId = `ui-phone-${user}`;

  const connection = new HubConnection(
    url,
    {
      socketFactory: (wsUrl) => new WebSocket(wsUrl) as never,
      onMessage: () => render(),
    },
  );
  const wizard = new WizardConsole(connection);
  let registered = false;
  let privateVoting = false;

  function register(): void {
    for (const display of DISPLAYS) {
      connection.send("register", actions.register(display.id, display.role, display.capabilities).payload);
    }
    connection.send(
      "register",
      actions.register(personalId, "personal", ["touch", "voice"], user).payload,
    );
    registered = true;
  }

  function render(): void {
    const view = connection.view;
    if (view.status === "connected" && !registered) register();
    if (view.status !== "connected") registered = false;

    const panes = DISPLAYS.map(
      (display) =>
        `<section class="slot slot-${display.role}">` +
        renderPane(view.pane(display.id), view.status) +
        `</section>`,
    ).join("");
    const remote =
      `<section class="slot slot-remote">` +
      renderPane(view.pane(personalId), view.status) +
      `</section>`;
    const actuators = view.actuatorLog
      .slice(-5)
      .map((a) => `<span class="act">${a.actuator} = ${JSON.stringify(a.value)}</span>`)
      .join(" ");
    root.innerHTML =
      renderStatusBar(view.status, view.clockMode, 0) +
      `<main class="room">${panes}${remote}` +
      `<section class="slot slot-wizard">${wizard.render()}</section></main>` +
      `<footer class="actuators">${actuators}</footer>`;
  }

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const action = target.dataset["action"];
    if (action === undefined) return;
    const send = (i: actions.Interaction) => connection.send(i.type, i.payload);
    switch (action) {
      case "play":
        send(actions.transport("play", user));
        break;
      case "pause":
        send(actions.transport("pause", user));
        break;
      case "token-request":
        send(actions.tokenRequest(user));
        break;
      case "token-release":
        send(actions.tokenRelease(user));
        break;
      case "activate-wall":
        send(actions.activationGesture("ui-wall", true));
        break;
      case "deactivate-wall":
        send(actions.activationGesture("ui-wall", false));
        break;
      case "privacy-toggle":
        privateVoting = (target as HTMLInputElement).checked;
        break;
      case "cast":
        send(
          actions.cast(user, { kind: "news", payload: { headline: "cast from the remote" } }, "surround-wall"),
        );
        break;
      case "scenario-load": {
        const textarea = root.querySelector<HTMLTextAreaElement>("[data-action=scenario-text]");
        if (textarea !== null) {
          const problem = wizard.load(textarea.value);
          if (problem !== null) wizard.log.push(problem);
          render();
        }
        break;
      }
      case "scenario-step":
        wizard.step();
        render();
        break;
      case "inject-presence-out":
        send(actions.wizardInject("presence", { user, present: false }));
        break;
      case "inject-presence-in":
        send(actions.wizardInject("presence", { user, present: true }));
        break;
      case "inject-lighting":
        send(actions.wizardInject("environment", { actuator: "ceiling-light", value: 0.2 }));
        break;
      case "inject-goal":
        send(
          actions.wizardInject("feed-event", {
            event: { type: "goal", match_id: "derby", team: "harbor-fc" },
          }),
        );
        break;
      case "inject-var":
        send(
          actions.wizardInject("feed-event", {
            event: {
              type: "var-review",
              match_id: "derby",
              question: "Goal stands?",
              options: ["goal", "offside"],
            },
          }),
        );
        break;
      default:
        break;
    }
    // vote buttons carry the option on the poll list items
    const pollItem = target.closest<HTMLElement>("[data-option]");
    const poll = target.closest<HTMLElement>("[data-poll]");
    if (pollItem !== null && poll !== null) {
      send(
        actions.vote(
          poll.dataset["poll"] ?? "",
          user,
          pollItem.dataset["option"] ?? "",
          privateVoting ? "private" : "public",
        ),
      );
    }
  });

  // panel drag: pointer-up over the table pane sends a move; the hub either
  // confirms (diff) or rejects (error) and the next render snaps back.
  root.addEventListener("dragend", (event) => {
    const target = event.target as HTMLElement;
    const panelId = target.dataset["panel"];
    const field = target.closest<HTMLElement>(".pane-augmen-table");
    if (panelId === undefined || field === null) return;
    const bounds = field.getBoundingClientRect();
    connection.send(
      "input-event",
      actions.movePanel("ui-table", panelId, event.clientX - bounds.left, event.clientY - bounds.top)
        .payload,
    );
  });

  render();
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) bootstrap(root);
}
