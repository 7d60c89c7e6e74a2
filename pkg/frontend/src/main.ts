/** Page wiring.
 *
 * Reads the service base URL and hierarchy id from query parameters,
 * mounts the start form, the labeling panel, and the stats dashboard.
 * All policy logic lives on the server; this client only relays
 * answers and renders server-issued state.
 */

import { Api, ApiError } from "./api";
import { Dashboard } from "./dashboard";
import { LabelingSession } from "./session";
import { LabelingPanel } from "./view";

const DEFAULT_SERVICE = "http://localhost:8600";
const POLL_MS = 2000;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  readonly api: Api;
  readonly dashboard: Dashboard;
  session: LabelingSession | null = null;
  panel: LabelingPanel | null = null;
  private readonly startBanner: HTMLElement;
  private readonly objectInput: HTMLInputElement;
  private readonly panelSlot: HTMLElement;

  constructor(
    root: HTMLElement,
    serviceUrl: string,
    readonly hierarchyId: string,
  ) {
    this.api = new Api(serviceUrl);
    this.dashboard = new Dashboard(this.api, hierarchyId);

    this.startBanner = el("div", "error-banner");
    this.startBanner.hidden = true;
    this.objectInput = el("input", "object-input");
    this.objectInput.placeholder = "object reference (URL or text)";
    const startButton = el("button", "start-session", "Start labeling");
    const form = el("form", "start-form");
    form.append(this.objectInput, startButton);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.startLabeling(this.objectInput.value);
    });
    this.panelSlot = el("div", "panel-slot");

    root.append(
      el("h1", undefined, "Labeler"),
      this.startBanner,
      form,
      this.panelSlot,
      this.dashboard.root,
    );

    document.addEventListener("keydown", (event) => {
      if (event.target === this.objectInput) return;
      if (event.key === "y") void this.session?.answer(true);
      else if (event.key === "n") void this.session?.answer(false);
    });
  }

  async startLabeling(objectRef: string): Promise<LabelingSession> {
    const session = new LabelingSession(this.api, this.hierarchyId);
    const panel = new LabelingPanel(session);
    try {
      await session.start("online", objectRef, "greedy_tree");
    } catch (err) {
      this.startBanner.hidden = false;
      if (err instanceof ApiError) {
        this.startBanner.textContent = err.retryable
          ? `service unavailable, try again (${err.message})`
          : `cannot start session: ${err.message}`;
      } else {
        this.startBanner.textContent = String(err);
      }
      throw err;
    }
    this.startBanner.hidden = true;
    this.panelSlot.replaceChildren(panel.root);
    this.session = session;
    this.panel = panel;
    return session;
  }
}

export function mount(root: HTMLElement): App {
  const params = new URLSearchParams(window.location.search);
  const app = new App(
    root,
    params.get("service") ?? DEFAULT_SERVICE,
    params.get("hierarchy") ?? "vehicles",
  );
  app.dashboard.start(POLL_MS);
  return app;
}

const autoRoot = document.getElementById("app");
if (autoRoot !== null) mount(autoRoot);
