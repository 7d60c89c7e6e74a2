/** DOM rendering for the labeling panel.
 *
 * The panel shows the pending question, yes/no controls, the running
 * candidate count (always the server-reported live_count, never a
 * client-side guess), the answer history, and the final label once the
 * session resolves.
 */

import { LabelingSession } from "./session";
import type { SessionView } from "./types";

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

export function questionText(node: string): string {
  return `Does the object belong under ‹${node}›?`;
}

export class LabelingPanel {
  readonly root: HTMLElement;
  private readonly objectRef: HTMLElement;
  private readonly question: HTMLElement;
  private readonly liveCount: HTMLElement;
  private readonly yesButton: HTMLButtonElement;
  private readonly noButton: HTMLButtonElement;
  private readonly history: HTMLUListElement;
  private readonly result: HTMLElement;
  private readonly errorBanner: HTMLElement;

  constructor(private readonly session: LabelingSession) {
    this.root = el("section", "labeling-panel");
    this.objectRef = el("p", "object-ref");
    this.question = el("h2", "question");
    this.liveCount = el("p", "live-count");
    this.yesButton = el("button", "answer-yes", "Yes");
    this.noButton = el("button", "answer-no", "No");
    this.history = el("ul", "history");
    this.result = el("p", "result");
    this.errorBanner = el("div", "error-banner");
    this.errorBanner.hidden = true;

    this.yesButton.addEventListener("click", () => this.session.answer(true));
    this.noButton.addEventListener("click", () => this.session.answer(false));

    const controls = el("div", "controls");
    controls.append(this.yesButton, this.noButton);
    this.root.append(
      this.errorBanner,
      this.objectRef,
      this.question,
      this.liveCount,
      controls,
      this.history,
      this.result,
    );

    session.onChange((view, error) => this.render(view, error));
  }

  render(view: SessionView, error: string | null): void {
    this.objectRef.textContent = view.object_ref
      ? `Labeling: ${view.object_ref}`
      : "";
    this.liveCount.textContent = `${view.live_count} candidate${
      view.live_count === 1 ? "" : "s"
    } remaining`;

    const open = view.status === "open" && view.question !== null;
    this.question.textContent = open
      ? questionText(view.question!.node)
      : "";
    const disabled = !open || this.session.busy;
    this.yesButton.disabled = disabled;
    this.noButton.disabled = disabled;

    this.history.replaceChildren(
      ...(view.transcript ?? []).map((entry) =>
        el(
          "li",
          entry.answer ? "answer-item yes" : "answer-item no",
          `${entry.node}: ${entry.answer ? "yes" : "no"}`,
        ),
      ),
    );

    if (view.status === "resolved" && view.result !== null) {
      this.result.textContent = `Label: ${view.result}`;
    } else if (view.status === "abandoned") {
      this.result.textContent = "Session abandoned";
    } else {
      this.result.textContent = "";
    }

    this.errorBanner.hidden = error === null;
    this.errorBanner.textContent = error ?? "";
  }
}
