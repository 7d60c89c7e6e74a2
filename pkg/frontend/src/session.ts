/** Controller for one labeling session.
 *
 * Wraps the service API behind a small state machine: callers submit
 * yes/no answers and subscribe to view changes. Exactly one request is
 * in flight at a time; answers arriving while a request is pending (or
 * after the session resolved) are dropped without touching the network,
 * so double-clicks and key repeats cannot advance the session twice.
 */

import { Api, ApiError } from "./api";
import type { SessionView, TranscriptEntry } from "./types";

export type SessionListener = (view: SessionView, error: string | null) => void;

export class LabelingSession {
  private view: SessionView | null = null;
  private inFlight = false;
  private listeners: SessionListener[] = [];
  private lastError: string | null = null;
  // Answer responses omit the transcript; keep a local copy so the
  // history stays visible, replaced wholesale whenever a full fetch
  // returns the authoritative one.
  private transcript: TranscriptEntry[] = [];

  constructor(
    private readonly api: Api,
    private readonly hierarchyId: string,
  ) {}

  current(): SessionView | null {
    return this.view;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  onChange(fn: SessionListener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    if (this.view === null) return;
    for (const fn of this.listeners) fn(this.view, this.lastError);
  }

  private update(view: SessionView): void {
    if (view.transcript !== undefined) this.transcript = view.transcript;
    this.view = { ...view, transcript: this.transcript };
    this.lastError = null;
    this.emit();
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.lastError = err.retryable
        ? `service unavailable, try again (${err.message})`
        : `${err.code}: ${err.message}`;
    } else {
      this.lastError = String(err);
    }
    this.emit();
  }

  async start(mode: string, objectRef: string, policy: string): Promise<void> {
    this.inFlight = true;
    try {
      const view = await this.api.createSession({
        hierarchy_id: this.hierarchyId,
        policy,
        mode,
        object_ref: objectRef,
      });
      this.inFlight = false;
      this.update(view);
    } catch (err) {
      this.inFlight = false;
      this.fail(err);
      throw err;
    }
  }

  /** Submit an answer for the pending question.
   *
   * No-op when a request is already in flight, the session has resolved,
   * or there is no pending question; in those cases no request is issued.
   */
  async answer(yes: boolean): Promise<void> {
    const view = this.view;
    if (this.inFlight || view === null) return;
    if (view.status !== "open" || view.question === null) return;
    this.inFlight = true;
    // Re-emit so controls disable for the duration of the request.
    this.emit();
    let next: SessionView | null = null;
    let failure: unknown = null;
    try {
      next = await this.api.postAnswer(
        view.session_id,
        view.question.ordinal,
        yes,
      );
    } catch (err) {
      failure = err;
    }
    this.inFlight = false;
    if (next !== null) {
      this.transcript = [
        ...this.transcript,
        { node: view.question.node, answer: yes },
      ];
      this.update(next);
    } else if (failure instanceof ApiError && failure.code === "ordinal_mismatch") {
      // Our view is stale (the answer may have landed on a retry we
      // never saw complete). Re-fetch the authoritative state instead
      // of guessing at the next ordinal.
      await this.refresh();
    } else {
      this.fail(failure);
    }
  }

  async refresh(): Promise<void> {
    const view = this.view;
    if (view === null) return;
    try {
      this.update(await this.api.getSession(view.session_id));
    } catch (err) {
      this.fail(err);
    }
  }
}
