/** End-to-end run against a live service process.
 *
 * Spawns the Python session service, registers the vehicle hierarchy,
 * then labels ten objects by clicking through the real DOM. A
 * test-side oracle answers each question from the edge list
 * (ancestor-or-self reachability). The client never sees the edges;
 * it only relays server-issued questions.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { App } from "../src/main";

const PORT = 8641;
const BASE = `http://127.0.0.1:${PORT}`;
const HIERARCHY_ID = "vehicles";

const VEHICLE_EDGES =
  "Vehicle\tCar\n" +
  "Car\tMercedes\n" +
  "Car\tHonda\n" +
  "Car\tNissan\n" +
  "Nissan\tMaxima\n" +
  "Nissan\tSentra\n";

const VEHICLE_COUNTS: Record<string, number> = {
  Vehicle: 4,
  Car: 2,
  Mercedes: 2,
  Honda: 4,
  Nissan: 8,
  Maxima: 40,
  Sentra: 40,
};

/** Ten ground-truth labels; Sentra is deliberately the most frequent. */
const TARGETS = [
  "Sentra",
  "Maxima",
  "Honda",
  "Sentra",
  "Mercedes",
  "Sentra",
  "Car",
  "Sentra",
  "Vehicle",
  "Maxima",
];

/** reachable-from sets (including self), built from the edge text. */
function reachSets(edgeText: string): Map<string, Set<string>> {
  const children = new Map<string, string[]>();
  const nodes = new Set<string>();
  for (const line of edgeText.trim().split("\n")) {
    const [parent, child] = line.split("\t");
    nodes.add(parent).add(child);
    children.set(parent, [...(children.get(parent) ?? []), child]);
  }
  const reach = new Map<string, Set<string>>();
  for (const node of nodes) {
    const seen = new Set<string>([node]);
    const queue = [node];
    while (queue.length > 0) {
      for (const next of children.get(queue.pop()!) ?? []) {
        if (!seen.has(next)) {
          seen.add(next);
          queue.push(next);
        }
      }
    }
    reach.set(node, seen);
  }
  return reach;
}

const REACH = reachSets(VEHICLE_EDGES);

function oracle(questionNode: string, target: string): boolean {
  const set = REACH.get(questionNode);
  if (set === undefined) throw new Error(`unknown node ${questionNode}`);
  return set.has(target);
}

async function until(
  pred: () => boolean,
  what: string,
  timeoutMs = 10_000,
): Promise<void> {
  const t0 = Date.now();
  while (!pred()) {
    if (Date.now() - t0 > timeoutMs) throw new Error(`timeout: ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}

let server: ChildProcess;
let serverLog = "";

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "labeler-e2e-"));
  server = spawn(
    "python3",
    [
      "-m",
      "hiersearch.cli",
      "serve",
      "--port",
      String(PORT),
      "--data-dir",
      dataDir,
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stdout!.on("data", (chunk) => (serverLog += chunk));
  server.stderr!.on("data", (chunk) => (serverLog += chunk));

  const t0 = Date.now();
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/healthz`);
      if (resp.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() - t0 > 30_000) {
      throw new Error(`service did not come up:\n${serverLog}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }

  const resp = await fetch(`${BASE}/hierarchies`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({
      edges: VEHICLE_EDGES,
      id: HIERARCHY_ID,
      weights: VEHICLE_COUNTS,
    }),
  });
  if (resp.status !== 201) {
    throw new Error(`hierarchy setup failed: ${resp.status} ${serverLog}`);
  }
});

afterAll(() => {
  server?.kill("SIGTERM");
});

function renderedCount(app: App): number {
  const text = app.panel!.root.querySelector(".live-count")!.textContent ?? "";
  const match = /^(\d+) candidate/.exec(text);
  if (match === null) throw new Error(`no candidate count in "${text}"`);
  return Number(match[1]);
}

describe("labeling through the browser UI", () => {
  it("labels 10 objects correctly with strictly shrinking candidate sets", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const app = new App(root, BASE, HIERARCHY_ID);

    for (const [index, target] of TARGETS.entries()) {
      const session = await app.startLabeling(`object-${index}`);
      const counts: number[] = [renderedCount(app)];

      while (session.current()!.status === "open") {
        const view = session.current()!;
        const asked = view.questions_asked;
        const yes = oracle(view.question!.node, target);
        const button = app.panel!.root.querySelector(
          yes ? ".answer-yes" : ".answer-no",
        ) as HTMLButtonElement;
        expect(button.disabled).toBe(false);
        button.click();
        await until(
          () =>
            session.current()!.questions_asked === asked + 1 ||
            session.current()!.status !== "open",
          `answer ${asked} of object-${index}`,
        );
        counts.push(renderedCount(app));
      }

      expect(session.current()!.status).toBe("resolved");
      expect(session.current()!.result).toBe(target);
      expect(
        app.panel!.root.querySelector(".result")!.textContent,
      ).toBe(`Label: ${target}`);

      for (let i = 1; i < counts.length; i++) {
        expect(counts[i]).toBeLessThan(counts[i - 1]);
      }
      expect(counts[counts.length - 1]).toBe(1);
    }
  });

  it("shows the most frequent label as the top dashboard bar", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const app = new App(root, BASE, HIERARCHY_ID);
    await app.dashboard.poll();

    const rows = app.dashboard.root.querySelectorAll(".top-bars .bar-row");
    expect(rows.length).toBeGreaterThan(0);
    expect(rows[0].querySelector(".bar-label")!.textContent).toBe("Sentra");

    const stats = await app.api.hierarchyStats(HIERARCHY_ID);
    expect(stats.sessions.resolved).toBe(TARGETS.length);
    expect(stats.rolling_mean_questions).not.toBeNull();
    // One poll with a resolved session is enough to draw the mean line.
    expect(app.dashboard.root.querySelector(".mean-chart path")).not.toBeNull();
  });
});
