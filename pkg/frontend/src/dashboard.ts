/** Live stats dashboard for one hierarchy.
 *
 * Polls the stats endpoint on a fixed interval and renders the top
 * label probabilities as horizontal bars plus a line chart of the
 * rolling mean question count, built from the polled history. A fetch
 * failure shows a banner and keeps the last good render.
 */

import { Api, ApiError } from "./api";
import type { HierarchyStats } from "./types";

const BAR_WIDTH = 240;
const CHART_WIDTH = 320;
const CHART_HEIGHT = 80;
const MAX_POINTS = 60;

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

export class Dashboard {
  readonly root: HTMLElement;
  private readonly bars: HTMLElement;
  private readonly sessions: HTMLElement;
  private readonly chart: SVGSVGElement;
  private readonly banner: HTMLElement;
  private readonly meanHistory: number[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: Api,
    private readonly hierarchyId: string,
  ) {
    this.root = el("section", "dashboard");
    this.banner = el("div", "error-banner");
    this.banner.hidden = true;
    this.bars = el("div", "top-bars");
    this.sessions = el("p", "session-counts");
    this.chart = document.createElementNS(
      "http://www.w3.org/2000/svg",
      "svg",
    );
    this.chart.setAttribute("class", "mean-chart");
    this.chart.setAttribute("width", String(CHART_WIDTH));
    this.chart.setAttribute("height", String(CHART_HEIGHT));
    this.root.append(
      this.banner,
      el("h3", undefined, "Label distribution"),
      this.bars,
      this.sessions,
      el("h3", undefined, "Questions per label (rolling mean)"),
      this.chart,
    );
  }

  start(intervalMs: number): void {
    this.stop();
    void this.poll();
    this.timer = setInterval(() => void this.poll(), intervalMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  async poll(): Promise<void> {
    let stats: HierarchyStats;
    try {
      stats = await this.api.hierarchyStats(this.hierarchyId);
    } catch (err) {
      this.banner.hidden = false;
      this.banner.textContent =
        err instanceof ApiError ? `stats unavailable: ${err.message}` : String(err);
      return;
    }
    this.banner.hidden = true;
    this.render(stats);
  }

  render(stats: HierarchyStats): void {
    this.bars.replaceChildren(
      ...stats.top.map(([label, p]) => {
        const row = el("div", "bar-row");
        row.append(el("span", "bar-label", label));
        const bar = el("span", "bar");
        bar.style.width = `${Math.round(p * BAR_WIDTH)}px`;
        row.append(bar, el("span", "bar-value", p.toFixed(3)));
        return row;
      }),
    );
    const s = stats.sessions;
    this.sessions.textContent =
      `sessions: ${s.open} open, ${s.resolved} resolved, ${s.abandoned} abandoned`;
    if (stats.rolling_mean_questions !== null) {
      this.meanHistory.push(stats.rolling_mean_questions);
      if (this.meanHistory.length > MAX_POINTS) this.meanHistory.shift();
      this.drawChart();
    }
  }

  private drawChart(): void {
    const points = this.meanHistory;
    const top = Math.max(...points) * 1.1 || 1;
    const step =
      points.length > 1 ? CHART_WIDTH / (points.length - 1) : CHART_WIDTH;
    const path = points
      .map((v, i) => {
        const x = (i * step).toFixed(1);
        const y = (CHART_HEIGHT - (v / top) * CHART_HEIGHT).toFixed(1);
        return `${i === 0 ? "M" : "L"}${x},${y}`;
      })
      .join(" ");
    const line = document.createElementNS(
      "http://www.w3.org/2000/svg",
      "path",
    );
    line.setAttribute("d", path);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#2a6fdb");
    line.setAttribute("stroke-width", "2");
    this.chart.replaceChildren(line);
  }
}
