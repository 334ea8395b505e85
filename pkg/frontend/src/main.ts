import { api, ApiError, completionQuery } from "./api.js";
import { renderBanner, renderNotice } from "./banner.js";
import { renderBoard, renderChips, renderEmptyStore } from "./board.js";
import { budgetFor } from "./budget.js";
import { renderHealth } from "./health.js";
import {
  type ExplorerState,
  encodeState,
  parseState,
  toggleBan,
  togglePin,
} from "./state.js";
import type { Metric, PlayerRow, RunSummary } from "./types.js";
import { type CompletionRow, renderBudget, renderCompletions, renderInfeasible } from "./whatif.js";

const METRICS: Metric[] = ["EFF", "PIR", "WIN_SCORE"];
const TOP = 10;

function header(runs: RunSummary[], state: ExplorerState): string {
  const options = runs
    .map((r) => `<option value="${r.id}" ${r.id === state.run ? "selected" : ""}>${r.id}</option>`)
    .join("");
  const current = runs.find((r) => r.id === state.run);
  const metricTabs = METRICS.map((m) => {
    const fitted = current ? current.metrics.includes(m) : false;
    const cls = m === state.metric ? "tab active" : "tab";
    return `<button type="button" class="${cls}" data-metric="${m}" ${fitted ? "" : "disabled"}>${m}</button>`;
  }).join("");
  const viewTabs = (["board", "health"] as const)
    .map(
      (t) =>
        `<button type="button" class="${t === state.tab ? "tab active" : "tab"}" data-tab="${t}">${
          t === "board" ? "line-ups" : "model health"
        }</button>`,
    )
    .join("");
  return `<header>
    <h1>line-up explorer</h1>
    <label>run <select data-run>${options}</select></label>
    <nav>${metricTabs}</nav>
    <nav class="views">${viewTabs}</nav>
  </header>`;
}

export class App {
  state: ExplorerState;
  /** Resolves when the refresh triggered by the latest interaction is done. */
  settled: Promise<void> = Promise.resolve();

  private generation = 0;
  private controller: AbortController | null = null;
  private notice = "";

  constructor(
    private root: HTMLElement,
    initial: ExplorerState,
    private push: (query: string) => void = () => {},
  ) {
    this.state = initial;
    root.addEventListener("click", (ev) => this.onClick(ev));
    root.addEventListener("change", (ev) => this.onChange(ev));
  }

  apply(next: ExplorerState): Promise<void> {
    this.state = next;
    this.push(encodeState(next));
    this.settled = this.refresh();
    return this.settled;
  }

  setFromUrl(search: string): Promise<void> {
    this.state = parseState(search);
    this.settled = this.refresh();
    return this.settled;
  }

  private onClick(ev: Event): void {
    const el = (ev.target as HTMLElement).closest("[data-pin],[data-ban],[data-metric],[data-tab],[data-retry]");
    if (!el) return;
    const pin = el.getAttribute("data-pin");
    const ban = el.getAttribute("data-ban");
    const metric = el.getAttribute("data-metric");
    const tab = el.getAttribute("data-tab");
    if (pin !== null) {
      const t = togglePin(this.state, Number(pin));
      if (t.blocked) this.showNotice(t.blocked);
      else void this.apply(t.state);
    } else if (ban !== null) {
      const t = toggleBan(this.state, Number(ban));
      if (t.blocked) this.showNotice(t.blocked);
      else void this.apply(t.state);
    } else if (metric !== null) {
      void this.apply({ ...this.state, metric: metric as Metric });
    } else if (tab !== null) {
      void this.apply({ ...this.state, tab: tab as "board" | "health" });
    } else if (el.hasAttribute("data-retry")) {
      this.settled = this.refresh();
    }
  }

  private onChange(ev: Event): void {
    const el = ev.target as HTMLElement;
    if (el.matches("[data-run]")) {
      void this.apply({ ...this.state, run: (el as HTMLSelectElement).value });
    }
  }

  private showNotice(message: string): void {
    this.notice = message;
    const slot = this.root.querySelector("[data-slot=notice]");
    if (slot) slot.innerHTML = renderNotice(message);
  }

  async refresh(): Promise<void> {
    this.controller?.abort();
    const controller = (this.controller = new AbortController());
    const generation = ++this.generation;
    const live = () => generation === this.generation;
    try {
      const { runs } = await api.runs(controller.signal);
      if (!live()) return;
      if (runs.length === 0) {
        this.root.innerHTML = renderEmptyStore();
        return;
      }
      const run = runs.find((r) => r.id === this.state.run) ?? runs[0]!;
      this.state = { ...this.state, run: run.id };
      if (!run.metrics.includes(this.state.metric)) {
        this.state = { ...this.state, metric: run.metrics[0] ?? this.state.metric };
      }
      await this.renderRun(runs, controller.signal, live);
    } catch (err) {
      if (!live() || isAbort(err)) return;
      this.renderFailure(err, []);
    }
  }

  private async renderRun(
    runs: RunSummary[],
    signal: AbortSignal,
    live: () => boolean,
  ): Promise<void> {
    const { run, metric, tab } = this.state;
    try {
      if (tab === "health") {
        const pit = await api.pit(run!, metric, signal);
        if (!live()) return;
        this.paint(runs, `<main>${renderHealth(pit)}</main>`);
        return;
      }
      const [board, inclusion] = await Promise.all([
        api.lineups(run!, metric, TOP, signal),
        api.inclusion(run!, metric, signal),
      ]);
      if (!live()) return;
      const whatIf = await this.whatIfSection(inclusion.players, board.rules, signal);
      if (!live()) return;
      this.paint(
        runs,
        `${renderChips(inclusion.players, this.state, board.rules)}
         ${renderBudget(budgetFor(this.state.pinned, inclusion.players, board.rules), this.state.pinned.length)}
         <main>${renderBoard(board)}</main>
         <section>${whatIf}</section>`,
      );
    } catch (err) {
      if (!live() || isAbort(err)) return;
      this.renderFailure(err, runs);
    }
  }

  /** One query per eligible candidate; pins condition, bans re-solve. */
  private async whatIfSection(
    roster: PlayerRow[],
    rules: { team_size: number },
    signal: AbortSignal,
  ): Promise<string> {
    const { metric, pinned, banned } = this.state;
    if (pinned.length >= rules.team_size) {
      return renderNotice("a full line-up is pinned; unpin someone to compare completions");
    }
    const candidates = roster.filter(
      (p) => !pinned.includes(p.index) && !banned.includes(p.index),
    );
    const rows: CompletionRow[] = [];
    for (const player of candidates) {
      try {
        const result = await api.query(
          this.state.run!,
          completionQuery(metric, player.index, pinned, banned),
          signal,
        );
        rows.push({ player, result });
      } catch (err) {
        if (err instanceof ApiError && err.status === 422) {
          return renderInfeasible(err.message, err.kind);
        }
        throw err;
      }
    }
    return renderCompletions(rows, pinned, banned);
  }

  private paint(runs: RunSummary[], body: string): void {
    const notice = this.notice ? renderNotice(this.notice) : "";
    this.notice = "";
    this.root.innerHTML = `${header(runs, this.state)}
      <div data-slot="notice">${notice}</div>
      <div data-slot="banner"></div>
      ${body}`;
  }

  private renderFailure(err: unknown, runs: RunSummary[]): void {
    const message = err instanceof ApiError ? `${err.kind}: ${err.message}` : String(err);
    const head = runs.length ? header(runs, this.state) : "<header><h1>line-up explorer</h1></header>";
    this.root.innerHTML = `${head}
      <div data-slot="notice"></div>
      <div data-slot="banner">${renderBanner(message)}</div>`;
  }
}

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    const app = new App(root, parseState(window.location.search), (query) => {
      window.history.pushState(null, "", query ? `?${query}` : window.location.pathname);
    });
    window.addEventListener("popstate", () => void app.setFromUrl(window.location.search));
    app.settled = app.refresh();
  }
}
