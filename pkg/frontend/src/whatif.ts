import type { Budget } from "./budget.js";
import type { PlayerRow, QueryResponse } from "./types.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export interface CompletionRow {
  player: PlayerRow;
  result: QueryResponse;
}

/** Budget meter: remaining class points under the cap for the pinned group. */
export function renderBudget(budget: Budget, pinnedCount: number): string {
  const over = budget.remaining < 0;
  const pct = budget.cap > 0 ? Math.min(100, (budget.used / budget.cap) * 100) : 0;
  return `<div class="budget ${over ? "over" : ""}">
    <div class="budget-track"><div class="budget-fill" style="width:${pct}%"></div></div>
    <span class="budget-text" data-testid="budget">${budget.used} of ${budget.cap} class points
      (${budget.remaining} remaining, ${budget.women} women, ${pinnedCount} pinned)</span>
  </div>`;
}

/** Conditional completion table. Probability and se cells print the API
 *  values verbatim; nothing is rounded or recomputed. */
export function renderCompletions(rows: CompletionRow[], pinned: number[], banned: number[]): string {
  const sorted = [...rows].sort(
    (a, b) => b.result.probability - a.result.probability || a.player.index - b.player.index,
  );
  const body = sorted
    .map(
      ({ player, result }) => `<tr data-candidate="${player.index}">
        <td>${esc(player.name)}</td>
        <td class="num">${player.classification}</td>
        <td class="num" data-field="probability">${result.probability}</td>
        <td class="num" data-field="se">${result.se}</td>
      </tr>`,
    )
    .join("");
  const scope = pinned.length
    ? `given {${pinned.join(",")}}`
    : "unconditional inclusion";
  const resolve = banned.length ? `, re-solved without {${banned.join(",")}}` : "";
  return `<table class="detail" data-testid="completions">
    <caption>${scope}${resolve}</caption>
    <thead><tr><th>player</th><th>class</th><th>probability</th><th>se</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderInfeasible(message: string, kind: string): string {
  const hint =
    kind === "infeasible"
      ? "the bans leave no five players under the cap"
      : "no completion fits under the cap, so no stored solution contains this group";
  return `<div class="infeasible" data-testid="infeasible">
    <strong>nothing to show:</strong> ${esc(message)}<br><span class="muted">${hint}</span>
  </div>`;
}
