import type { ExplorerState } from "./state.js";
import type { LineupsResponse, PlayerRow, RuleSet } from "./types.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function rulesLabel(rules: RuleSet): string {
  if (rules.mode === "IWBF") {
    return `IWBF cap ${rules.iwbf_cap} points for ${rules.team_size} players`;
  }
  const ladder = Object.keys(rules.rbbl_caps)
    .map(Number)
    .sort((a, b) => a - b)
    .slice(0, 4)
    .map((w) => `${w}W:${rules.rbbl_caps[String(w)]}`)
    .join(" ");
  return `RBBL caps by women on court ${ladder}`;
}

/** Roster chips: class points, sex badge, pin/ban toggles. */
export function renderChips(
  roster: PlayerRow[],
  state: ExplorerState,
  rules: RuleSet | null,
): string {
  const chips = roster
    .map((p) => {
      const pinned = state.pinned.includes(p.index);
      const banned = state.banned.includes(p.index);
      const cls = ["chip", pinned ? "pinned" : "", banned ? "banned" : ""].join(" ").trim();
      return `<span class="${cls}" data-player="${p.index}">
        <button type="button" class="chip-name" data-pin="${p.index}"
          title="pin or unpin (conditions the what-if table)">${esc(p.name)}</button>
        <span class="badge">${p.classification}</span>
        <span class="badge sex">${p.is_female ? "F" : "M"}</span>
        <button type="button" class="chip-ban" data-ban="${p.index}"
          title="ban or unban (re-solves without this player)">&#215;</button>
      </span>`;
    })
    .join("");
  const cap = rules ? `<div class="rules-line">${esc(rulesLabel(rules))}</div>` : "";
  return `<div class="chips">${chips}</div>${cap}`;
}

/** Horizontal bar chart of top line-up probabilities with +-1 SE whiskers.
 *  Bar lengths are presentation; the printed numbers are the API values. */
export function renderBoard(data: LineupsResponse): string {
  if (data.lineups.length === 0) {
    return `<p class="muted">no stored solutions for ${data.metric}</p>`;
  }
  const width = 640;
  const barH = 22;
  const gap = 8;
  const labelW = 150;
  const first = data.lineups[0]!;
  const scale = (width - labelW - 60) / Math.max(first.probability + first.se, 1e-9);
  const rows = data.lineups.map((l, k) => {
    const y = k * (barH + gap);
    const x = labelW + l.probability * scale;
    const lo = labelW + Math.max(0, l.probability - l.se) * scale;
    const hi = labelW + (l.probability + l.se) * scale;
    const label = `{${l.members.join(",")}}`;
    return `<g transform="translate(0,${y})">
      <text x="${labelW - 8}" y="${barH / 2}" text-anchor="end" dominant-baseline="central"
        class="bar-label"><title>${esc(l.names.join(", "))}</title>${label}</text>
      <rect x="${labelW}" y="2" width="${Math.max(x - labelW, 1)}" height="${barH - 4}" class="bar"/>
      <line x1="${lo}" x2="${hi}" y1="${barH / 2}" y2="${barH / 2}" class="whisker"/>
      <line x1="${lo}" x2="${lo}" y1="${barH / 2 - 4}" y2="${barH / 2 + 4}" class="whisker"/>
      <line x1="${hi}" x2="${hi}" y1="${barH / 2 - 4}" y2="${barH / 2 + 4}" class="whisker"/>
      <text x="${hi + 6}" y="${barH / 2}" dominant-baseline="central" class="bar-value">${l.probability}</text>
    </g>`;
  });
  const height = data.lineups.length * (barH + gap);
  const table = data.lineups
    .map(
      (l) => `<tr>
        <td>{${l.members.join(",")}}</td>
        <td class="num">${l.probability}</td>
        <td class="num">${l.se}</td>
        <td class="num">${l.class_sum}</td>
        <td class="num">${l.female_count}</td>
      </tr>`,
    )
    .join("");
  return `<svg viewBox="0 0 ${width} ${height}" width="100%" role="img"
      aria-label="line-up probabilities">${rows.join("")}</svg>
    <table class="detail">
      <thead><tr><th>line-up</th><th>probability</th><th>se</th>
        <th>class sum</th><th>women</th></tr></thead>
      <tbody>${table}</tbody>
    </table>
    <p class="muted">${data.draws} draws, ${data.feasible_lineups} feasible line-ups,
      ${data.total_distinct} seen, report v${data.version}</p>`;
}

export function renderEmptyStore(): string {
  return `<div class="empty">
    <h2>no runs yet</h2>
    <p>Fit a model and optimize it, then reload:</p>
    <pre>lineuplab fit --roster roster.csv --boxscores boxscores.csv --out runs
lineuplab optimize runs/&lt;run-id&gt;
lineuplab serve --runs runs</pre>
  </div>`;
}
