import type { PitResponse } from "./types.js";

// Per-match strip of mean cross-validated PIT values. A well calibrated
// model sits near 0.5 everywhere; the cell tint encodes the distance.

export function renderHealth(data: PitResponse): string {
  const cells = data.by_match
    .map((m) => {
      const off = Math.min(Math.abs(m.mean_pit - 0.5) * 2, 1);
      return `<div class="pit-cell" style="--off:${off.toFixed(3)}"
        title="match ${m.match}: mean PIT ${m.mean_pit} over ${m.n} players">
        <span class="pit-match">${m.match}</span>
      </div>`;
    })
    .join("");
  const flagged = data.entries.filter((e) => e.flagged);
  const flaggedNote = flagged.length
    ? `<p class="muted">${data.n_flagged} of ${data.entries.length} observations flagged
        (importance weights too concentrated to trust): ${flagged
          .slice(0, 8)
          .map((e) => `p${e.player}/m${e.match}`)
          .join(", ")}${flagged.length > 8 ? ", &#8230;" : ""}</p>`
    : `<p class="muted">all ${data.entries.length} observations usable</p>`;
  return `<h2>model health (${data.metric})</h2>
    <div class="pit-strip">${cells}</div>
    ${flaggedNote}`;
}
