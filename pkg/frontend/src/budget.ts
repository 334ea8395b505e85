import type { PlayerRow, RuleSet } from "./types.js";

// The budget meter is the one number computed client-side: plain arithmetic
// over roster classification points against the active capacity rule.
// Everything else on screen comes verbatim from the API.

export function capacityFor(rules: RuleSet, women: number): number {
  if (rules.mode === "IWBF") return rules.iwbf_cap;
  const cap = rules.rbbl_caps[String(women)];
  if (cap === undefined) {
    throw new Error(`no RBBL cap for ${women} women`);
  }
  return cap;
}

export interface Budget {
  used: number;
  women: number;
  cap: number;
  remaining: number;
  slots: number; // open roster spots in the line-up
}

export function budgetFor(pinned: number[], roster: PlayerRow[], rules: RuleSet): Budget {
  const picked = roster.filter((p) => pinned.includes(p.index));
  const used = picked.reduce((sum, p) => sum + p.classification, 0);
  const women = picked.filter((p) => p.is_female).length;
  const cap = capacityFor(rules, women);
  return {
    used,
    women,
    cap,
    remaining: cap - used,
    slots: rules.team_size - picked.length,
  };
}
