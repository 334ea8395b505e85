export type Metric = "EFF" | "PIR" | "WIN_SCORE";

export interface RunSummary {
  id: string;
  created_at: string;
  seed: number;
  metrics: Metric[];
}

export interface RuleSet {
  mode: "RBBL" | "IWBF";
  iwbf_cap: number;
  rbbl_caps: Record<string, number>;
  team_size: number;
}

export interface LineupRow {
  members: number[];
  names: string[];
  probability: number;
  se: number;
  count: number;
  class_sum: number;
  female_count: number;
}

export interface LineupsResponse {
  run_id: string;
  metric: Metric;
  version: number;
  draws: number;
  scenario: { home: boolean; match_index: number | null; shared_match_effect: boolean };
  rules: RuleSet;
  constraints: { pinned: number[]; banned: number[] };
  feasible_lineups: number;
  total_distinct: number;
  lineups: LineupRow[];
}

export interface PlayerRow {
  index: number;
  name: string;
  classification: number;
  is_female: boolean;
  probability: number;
  se: number;
}

export interface InclusionResponse {
  run_id: string;
  metric: Metric;
  version: number;
  draws: number;
  players: PlayerRow[];
}

export interface PitEntry {
  player: number;
  match: number;
  pit: number;
  ess: number;
  flagged: boolean;
}

export interface PitResponse {
  run_id: string;
  metric: Metric;
  draws: number;
  entries: PitEntry[];
  by_match: { match: number; mean_pit: number; n: number }[];
  n_flagged: number;
}

export interface QueryBody {
  metric: Metric;
  targets: number[];
  given: number[];
  banned: number[];
  pinned: number[];
}

export interface QueryResponse {
  run_id: string;
  metric: Metric;
  version: number;
  targets: number[];
  given: number[];
  banned: number[];
  pinned: number[];
  resolved: boolean;
  draws: number;
  conditioning_draws: number;
  probability: number;
  se: number | null;
  joint_probability: number;
  given_probability: number;
}

export type ErrorKind =
  | "not_found"
  | "bad_request"
  | "undefined_conditional"
  | "infeasible"
  | "stale_artifacts"
  | "corrupt_artifacts";
