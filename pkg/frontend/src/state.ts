import type { Metric } from "./types.js";

export type Tab = "board" | "health";

export interface ExplorerState {
  run: string | null;
  metric: Metric;
  pinned: number[]; // sorted, distinct, at most MAX_PINS
  banned: number[]; // sorted, distinct, disjoint from pinned
  tab: Tab;
}

export const MAX_PINS = 5;

const METRICS: Metric[] = ["EFF", "PIR", "WIN_SCORE"];

export function defaultState(): ExplorerState {
  return { run: null, metric: "WIN_SCORE", pinned: [], banned: [], tab: "board" };
}

function parseIndexList(raw: string | null): number[] {
  if (!raw) return [];
  const seen = new Set<number>();
  for (const token of raw.split(",")) {
    const n = Number(token);
    if (Number.isInteger(n) && n >= 1) seen.add(n);
  }
  return [...seen].sort((a, b) => a - b);
}

/** Decode state from a URL query string; unknown or malformed values fall
 *  back to defaults, and pinned wins membership conflicts over banned. */
export function parseState(search: string): ExplorerState {
  const q = new URLSearchParams(search);
  const state = defaultState();
  state.run = q.get("run");
  const metric = q.get("metric");
  if (metric && (METRICS as string[]).includes(metric)) state.metric = metric as Metric;
  state.pinned = parseIndexList(q.get("pin")).slice(0, MAX_PINS);
  state.banned = parseIndexList(q.get("ban")).filter((i) => !state.pinned.includes(i));
  if (q.get("tab") === "health") state.tab = "health";
  return state;
}

export function encodeState(state: ExplorerState): string {
  const q = new URLSearchParams();
  if (state.run) q.set("run", state.run);
  q.set("metric", state.metric);
  if (state.pinned.length) q.set("pin", state.pinned.join(","));
  if (state.banned.length) q.set("ban", state.banned.join(","));
  if (state.tab !== "board") q.set("tab", state.tab);
  return q.toString();
}

export interface Toggle {
  state: ExplorerState;
  blocked?: string; // set when the action violates an invariant; state unchanged
}

export function togglePin(state: ExplorerState, index: number): Toggle {
  if (state.pinned.includes(index)) {
    return { state: { ...state, pinned: state.pinned.filter((i) => i !== index) } };
  }
  if (state.banned.includes(index)) {
    return { state, blocked: `player ${index} is banned; unban before pinning` };
  }
  if (state.pinned.length >= MAX_PINS) {
    return { state, blocked: `a line-up has ${MAX_PINS} players; unpin someone first` };
  }
  return { state: { ...state, pinned: [...state.pinned, index].sort((a, b) => a - b) } };
}

export function toggleBan(state: ExplorerState, index: number): Toggle {
  if (state.banned.includes(index)) {
    return { state: { ...state, banned: state.banned.filter((i) => i !== index) } };
  }
  if (state.pinned.includes(index)) {
    return { state, blocked: `player ${index} is pinned; unpin before banning` };
  }
  return { state: { ...state, banned: [...state.banned, index].sort((a, b) => a - b) } };
}
