import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, api, completionQuery } from "../src/api.js";
import { errorBody, json, mockServer } from "./server.js";

afterEach(() => vi.unstubAllGlobals());

describe("completionQuery", () => {
  it("maps pins to the conditioning set and keeps the pinned constraint empty", () => {
    expect(completionQuery("WIN_SCORE", 7, [1, 2, 4, 9], [])).toEqual({
      metric: "WIN_SCORE",
      targets: [7],
      given: [1, 2, 4, 9],
      banned: [],
      pinned: [],
    });
  });

  it("carries bans for the re-solve", () => {
    expect(completionQuery("EFF", 3, [], [9])).toEqual({
      metric: "EFF",
      targets: [3],
      given: [],
      banned: [9],
      pinned: [],
    });
  });
});

describe("api client", () => {
  it("posts query bodies as JSON to the run's endpoint", async () => {
    const log = mockServer((method, url) =>
      method === "POST" && url === "/runs/my%20run/query"
        ? json({ probability: 0.5 })
        : undefined,
    );
    await api.query("my run", completionQuery("PIR", 1, [2], []));
    expect(log).toHaveLength(1);
    expect(JSON.parse(log[0]!.body!)).toEqual({
      metric: "PIR",
      targets: [1],
      given: [2],
      banned: [],
      pinned: [],
    });
  });

  it("encodes metric and top into the lineups query string", async () => {
    const log = mockServer(() => json({ lineups: [] }));
    await api.lineups("demo", "WIN_SCORE", 5);
    expect(log[0]!.url).toBe("/runs/demo/lineups?metric=WIN_SCORE&top=5");
  });

  it("unwraps the error envelope into ApiError", async () => {
    mockServer(() => errorBody(422, "undefined_conditional", "appears in no solution"));
    const err = await api.runs().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.kind).toBe("undefined_conditional");
    expect(err.message).toMatch(/no solution/);
  });

  it("keeps raw text when the error body is not the envelope", async () => {
    mockServer(() => ({ status: 500, text: "boom" }));
    const err = await api.runs().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.kind).toBe("error");
    expect(err.message).toBe("boom");
  });
});
