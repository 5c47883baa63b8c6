import { describe, expect, it } from "vitest";
import { EndpointQe, SurrogateQe } from "../src/qe.js";
import { buildPairFixtures, corruptWords } from "./helpers.js";

describe("SurrogateQe", () => {
  const qe = new SurrogateQe();
  const fixtures = buildPairFixtures();

  it("keeps every score in [0, 1]", async () => {
    const pairs = fixtures.map((f) => ({ source: f.source, hypothesis: f.english }));
    const scores = await qe.scoreBatch(pairs);
    expect(scores.length).toBe(pairs.length);
    for (const s of scores) {
      expect(s).toBeGreaterThanOrEqual(0);
      expect(s).toBeLessThanOrEqual(1);
      expect(Number.isFinite(s)).toBe(true);
    }
  });

  it("scores an identical pair near the top of the range", async () => {
    const [score] = await qe.scoreBatch([
      { source: fixtures[0]!.english, hypothesis: fixtures[0]!.english },
    ]);
    expect(score).toBeGreaterThan(0.9);
  });

  it("ranks the true pair above a mismatched pair for all 30 fixtures", async () => {
    const truePairs = fixtures.map((f) => ({ source: f.source, hypothesis: f.english }));
    const mismatched = fixtures.map((f, i) => ({
      source: f.source,
      hypothesis: fixtures[(i + 7) % fixtures.length]!.english,
    }));
    const trueScores = await qe.scoreBatch(truePairs);
    const wrongScores = await qe.scoreBatch(mismatched);
    for (let i = 0; i < fixtures.length; i++) {
      expect(trueScores[i]!).toBeGreaterThan(wrongScores[i]!);
    }
  });

  it("drops as the hypothesis is corrupted further", async () => {
    const f = fixtures[3]!;
    const pairs = [0, 3, 6, 9].map((k) => ({
      source: f.source,
      hypothesis: corruptWords(f.english, k),
    }));
    const scores = await qe.scoreBatch(pairs);
    for (let i = 1; i < scores.length; i++) {
      expect(scores[i]!).toBeLessThan(scores[i - 1]!);
    }
  });

  it("is deterministic", async () => {
    const pairs = fixtures.slice(0, 5).map((f) => ({ source: f.source, hypothesis: f.english }));
    expect(await qe.scoreBatch(pairs)).toEqual(await qe.scoreBatch(pairs));
  });

  it("handles empty texts without leaving the range", async () => {
    const scores = await qe.scoreBatch([
      { source: "", hypothesis: "something" },
      { source: "something", hypothesis: "" },
    ]);
    for (const s of scores) {
      expect(s).toBeGreaterThanOrEqual(0);
      expect(s).toBeLessThanOrEqual(1);
    }
  });
});

describe("EndpointQe", () => {
  function fakeFetch(payload: unknown, ok = true, status = 200) {
    const calls: { url: string; body: string }[] = [];
    const impl = async (url: string, init: { body: string }) => {
      calls.push({ url, body: init.body });
      return { ok, status, json: async () => payload };
    };
    return { impl, calls };
  }

  it("sends the pinned model id with each batch", async () => {
    const { impl, calls } = fakeFetch({ scores: [0.7, 0.2] });
    const qe = new EndpointQe("http://host/qe", "Unbabel/wmt22-cometkiwi-da", impl);
    const pairs = [
      { source: "a", hypothesis: "b" },
      { source: "c", hypothesis: "d" },
    ];
    expect(await qe.scoreBatch(pairs)).toEqual([0.7, 0.2]);
    const body = JSON.parse(calls[0]!.body);
    expect(body.model).toBe("Unbabel/wmt22-cometkiwi-da");
    expect(body.pairs).toEqual(pairs);
  });

  it("rejects HTTP failures and bad payloads", async () => {
    const bad = fakeFetch({}, false, 500);
    const qe1 = new EndpointQe("http://host/qe", "Unbabel/wmt22-cometkiwi-da", bad.impl);
    await expect(qe1.scoreBatch([{ source: "a", hypothesis: "b" }])).rejects.toThrow(/500/);

    const short = fakeFetch({ scores: [] });
    const qe2 = new EndpointQe("http://host/qe", "Unbabel/wmt22-cometkiwi-da", short.impl);
    await expect(qe2.scoreBatch([{ source: "a", hypothesis: "b" }])).rejects.toThrow(/wrong number/);
  });

  it("rejects out-of-range or non-finite scores", async () => {
    for (const value of [1.5, -0.1, Number.NaN]) {
      const { impl } = fakeFetch({ scores: [value] });
      const qe = new EndpointQe("http://host/qe", "Unbabel/wmt22-cometkiwi-da", impl);
      await expect(qe.scoreBatch([{ source: "a", hypothesis: "b" }])).rejects.toThrow(/out-of-range/);
    }
  });
});
