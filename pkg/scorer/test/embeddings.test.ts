import { describe, expect, it } from "vitest";
import {
  EndpointEmbedding,
  HashedNgramEmbedding,
  cosine,
  dot,
  embedSimilarity,
} from "../src/embeddings.js";

const TEXTS = [
  "The carriage rolled slowly through the autumn mud.",
  "A thin officer waited by the staircase with his hat in hand.",
  "Everything in the house smelled of wax and old paper.",
  "She read the letter twice and said nothing at all.",
];

describe("cosine", () => {
  it("is 1 for a vector with itself and 0 against zero", () => {
    expect(cosine([1, 2, 3], [1, 2, 3])).toBeCloseTo(1, 12);
    expect(cosine([1, 2, 3], [0, 0, 0])).toBe(0);
  });

  it("rejects mismatched lengths", () => {
    expect(() => dot([1], [1, 2])).toThrow(/length mismatch/);
  });

  it("stays inside [-1, 1]", () => {
    expect(cosine([1e-8, 1], [1e-8, 1])).toBeLessThanOrEqual(1);
    expect(cosine([1, 0], [-1, 0])).toBe(-1);
  });
});

describe("HashedNgramEmbedding", () => {
  const backend = new HashedNgramEmbedding();

  it("gives self-similarity 1 within 1e-6", async () => {
    for (const text of TEXTS) {
      const sim = await embedSimilarity(backend, text, text);
      expect(Math.abs(sim - 1)).toBeLessThan(1e-6);
    }
  });

  it("produces unit-length vectors", async () => {
    const vectors = await backend.embed(TEXTS);
    for (const v of vectors) {
      expect(Math.sqrt(dot(v, v))).toBeCloseTo(1, 9);
    }
  });

  it("is deterministic across instances", async () => {
    const other = new HashedNgramEmbedding();
    const [a] = await backend.embed([TEXTS[0]!]);
    const [b] = await other.embed([TEXTS[0]!]);
    expect(a).toEqual(b);
  });

  it("scores related texts above unrelated ones", async () => {
    const sentence = "The carriage rolled slowly through the autumn mud.";
    const related = "The old carriage rolled through the mud of autumn.";
    const unrelated = "Chapter 7. Financial appendix: figures and interest tables.";
    const close = await embedSimilarity(backend, sentence, related);
    const far = await embedSimilarity(backend, sentence, unrelated);
    expect(close).toBeGreaterThan(far);
    expect(far).toBeLessThan(0.4);
  });

  it("a hand-computed dot product of dumped vectors matches the module", async () => {
    const [a, b] = await backend.embed([TEXTS[0]!, TEXTS[1]!]);
    let expected = 0;
    for (let i = 0; i < a!.length; i++) {
      expected += a![i]! * b![i]!;
    }
    // Vectors are unit length, so cosine equals the raw dot product.
    expect(Math.abs(cosine(a!, b!) - expected)).toBeLessThan(1e-6);
  });

  it("normalizes case and whitespace", async () => {
    const sim = await embedSimilarity(backend, "A  Quiet   Evening", "a quiet evening");
    expect(Math.abs(sim - 1)).toBeLessThan(1e-6);
  });

  it("rejects nonsense options", () => {
    expect(() => new HashedNgramEmbedding({ dims: 2 })).toThrow(/dims/);
    expect(() => new HashedNgramEmbedding({ minN: 3, maxN: 2 })).toThrow(/minN/);
  });
});

describe("EndpointEmbedding", () => {
  function fakeFetch(payload: unknown, ok = true, status = 200) {
    const calls: { url: string; body: string }[] = [];
    const impl = async (url: string, init: { body: string }) => {
      calls.push({ url, body: init.body });
      return { ok, status, json: async () => payload };
    };
    return { impl, calls };
  }

  it("sends the pinned model id and returns vectors", async () => {
    const { impl, calls } = fakeFetch({ vectors: [[1, 0], [0, 1]] });
    const backend = new EndpointEmbedding("http://host/embed", "BAAI/bge-m3", impl);
    const vectors = await backend.embed(["a", "b"]);
    expect(vectors).toEqual([[1, 0], [0, 1]]);
    expect(calls[0]?.url).toBe("http://host/embed");
    expect(JSON.parse(calls[0]!.body)).toEqual({ model: "BAAI/bge-m3", texts: ["a", "b"] });
  });

  it("rejects HTTP failures", async () => {
    const { impl } = fakeFetch({}, false, 503);
    const backend = new EndpointEmbedding("http://host/embed", "BAAI/bge-m3", impl);
    await expect(backend.embed(["a"])).rejects.toThrow(/503/);
  });

  it("rejects the wrong number of vectors", async () => {
    const { impl } = fakeFetch({ vectors: [[1, 0]] });
    const backend = new EndpointEmbedding("http://host/embed", "BAAI/bge-m3", impl);
    await expect(backend.embed(["a", "b"])).rejects.toThrow(/wrong number/);
  });

  it("rejects non-finite vector entries", async () => {
    const { impl } = fakeFetch({ vectors: [[1, Number.NaN]] });
    const backend = new EndpointEmbedding("http://host/embed", "BAAI/bge-m3", impl);
    await expect(backend.embed(["a"])).rejects.toThrow(/bad vector/);
  });
});
