// Reference-free quality estimation for translation pairs.
//
// Scores live in [0, 1]; higher means the English text is a better rendering
// of the source. The endpoint backend queries an HTTP service hosting the
// pinned checkpoint. The surrogate backend is a deterministic local stand-in:
// embedding cosine between source and hypothesis, damped by how far apart
// their lengths are. It is not a quality model, but it is monotone in shared
// content, which is the property the tests and the downstream rank analysis
// need.

import { EmbeddingBackend, HashedNgramEmbedding, cosine } from "./embeddings.js";

export interface QePair {
  source: string;
  hypothesis: string;
}

export interface QeBackend {
  /** Score each pair in [0, 1]. One score per input pair, same order. */
  scoreBatch(pairs: QePair[]): Promise<number[]>;
}

export class SurrogateQe implements QeBackend {
  private readonly embedder: EmbeddingBackend;

  constructor(embedder?: EmbeddingBackend) {
    this.embedder = embedder ?? new HashedNgramEmbedding();
  }

  async scoreBatch(pairs: QePair[]): Promise<number[]> {
    const texts: string[] = [];
    for (const pair of pairs) {
      texts.push(pair.source, pair.hypothesis);
    }
    const vectors = await this.embedder.embed(texts);
    const scores: number[] = [];
    for (let i = 0; i < pairs.length; i++) {
      const pair = pairs[i] as QePair;
      const a = vectors[2 * i] as number[];
      const b = vectors[2 * i + 1] as number[];
      const agreement = (1 + cosine(a, b)) / 2; // [-1,1] -> [0,1]
      const sLen = pair.source.length;
      const hLen = pair.hypothesis.length;
      const ratio = sLen === 0 || hLen === 0 ? 0 : Math.min(sLen, hLen) / Math.max(sLen, hLen);
      const lengthFactor = 0.6 + 0.4 * ratio;
      scores.push(agreement * lengthFactor);
    }
    return scores;
  }
}

type FetchLike = (url: string, init: { method: string; headers: Record<string, string>; body: string }) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class EndpointQe implements QeBackend {
  constructor(
    private readonly url: string,
    private readonly model: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  async scoreBatch(pairs: QePair[]): Promise<number[]> {
    const response = await this.fetchImpl(this.url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model: this.model, pairs }),
    });
    if (!response.ok) {
      throw new Error(`quality estimation endpoint returned ${response.status}`);
    }
    const payload = (await response.json()) as { scores?: unknown };
    const scores = payload.scores;
    if (!Array.isArray(scores) || scores.length !== pairs.length) {
      throw new Error("quality estimation endpoint returned wrong number of scores");
    }
    return scores.map((s, i) => {
      if (typeof s !== "number" || !Number.isFinite(s) || s < 0 || s > 1) {
        throw new Error(`quality estimation endpoint returned an out-of-range score at index ${i}`);
      }
      return s;
    });
  }
}
