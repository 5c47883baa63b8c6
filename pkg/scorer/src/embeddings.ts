// Sentence embeddings and cosine similarity.
//
// Two interchangeable backends produce unit-length vectors:
//  - EndpointEmbedding calls an HTTP service hosting the pinned multilingual
//    checkpoint and is what production runs use.
//  - HashedNgramEmbedding is a deterministic local stand-in built from hashed
//    character n-grams. It needs no network or model files, which keeps the
//    test suite hermetic, and it preserves the one property the pipeline
//    relies on: more shared surface content means higher cosine.

export interface EmbeddingBackend {
  /** Embed each text into a unit-length vector. One vector per input. */
  embed(texts: string[]): Promise<number[][]>;
}

export function dot(a: number[], b: number[]): number {
  if (a.length !== b.length) {
    throw new Error(`vector length mismatch: ${a.length} vs ${b.length}`);
  }
  let sum = 0;
  for (let i = 0; i < a.length; i++) {
    sum += (a[i] as number) * (b[i] as number);
  }
  return sum;
}

export function cosine(a: number[], b: number[]): number {
  const na = Math.sqrt(dot(a, a));
  const nb = Math.sqrt(dot(b, b));
  if (na === 0 || nb === 0) {
    return 0;
  }
  const value = dot(a, b) / (na * nb);
  // Clamp float drift so callers can rely on the [-1, 1] range.
  return Math.min(1, Math.max(-1, value));
}

// 32-bit FNV-1a, the usual cheap deterministic string hash.
function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export interface HashedNgramOptions {
  dims?: number;
  minN?: number;
  maxN?: number;
}

export class HashedNgramEmbedding implements EmbeddingBackend {
  readonly dims: number;
  readonly minN: number;
  readonly maxN: number;

  constructor(options: HashedNgramOptions = {}) {
    this.dims = options.dims ?? 256;
    this.minN = options.minN ?? 2;
    this.maxN = options.maxN ?? 4;
    if (this.dims < 8) {
      throw new Error("dims must be at least 8");
    }
    if (this.minN < 1 || this.maxN < this.minN) {
      throw new Error("need 1 <= minN <= maxN");
    }
  }

  embedOne(text: string): number[] {
    const vec = new Array<number>(this.dims).fill(0);
    const normalized = text.toLowerCase().replace(/\s+/g, " ").trim();
    const padded = ` ${normalized} `;
    for (let n = this.minN; n <= this.maxN; n++) {
      for (let i = 0; i + n <= padded.length; i++) {
        const gram = padded.slice(i, i + n);
        const hash = fnv1a(gram);
        const index = hash % this.dims;
        // One hash bit picks the sign so unrelated grams cancel rather
        // than pile up, which keeps unrelated texts near orthogonal.
        const sign = (hash & 0x80000000) !== 0 ? -1 : 1;
        vec[index] = (vec[index] as number) + sign;
      }
    }
    const norm = Math.sqrt(dot(vec, vec));
    if (norm === 0) {
      return vec;
    }
    return vec.map((v) => v / norm);
  }

  async embed(texts: string[]): Promise<number[][]> {
    return texts.map((t) => this.embedOne(t));
  }
}

type FetchLike = (url: string, init: { method: string; headers: Record<string, string>; body: string }) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class EndpointEmbedding implements EmbeddingBackend {
  constructor(
    private readonly url: string,
    private readonly model: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  async embed(texts: string[]): Promise<number[][]> {
    const response = await this.fetchImpl(this.url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model: this.model, texts }),
    });
    if (!response.ok) {
      throw new Error(`embedding endpoint returned ${response.status}`);
    }
    const payload = (await response.json()) as { vectors?: unknown };
    const vectors = payload.vectors;
    if (!Array.isArray(vectors) || vectors.length !== texts.length) {
      throw new Error("embedding endpoint returned wrong number of vectors");
    }
    return vectors.map((v, i) => {
      if (!Array.isArray(v) || v.some((x) => typeof x !== "number" || !Number.isFinite(x))) {
        throw new Error(`embedding endpoint returned a bad vector at index ${i}`);
      }
      return v as number[];
    });
  }
}

/** Cosine similarity between two texts under one embedding backend. */
export async function embedSimilarity(
  backend: EmbeddingBackend,
  left: string,
  right: string,
): Promise<number> {
  const [a, b] = await backend.embed([left, right]);
  return cosine(a as number[], b as number[]);
}
