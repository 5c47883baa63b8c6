// Roundtrip similarity: translate the English text back into the source
// language and compare that backtranslation with the original source text.
// A faithful translation survives the trip; a loose one drifts. The translator
// is injected so runs can point at any translation service, and tests can
// substitute a deterministic fake.

import { EmbeddingBackend, cosine } from "./embeddings.js";

export interface Translator {
  /** Translate each text from one language to another, preserving order. */
  translate(texts: string[], from: string, to: string): Promise<string[]>;
}

type FetchLike = (url: string, init: { method: string; headers: Record<string, string>; body: string }) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class EndpointTranslator implements Translator {
  constructor(
    private readonly url: string,
    private readonly model: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  async translate(texts: string[], from: string, to: string): Promise<string[]> {
    const response = await this.fetchImpl(this.url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model: this.model, from, to, texts }),
    });
    if (!response.ok) {
      throw new Error(`translation endpoint returned ${response.status}`);
    }
    const payload = (await response.json()) as { texts?: unknown };
    const out = payload.texts;
    if (!Array.isArray(out) || out.length !== texts.length) {
      throw new Error("translation endpoint returned wrong number of texts");
    }
    return out.map((t, i) => {
      if (typeof t !== "string") {
        throw new Error(`translation endpoint returned a non-string at index ${i}`);
      }
      return t;
    });
  }
}

export interface RoundtripItem {
  sourceText: string;
  englishText: string;
  sourceLang: string;
}

/**
 * Similarity in [-1, 1] between each source text and the backtranslation of
 * its English text. Items are grouped by source language so the translator
 * sees one language pair per call; results come back in input order.
 */
export async function roundtripSimilarity(
  items: RoundtripItem[],
  translator: Translator,
  embedder: EmbeddingBackend,
): Promise<number[]> {
  const byLang = new Map<string, number[]>();
  for (let i = 0; i < items.length; i++) {
    const lang = (items[i] as RoundtripItem).sourceLang;
    const bucket = byLang.get(lang);
    if (bucket === undefined) {
      byLang.set(lang, [i]);
    } else {
      bucket.push(i);
    }
  }
  const backtranslations = new Array<string>(items.length);
  for (const [lang, indices] of byLang) {
    const texts = indices.map((i) => (items[i] as RoundtripItem).englishText);
    const translated = await translator.translate(texts, "en", lang);
    for (let j = 0; j < indices.length; j++) {
      backtranslations[indices[j] as number] = translated[j] as string;
    }
  }
  const similarities: number[] = [];
  for (let i = 0; i < items.length; i++) {
    const item = items[i] as RoundtripItem;
    const [a, b] = await embedder.embed([item.sourceText, backtranslations[i] as string]);
    similarities.push(cosine(a as number[], b as number[]));
  }
  return similarities;
}
