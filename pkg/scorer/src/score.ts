// The scoring pass itself: take parsed records, add pos_tags and, where a
// source text exists, quality and similarity scores. The pass is a superset
// transform: every input record comes out exactly once, in input order, with
// fields added and nothing else changed. A record that cannot be scored comes
// through with the failing fields absent and one error row per failure; no
// sentinel values ever stand in for a score.

import { ScorerConfig } from "./config.js";
import { EmbeddingBackend, cosine } from "./embeddings.js";
import { ParagraphRecord, withFields } from "./records.js";
import { QeBackend } from "./qe.js";
import { RoundtripItem, Translator, roundtripSimilarity } from "./roundtrip.js";
import { tagPos } from "./tagger.js";

export interface ErrorRow {
  record_id: string;
  field: string;
  message: string;
}

export interface ScoreOutcome {
  records: ParagraphRecord[];
  errors: ErrorRow[];
  fieldsAdded: string[];
}

export interface Backends {
  qe: QeBackend;
  embedder: EmbeddingBackend;
  translator?: Translator;
}

// How many batches are allowed in flight at once. Results are written by
// batch index, so concurrency never reorders output.
const MAX_IN_FLIGHT = 4;

async function mapBatches<T, R>(
  items: T[],
  batchSize: number,
  worker: (batch: T[], batchIndex: number) => Promise<R[]>,
): Promise<R[]> {
  const batches: T[][] = [];
  for (let i = 0; i < items.length; i += batchSize) {
    batches.push(items.slice(i, i + batchSize));
  }
  const results = new Array<R[]>(batches.length);
  let next = 0;
  async function run(): Promise<void> {
    while (next < batches.length) {
      const index = next;
      next += 1;
      results[index] = await worker(batches[index] as T[], index);
    }
  }
  const runners: Promise<void>[] = [];
  for (let i = 0; i < Math.min(MAX_IN_FLIGHT, batches.length); i++) {
    runners.push(run());
  }
  await Promise.all(runners);
  return results.flat();
}

interface Scored {
  pos_tags?: string[];
  comet_kiwi?: number;
  align_sim?: number;
  roundtrip_sim?: number;
}

export async function scoreRecords(
  records: ParagraphRecord[],
  config: ScorerConfig,
  backends: Backends,
): Promise<ScoreOutcome> {
  const errors: ErrorRow[] = [];
  const scored: Scored[] = records.map(() => ({}));

  // Part-of-speech tags: always computed, the only score an original-English
  // record (empty source fields) receives.
  for (let i = 0; i < records.length; i++) {
    const record = records[i] as ParagraphRecord;
    if (record.english_text === "") {
      errors.push({
        record_id: record.record_id,
        field: "pos_tags",
        message: "english_text is empty",
      });
      continue;
    }
    (scored[i] as Scored).pos_tags = tagPos(record.english_text);
  }

  // Pair scores apply only where a source text exists.
  const pairIndices: number[] = [];
  for (let i = 0; i < records.length; i++) {
    const record = records[i] as ParagraphRecord;
    if (record.source_text !== "" && record.english_text !== "") {
      pairIndices.push(i);
    }
  }

  // Quality estimation, batched; a failed batch costs its own records their
  // score and nothing more.
  const qeScores = await mapBatches(pairIndices, config.batchSize, async (batch) => {
    const pairs = batch.map((i) => {
      const r = records[i] as ParagraphRecord;
      return { source: r.source_text, hypothesis: r.english_text };
    });
    try {
      return await backends.qe.scoreBatch(pairs);
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      for (const i of batch) {
        errors.push({
          record_id: (records[i] as ParagraphRecord).record_id,
          field: "comet_kiwi",
          message,
        });
      }
      return batch.map(() => undefined as number | undefined);
    }
  });
  for (let j = 0; j < pairIndices.length; j++) {
    const value = qeScores[j];
    if (value !== undefined) {
      (scored[pairIndices[j] as number] as Scored).comet_kiwi = value;
    }
  }

  // Embedding similarity between source and English text.
  const alignScores = await mapBatches(pairIndices, config.batchSize, async (batch) => {
    const texts: string[] = [];
    for (const i of batch) {
      const r = records[i] as ParagraphRecord;
      texts.push(r.source_text, r.english_text);
    }
    try {
      const vectors = await backends.embedder.embed(texts);
      const out: (number | undefined)[] = [];
      for (let k = 0; k < batch.length; k++) {
        out.push(cosine(vectors[2 * k] as number[], vectors[2 * k + 1] as number[]));
      }
      return out;
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      for (const i of batch) {
        errors.push({
          record_id: (records[i] as ParagraphRecord).record_id,
          field: "align_sim",
          message,
        });
      }
      return batch.map(() => undefined as number | undefined);
    }
  });
  for (let j = 0; j < pairIndices.length; j++) {
    const value = alignScores[j];
    if (value !== undefined) {
      (scored[pairIndices[j] as number] as Scored).align_sim = value;
    }
  }

  // Roundtrip similarity, only when a translator is configured.
  if (config.roundtrip && backends.translator !== undefined) {
    const translator = backends.translator;
    const roundtripScores = await mapBatches(pairIndices, config.batchSize, async (batch) => {
      const items: RoundtripItem[] = batch.map((i) => {
        const r = records[i] as ParagraphRecord;
        return { sourceText: r.source_text, englishText: r.english_text, sourceLang: r.source_lang };
      });
      try {
        return await roundtripSimilarity(items, translator, backends.embedder);
      } catch (err) {
        const message = err instanceof Error ? err.message : String(err);
        for (const i of batch) {
          errors.push({
            record_id: (records[i] as ParagraphRecord).record_id,
            field: "roundtrip_sim",
            message,
          });
        }
        return batch.map(() => undefined as number | undefined);
      }
    });
    for (let j = 0; j < pairIndices.length; j++) {
      const value = roundtripScores[j];
      if (value !== undefined) {
        (scored[pairIndices[j] as number] as Scored).roundtrip_sim = value;
      }
    }
  }

  const fieldsAdded = new Set<string>();
  const out = records.map((record, i) => {
    const additions = scored[i] as Scored;
    for (const [key, value] of Object.entries(additions)) {
      if (value !== undefined) {
        fieldsAdded.add(key);
      }
    }
    return withFields(record, additions as Record<string, unknown>);
  });

  return { records: out, errors, fieldsAdded: [...fieldsAdded].sort() };
}
