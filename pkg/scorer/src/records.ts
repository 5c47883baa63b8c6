// NDJSON paragraph records: one JSON object per line.
//
// The scorer is a superset transform over these records. It may add fields
// (pos_tags, comet_kiwi, align_sim, roundtrip_sim) but it must never drop a
// record, invent one, or disturb the input order. To keep that guarantee
// checkable we parse each line into a plain object and preserve every field
// we did not produce ourselves, in its original key order.

export interface ParagraphRecord {
  record_id: string;
  source_lang: string;
  source_text: string;
  english_text: string;
  // All other input fields ride along untouched.
  [key: string]: unknown;
}

export interface ParseIssue {
  line: number;
  message: string;
}

export interface ParseResult {
  records: ParagraphRecord[];
  issues: ParseIssue[];
}

function asString(value: unknown): string {
  return typeof value === "string" ? value : "";
}

/** Parse NDJSON text into records. Bad lines become issues, not records. */
export function parseRecords(text: string): ParseResult {
  const records: ParagraphRecord[] = [];
  const issues: ParseIssue[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const raw = lines[i] ?? "";
    const line = raw.trim();
    if (line === "") {
      continue;
    }
    let value: unknown;
    try {
      value = JSON.parse(line);
    } catch {
      issues.push({ line: i + 1, message: "not valid JSON" });
      continue;
    }
    if (typeof value !== "object" || value === null || Array.isArray(value)) {
      issues.push({ line: i + 1, message: "line is not a JSON object" });
      continue;
    }
    const obj = value as Record<string, unknown>;
    if (typeof obj["record_id"] !== "string" || obj["record_id"] === "") {
      issues.push({ line: i + 1, message: "missing record_id" });
      continue;
    }
    const record: ParagraphRecord = {
      ...obj,
      record_id: obj["record_id"],
      source_lang: asString(obj["source_lang"]),
      source_text: asString(obj["source_text"]),
      english_text: asString(obj["english_text"]),
    };
    records.push(record);
  }
  return { records, issues };
}

/** Serialize records back to NDJSON, one object per line, order preserved. */
export function serializeRecords(records: ParagraphRecord[]): string {
  return records.map((r) => JSON.stringify(r)).join("\n") + (records.length > 0 ? "\n" : "");
}

/**
 * Return a copy of the record with extra fields appended. Existing fields keep
 * their original order; additions go last so diffs against the input stay
 * readable. Fields whose value is undefined are left out entirely: a score
 * that could not be computed is an absent field, never a sentinel.
 */
export function withFields(
  record: ParagraphRecord,
  additions: Record<string, unknown>,
): ParagraphRecord {
  const out: ParagraphRecord = { ...record };
  for (const [key, value] of Object.entries(additions)) {
    if (value !== undefined) {
      out[key] = value;
    }
  }
  return out;
}
