// Command-line entry point: read an NDJSON corpus, add scores, write the
// scored corpus plus an error log and a run manifest.
//
//   node dist/cli.js --in corpus.ndjson --out scored.ndjson
//   node dist/cli.js --in corpus.ndjson --out scored.ndjson \
//     --backend endpoint --qe-url http://host/qe --embed-url http://host/embed
//
// Exit codes: 0 on success, 1 for bad arguments, 2 for unreadable input.

import { readFileSync, writeFileSync } from "node:fs";
import { DEFAULT_CONFIG, RunManifest, ScorerConfig, validateConfig } from "./config.js";
import { EndpointEmbedding, HashedNgramEmbedding } from "./embeddings.js";
import { parseRecords, serializeRecords } from "./records.js";
import { EndpointQe, SurrogateQe } from "./qe.js";
import { EndpointTranslator } from "./roundtrip.js";
import { Backends, scoreRecords } from "./score.js";

export interface CliArgs {
  inPath: string;
  outPath: string;
  errorsPath: string;
  manifestPath: string;
  config: ScorerConfig;
}

export function parseArgs(argv: string[]): CliArgs {
  const config: ScorerConfig = { ...DEFAULT_CONFIG };
  let inPath = "";
  let outPath = "";
  let errorsPath = "";
  let manifestPath = "";

  const takeValue = (flag: string, i: number): string => {
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`${flag} needs a value`);
    }
    return value;
  };

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i] as string;
    switch (arg) {
      case "--in":
        inPath = takeValue(arg, i);
        i += 1;
        break;
      case "--out":
        outPath = takeValue(arg, i);
        i += 1;
        break;
      case "--errors":
        errorsPath = takeValue(arg, i);
        i += 1;
        break;
      case "--manifest":
        manifestPath = takeValue(arg, i);
        i += 1;
        break;
      case "--backend": {
        const value = takeValue(arg, i);
        if (value !== "surrogate" && value !== "endpoint") {
          throw new Error(`--backend must be "surrogate" or "endpoint", got "${value}"`);
        }
        config.backend = value;
        i += 1;
        break;
      }
      case "--qe-url":
        config.qeUrl = takeValue(arg, i);
        i += 1;
        break;
      case "--embed-url":
        config.embedUrl = takeValue(arg, i);
        i += 1;
        break;
      case "--translate-url":
        config.translateUrl = takeValue(arg, i);
        i += 1;
        break;
      case "--translate-model":
        config.translateModel = takeValue(arg, i);
        i += 1;
        break;
      case "--batch-size": {
        const value = Number(takeValue(arg, i));
        if (!Number.isInteger(value) || value < 1) {
          throw new Error("--batch-size must be a positive integer");
        }
        config.batchSize = value;
        i += 1;
        break;
      }
      case "--roundtrip":
        config.roundtrip = true;
        break;
      default:
        throw new Error(`unknown argument: ${arg}`);
    }
  }

  if (inPath === "") {
    throw new Error("--in is required");
  }
  if (outPath === "") {
    throw new Error("--out is required");
  }
  const problems = validateConfig(config);
  if (problems.length > 0) {
    throw new Error(problems.join("; "));
  }
  return {
    inPath,
    outPath,
    errorsPath: errorsPath === "" ? `${outPath}.errors.ndjson` : errorsPath,
    manifestPath: manifestPath === "" ? `${outPath}.manifest.json` : manifestPath,
    config,
  };
}

export function buildBackends(config: ScorerConfig): Backends {
  if (config.backend === "endpoint") {
    const backends: Backends = {
      qe: new EndpointQe(config.qeUrl, config.qeModel),
      embedder: new EndpointEmbedding(config.embedUrl, config.embedModel),
    };
    if (config.roundtrip && config.translateUrl !== "") {
      backends.translator = new EndpointTranslator(config.translateUrl, config.translateModel);
    }
    return backends;
  }
  const embedder = new HashedNgramEmbedding();
  const backends: Backends = {
    qe: new SurrogateQe(embedder),
    embedder,
  };
  // The surrogate stack has no translation service, so roundtrip scoring on
  // it echoes the English text back; callers see a similarity that reflects
  // raw surface overlap. Production roundtrips use the endpoint backend.
  if (config.roundtrip) {
    backends.translator = {
      translate: async (texts: string[]) => texts,
    };
  }
  return backends;
}

export async function runScorer(args: CliArgs): Promise<{ manifest: RunManifest; issueCount: number }> {
  let text: string;
  try {
    text = readFileSync(args.inPath, "utf8");
  } catch {
    throw new InputError(`cannot read input file: ${args.inPath}`);
  }
  const { records, issues } = parseRecords(text);
  const backends = buildBackends(args.config);
  const outcome = await scoreRecords(records, args.config, backends);

  writeFileSync(args.outPath, serializeRecords(outcome.records));
  const errorLines = [
    ...issues.map((issue) => JSON.stringify({ line: issue.line, message: issue.message })),
    ...outcome.errors.map((row) => JSON.stringify(row)),
  ];
  writeFileSync(args.errorsPath, errorLines.length > 0 ? errorLines.join("\n") + "\n" : "");

  const manifest: RunManifest = {
    config: args.config,
    input_path: args.inPath,
    output_path: args.outPath,
    records_in: records.length,
    records_out: outcome.records.length,
    errors: issues.length + outcome.errors.length,
    fields_added: outcome.fieldsAdded,
  };
  writeFileSync(args.manifestPath, JSON.stringify(manifest, null, 2) + "\n");
  return { manifest, issueCount: issues.length };
}

export class InputError extends Error {}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${message}\n`);
    return 1;
  }
  try {
    const { manifest } = await runScorer(args);
    process.stdout.write(
      `scored ${manifest.records_out} records into ${args.outPath} ` +
        `(${manifest.errors} errors, fields: ${manifest.fields_added.join(", ")})\n`,
    );
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${message}\n`);
    return err instanceof InputError ? 2 : 1;
  }
}

const isDirectRun = process.argv[1] !== undefined && import.meta.url.endsWith(
  process.argv[1].split("/").pop() as string,
);
if (isDirectRun) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
