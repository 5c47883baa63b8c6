// Scoring run configuration. Every knob that affects output lands in the run
// manifest so a result can be traced back to the exact setup that made it.

export interface ScorerConfig {
  // "surrogate" backends are deterministic and local; "endpoint" backends
  // call an HTTP service hosting the pinned checkpoints.
  backend: "surrogate" | "endpoint";
  // Pinned model identifiers. Endpoint backends send these verbatim so a
  // serving-side upgrade cannot silently change what scored the corpus.
  qeModel: string;
  embedModel: string;
  // Endpoint URLs, used only when backend is "endpoint".
  qeUrl: string;
  embedUrl: string;
  translateUrl: string;
  translateModel: string;
  // Batching: requests are issued in chunks of this many records.
  batchSize: number;
  // Whether to compute roundtrip similarity (needs a translator).
  roundtrip: boolean;
}

export const DEFAULT_CONFIG: ScorerConfig = {
  backend: "surrogate",
  qeModel: "Unbabel/wmt22-cometkiwi-da",
  embedModel: "BAAI/bge-m3",
  qeUrl: "",
  embedUrl: "",
  translateUrl: "",
  translateModel: "",
  batchSize: 16,
  roundtrip: false,
};

export interface RunManifest {
  config: ScorerConfig;
  input_path: string;
  output_path: string;
  records_in: number;
  records_out: number;
  errors: number;
  fields_added: string[];
}

export function validateConfig(config: ScorerConfig): string[] {
  const problems: string[] = [];
  if (!Number.isInteger(config.batchSize) || config.batchSize < 1) {
    problems.push("batchSize must be a positive integer");
  }
  if (config.backend === "endpoint") {
    if (config.qeUrl === "") {
      problems.push("endpoint backend needs qeUrl");
    }
    if (config.embedUrl === "") {
      problems.push("endpoint backend needs embedUrl");
    }
  }
  if (config.roundtrip && config.translateUrl === "" && config.backend === "endpoint") {
    problems.push("roundtrip scoring on the endpoint backend needs translateUrl");
  }
  return problems;
}
