export { ParagraphRecord, ParseIssue, ParseResult, parseRecords, serializeRecords, withFields } from "./records.js";
export { tagPos, tokenize, PTB_TAGS } from "./tagger.js";
export {
  EmbeddingBackend,
  EndpointEmbedding,
  HashedNgramEmbedding,
  HashedNgramOptions,
  cosine,
  dot,
  embedSimilarity,
} from "./embeddings.js";
export { EndpointQe, QeBackend, QePair, SurrogateQe } from "./qe.js";
export { EndpointTranslator, RoundtripItem, Translator, roundtripSimilarity } from "./roundtrip.js";
export { Backends, ErrorRow, ScoreOutcome, scoreRecords } from "./score.js";
export { DEFAULT_CONFIG, RunManifest, ScorerConfig, validateConfig } from "./config.js";
export { CliArgs, InputError, buildBackends, main, parseArgs, runScorer } from "./cli.js";
