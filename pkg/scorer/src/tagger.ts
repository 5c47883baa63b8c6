// Deterministic rule-based part-of-speech tagger emitting Penn Treebank tags.
//
// The tagger owns its tokenization: callers get exactly one tag per token of
// that tokenization, in order. Quotation marks are not tokens here; they carry
// no syntactic signal for the downstream analysis, so "Ivan asked ..." tags
// the same with or without surrounding quotes. Everything is table- and
// suffix-driven, so the same input always yields the same tags.

const PUNCT_TAGS: ReadonlyMap<string, string> = new Map([
  [".", "."],
  ["!", "."],
  ["?", "."],
  [",", ","],
  [";", ":"],
  [":", ":"],
  ["...", ":"],
  ["…", ":"],
  ["-", ":"],
  ["–", ":"],
  ["—", ":"],
  ["(", "-LRB-"],
  [")", "-RRB-"],
  ["[", "-LRB-"],
  ["]", "-RRB-"],
  ["{", "-LRB-"],
  ["}", "-RRB-"],
  ["#", "#"],
  ["$", "$"],
]);

// Closed-class words looked up case-insensitively. Lexicon beats every other
// rule, so sentence-initial "The" stays DT instead of drifting to NNP.
const LEXICON: ReadonlyMap<string, string> = new Map([
  // determiners
  ["the", "DT"],
  ["a", "DT"],
  ["an", "DT"],
  ["this", "DT"],
  ["that", "DT"],
  ["these", "DT"],
  ["those", "DT"],
  ["each", "DT"],
  ["every", "DT"],
  ["some", "DT"],
  ["any", "DT"],
  ["no", "DT"],
  ["all", "DT"],
  ["both", "DT"],
  ["another", "DT"],
  // coordinating conjunctions
  ["and", "CC"],
  ["or", "CC"],
  ["but", "CC"],
  ["nor", "CC"],
  ["yet", "CC"],
  // the infinitive marker
  ["to", "TO"],
  // prepositions and subordinating conjunctions
  ["in", "IN"],
  ["at", "IN"],
  ["on", "IN"],
  ["for", "IN"],
  ["with", "IN"],
  ["by", "IN"],
  ["from", "IN"],
  ["of", "IN"],
  ["as", "IN"],
  ["into", "IN"],
  ["onto", "IN"],
  ["over", "IN"],
  ["under", "IN"],
  ["about", "IN"],
  ["after", "IN"],
  ["before", "IN"],
  ["between", "IN"],
  ["during", "IN"],
  ["against", "IN"],
  ["through", "IN"],
  ["upon", "IN"],
  ["without", "IN"],
  ["within", "IN"],
  ["among", "IN"],
  ["because", "IN"],
  ["if", "IN"],
  ["while", "IN"],
  ["since", "IN"],
  ["until", "IN"],
  ["although", "IN"],
  ["though", "IN"],
  ["than", "IN"],
  ["like", "IN"],
  ["near", "IN"],
  ["toward", "IN"],
  ["towards", "IN"],
  ["behind", "IN"],
  ["beside", "IN"],
  ["beyond", "IN"],
  ["across", "IN"],
  ["along", "IN"],
  ["around", "IN"],
  // personal pronouns
  ["i", "PRP"],
  ["you", "PRP"],
  ["he", "PRP"],
  ["she", "PRP"],
  ["it", "PRP"],
  ["we", "PRP"],
  ["they", "PRP"],
  ["me", "PRP"],
  ["him", "PRP"],
  ["her", "PRP"],
  ["us", "PRP"],
  ["them", "PRP"],
  ["himself", "PRP"],
  ["herself", "PRP"],
  ["itself", "PRP"],
  ["myself", "PRP"],
  ["yourself", "PRP"],
  ["themselves", "PRP"],
  ["ourselves", "PRP"],
  // possessive pronouns
  ["my", "PRP$"],
  ["your", "PRP$"],
  ["his", "PRP$"],
  ["its", "PRP$"],
  ["our", "PRP$"],
  ["their", "PRP$"],
  ["hers", "PRP$"],
  ["mine", "PRP$"],
  ["yours", "PRP$"],
  ["theirs", "PRP$"],
  ["ours", "PRP$"],
  // wh-words
  ["who", "WP"],
  ["whom", "WP"],
  ["whose", "WP$"],
  ["which", "WDT"],
  ["what", "WP"],
  ["where", "WRB"],
  ["when", "WRB"],
  ["why", "WRB"],
  ["how", "WRB"],
  // modals
  ["will", "MD"],
  ["would", "MD"],
  ["can", "MD"],
  ["could", "MD"],
  ["may", "MD"],
  ["might", "MD"],
  ["shall", "MD"],
  ["should", "MD"],
  ["must", "MD"],
  // forms of be, have, do
  ["be", "VB"],
  ["am", "VBP"],
  ["is", "VBZ"],
  ["are", "VBP"],
  ["was", "VBD"],
  ["were", "VBD"],
  ["been", "VBN"],
  ["being", "VBG"],
  ["have", "VBP"],
  ["has", "VBZ"],
  ["had", "VBD"],
  ["having", "VBG"],
  ["do", "VBP"],
  ["does", "VBZ"],
  ["did", "VBD"],
  ["done", "VBN"],
  ["doing", "VBG"],
  // frequent adverbs and particles that morphology misses
  ["not", "RB"],
  ["never", "RB"],
  ["always", "RB"],
  ["often", "RB"],
  ["again", "RB"],
  ["here", "RB"],
  ["now", "RB"],
  ["then", "RB"],
  ["there", "EX"],
  ["very", "RB"],
  ["too", "RB"],
  ["also", "RB"],
  ["just", "RB"],
  ["still", "RB"],
  ["soon", "RB"],
  ["already", "RB"],
  ["almost", "RB"],
  ["perhaps", "RB"],
  ["quite", "RB"],
  ["rather", "RB"],
  ["so", "RB"],
  ["up", "RP"],
  ["down", "RP"],
  ["out", "RP"],
  ["off", "RP"],
  ["away", "RB"],
  ["back", "RB"],
  // interjections
  ["oh", "UH"],
  ["ah", "UH"],
  ["yes", "UH"],
  ["well", "UH"],
  // a few common adjectives that suffix rules would misread
  ["good", "JJ"],
  ["old", "JJ"],
  ["little", "JJ"],
  ["own", "JJ"],
  ["new", "JJ"],
  ["great", "JJ"],
  ["long", "JJ"],
  ["small", "JJ"],
  ["last", "JJ"],
  ["first", "JJ"],
  ["other", "JJ"],
  ["same", "JJ"],
  ["such", "JJ"],
  ["few", "JJ"],
  ["many", "JJ"],
  ["much", "JJ"],
  ["more", "JJR"],
  ["most", "JJS"],
  ["less", "JJR"],
  ["least", "JJS"],
  ["one", "CD"],
  ["two", "CD"],
  ["three", "CD"],
  ["four", "CD"],
  ["five", "CD"],
  ["six", "CD"],
  ["seven", "CD"],
  ["eight", "CD"],
  ["nine", "CD"],
  ["ten", "CD"],
]);

// Clitics split off the host word, each with a fixed tag.
const CLITICS: ReadonlyArray<readonly [string, string]> = [
  ["n't", "RB"],
  ["'ll", "MD"],
  ["'ve", "VBP"],
  ["'re", "VBP"],
  ["'d", "MD"],
  ["'m", "VBP"],
  ["'s", "POS"],
];

const QUOTE_CHARS = new Set(['"', "“", "”", "‘", "’", "`", "'"]);

const WORD_CHAR = /[A-Za-z0-9]/;

function isQuoteRun(piece: string): boolean {
  for (const ch of piece) {
    if (!QUOTE_CHARS.has(ch)) {
      return false;
    }
  }
  return piece.length > 0;
}

function splitPiece(piece: string, out: string[]): void {
  if (piece === "") {
    return;
  }
  if (isQuoteRun(piece)) {
    return; // quotation marks are not tokens
  }
  if (PUNCT_TAGS.has(piece)) {
    out.push(piece);
    return;
  }
  // Peel leading punctuation and quotes.
  const first = piece[0] as string;
  if (!WORD_CHAR.test(first)) {
    if (!QUOTE_CHARS.has(first)) {
      out.push(first);
    }
    splitPiece(piece.slice(1), out);
    return;
  }
  // Peel trailing punctuation and quotes, ellipses first so "today..." keeps
  // the three dots together as one token.
  if (piece.endsWith("...")) {
    splitPiece(piece.slice(0, -3), out);
    out.push("...");
    return;
  }
  const last = piece[piece.length - 1] as string;
  if (!WORD_CHAR.test(last)) {
    // An apostrophe inside a word is part of it ("don't"); only peel it when
    // it is terminal, where it is a closing quote.
    splitPiece(piece.slice(0, -1), out);
    if (!QUOTE_CHARS.has(last)) {
      out.push(last);
    }
    return;
  }
  // Split clitics off the end of the remaining word.
  const lower = piece.toLowerCase();
  for (const [clitic] of CLITICS) {
    if (lower.endsWith(clitic) && lower.length > clitic.length) {
      out.push(piece.slice(0, piece.length - clitic.length));
      out.push(piece.slice(piece.length - clitic.length));
      return;
    }
  }
  out.push(piece);
}

/** Split text into the tagger's own tokens. Quote characters are dropped. */
export function tokenize(text: string): string[] {
  const tokens: string[] = [];
  for (const piece of text.split(/\s+/)) {
    splitPiece(piece, tokens);
  }
  return tokens;
}

const NUMBER_RE = /^[0-9]+([.,][0-9]+)*$/;

function tagToken(token: string): string {
  const punct = PUNCT_TAGS.get(token);
  if (punct !== undefined) {
    return punct;
  }
  const lower = token.toLowerCase();
  for (const [clitic, tag] of CLITICS) {
    if (lower === clitic) {
      return tag;
    }
  }
  const fromLexicon = LEXICON.get(lower);
  if (fromLexicon !== undefined) {
    return fromLexicon;
  }
  if (NUMBER_RE.test(token)) {
    return "CD";
  }
  // Unknown capitalized words are proper nouns; the lexicon already caught
  // capitalized function words.
  if (/^[A-Z]/.test(token)) {
    return /s$/.test(token) && token.length > 2 && !/ss$/.test(token) ? "NNPS" : "NNP";
  }
  // Suffix morphology for open-class words.
  if (lower.length > 3 && lower.endsWith("ly")) {
    return "RB";
  }
  if (lower.length > 4 && lower.endsWith("ing")) {
    return "VBG";
  }
  if (lower.length > 3 && lower.endsWith("ed")) {
    return "VBD";
  }
  if (lower.length > 4 && lower.endsWith("est")) {
    return "JJS";
  }
  if (lower.length > 4 && (lower.endsWith("ous") || lower.endsWith("ful") || lower.endsWith("ive") || lower.endsWith("able"))) {
    return "JJ";
  }
  if (lower.length > 2 && lower.endsWith("s") && !lower.endsWith("ss") && !lower.endsWith("us") && !lower.endsWith("is")) {
    return "NNS";
  }
  return "NN";
}

/**
 * Tag text with Penn Treebank part-of-speech tags, one per token of this
 * module's own tokenization, in order. Empty input gives an empty list.
 */
export function tagPos(text: string): string[] {
  const tokens = tokenize(text);
  const tags = tokens.map(tagToken);
  // One context pass: a bare noun right after the infinitive marker is a verb
  // ("to meet"), while lexicon words keep their tags ("to the inn").
  for (let i = 1; i < tags.length; i++) {
    if (tags[i - 1] === "TO" && tags[i] === "NN") {
      tags[i] = "VB";
    }
  }
  return tags;
}

// The full Penn Treebank tagset this tagger can emit, for membership checks.
export const PTB_TAGS: ReadonlySet<string> = new Set([
  "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD",
  "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",
  "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ",
  "WDT", "WP", "WP$", "WRB", ".", ",", ":", "-LRB-", "-RRB-", "#", "$",
  "``", "''",
]);
