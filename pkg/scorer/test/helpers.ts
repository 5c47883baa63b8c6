// Shared fixture builders and a small rank-correlation oracle for tests.

export interface PairFixture {
  recordId: string;
  source: string;
  english: string;
}

const TOPICS = [
  "lantern", "harbor", "orchard", "monastery", "sledge", "samovar", "veranda",
  "troika", "iconostasis", "birchwood", "granary", "steppe", "carriage",
  "chapel", "tavern", "estate", "garrison", "pavilion", "threshold", "corridor",
  "courtyard", "fireplace", "staircase", "gymnasium", "refectory", "bathhouse",
  "watchtower", "marketplace", "riverbank", "crossroads",
] as const;

const PLACES = [
  "okhotsk", "tversk", "mologa", "irbit", "kashira", "vyazma", "belyov",
  "kozelsk", "ruza", "serpukhov", "toropets", "galich", "soligalich",
  "chukhloma", "vetluga", "varnavin", "makaryev", "kineshma", "yurevets",
  "lukh", "shuya", "kovrov", "sudogda", "melenki", "kasimov", "elatma",
  "spassk", "temnikov", "krasnoslobodsk", "insar",
] as const;

/**
 * Thirty aligned source/English pairs. Each pair shares its topic and place
 * words, the way names and borrowed terms survive real translation, while
 * different records use disjoint topics and places.
 */
export function buildPairFixtures(): PairFixture[] {
  const fixtures: PairFixture[] = [];
  for (let i = 0; i < 30; i++) {
    const topic = TOPICS[i] as string;
    const place = PLACES[i] as string;
    fixtures.push({
      recordId: `fx-${i + 1}`,
      source: `im ${topic}haus bei ${place} stand der alte ${topic} nahe dem ufer von ${place}`,
      english: `the old ${topic} stood in the ${topic} house near the bank at ${place}`,
    });
  }
  return fixtures;
}

/** Corrupt a sentence by replacing its first `k` words with junk tokens. */
export function corruptWords(text: string, k: number): string {
  const words = text.split(" ");
  for (let i = 0; i < Math.min(k, words.length); i++) {
    words[i] = `zzq${i}x`;
  }
  return words.join(" ");
}

/** Deterministically reorder words; guaranteed to differ for 3+ words. */
export function shuffleWords(text: string): string {
  const words = text.split(" ");
  if (words.length < 2) {
    return text;
  }
  const rotated = [...words.slice(1), words[0] as string];
  return rotated.reverse().join(" ");
}

function ranks(values: number[]): number[] {
  const order = values.map((v, i) => [v, i] as const).sort((a, b) => a[0] - b[0]);
  const out = new Array<number>(values.length).fill(0);
  let i = 0;
  while (i < order.length) {
    let j = i;
    while (j + 1 < order.length && (order[j + 1] as [number, number])[0] === (order[i] as [number, number])[0]) {
      j += 1;
    }
    const avg = (i + j) / 2 + 1;
    for (let k = i; k <= j; k++) {
      out[(order[k] as [number, number])[1]] = avg;
    }
    i = j + 1;
  }
  return out;
}

/** Spearman rank correlation with average ranks for ties. */
export function spearman(x: number[], y: number[]): number {
  if (x.length !== y.length || x.length < 3) {
    throw new Error("need two equal-length lists of 3+ values");
  }
  const rx = ranks(x);
  const ry = ranks(y);
  const n = x.length;
  const meanX = rx.reduce((a, b) => a + b, 0) / n;
  const meanY = ry.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    const dx = (rx[i] as number) - meanX;
    const dy = (ry[i] as number) - meanY;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx === 0 || syy === 0) {
    return 0;
  }
  return sxy / Math.sqrt(sxx * syy);
}
