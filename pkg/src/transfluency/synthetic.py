"""Seeded synthetic corpus generator for demos and end-to-end tests.

Paragraphs are nonsense English with class-dependent POS transition
statistics, so the classifier has real signal to find. Quality and alignment
scores follow simple source-type and length effects. Same config, same corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import ParagraphRecord

TAGS = ("DT", "NN", "NNS", "VB", "VBD", "JJ", "IN", "PRP", "RB", "CC", ",", ".")

_TAG_WORDS = {
    "DT": ("the", "a", "this", "that"),
    "NN": ("house", "river", "letter", "evening", "garden", "voice"),
    "NNS": ("years", "hands", "streets", "words"),
    "VB": ("go", "see", "take", "write"),
    "VBD": ("said", "walked", "looked", "wrote"),
    "JJ": ("old", "quiet", "dark", "small"),
    "IN": ("in", "of", "with", "under"),
    "PRP": ("he", "she", "it", "they"),
    "RB": ("slowly", "again", "never", "almost"),
    "CC": ("and", "but", "or"),
    ",": (",",),
    ".": (".",),
}

_BASE_TRANSITIONS = {
    ("DT", "NN"): 6.0, ("DT", "JJ"): 3.0, ("DT", "NNS"): 2.0,
    ("JJ", "NN"): 5.0, ("JJ", "NNS"): 2.0,
    ("NN", "VBD"): 3.0, ("NN", "IN"): 2.0, ("NN", ","): 1.5, ("NN", "."): 2.0,
    ("NNS", "VBD"): 3.0, ("NNS", "IN"): 2.0, ("NNS", "."): 1.5,
    ("VBD", "IN"): 2.0, ("VBD", "DT"): 2.5, ("VBD", "RB"): 1.5,
    ("VB", "DT"): 2.5, ("VB", "IN"): 1.5,
    ("IN", "DT"): 4.0, ("IN", "NN"): 2.0, ("IN", "PRP"): 1.5,
    ("PRP", "VBD"): 4.0, ("PRP", "VB"): 1.5, ("PRP", "RB"): 1.5,
    ("RB", "VBD"): 2.0, ("RB", "VB"): 1.5,
    ("CC", "PRP"): 2.0, ("CC", "DT"): 2.0,
    (",", "PRP"): 2.0, (",", "CC"): 1.5, (",", "DT"): 1.5,
    (".", "PRP"): 2.0, (".", "DT"): 2.5,
}

# multiplicative tweaks that give the translated class its own n-gram texture
_TRANSLATED_TWEAKS = {
    ("DT", "NN"): 1.8, ("IN", "DT"): 1.7, ("NN", "IN"): 1.8,
    ("PRP", "VBD"): 0.45, ("VBD", "RB"): 0.4, ("PRP", "RB"): 0.4,
    ("NN", ","): 1.6, (",", "CC"): 1.7,
}

_ORIGINAL_TWEAKS = {
    ("PRP", "VBD"): 1.6, ("VBD", "RB"): 1.7, ("RB", "VBD"): 1.5,
    ("DT", "NN"): 0.6, ("NN", "IN"): 0.55, (",", "PRP"): 1.5,
}

_SOURCE_WORDS = {
    "de": ("haus", "fluss", "abend", "stimme", "garten", "und", "der", "alte"),
    "fr": ("maison", "riviere", "soir", "voix", "jardin", "et", "vieille"),
    "ru": ("dom", "reka", "vecher", "golos", "sad", "staryj"),
    "ja": ("ie", "kawa", "yube", "koe", "niwa", "furui"),
    "pl": ("dom", "rzeka", "wieczor", "glos", "ogrod", "stary"),
    "hu": ("haz", "folyo", "este", "hang", "kert", "regi"),
    "it": ("casa", "fiume", "sera", "voce", "giardino", "vecchia"),
}

_QUALITY_BASE = {"human": 0.82, "llm": 0.76, "google": 0.68}


@dataclass(frozen=True)
class SyntheticConfig:
    languages: tuple[str, ...] = ("de", "fr", "ru", "ja")
    books_per_language: int = 4
    rare_languages: tuple[str, ...] = ("pl", "hu")
    books_per_rare_language: int = 1
    n_original_books: int = 12
    paragraphs_per_book: int = 10
    duplicate_work_books: int = 0
    p_llm_overlong: float = 0.03
    p_low_align: float = 0.03
    seed: int = 0


def _transition_matrix(tweaks: dict) -> np.ndarray:
    n = len(TAGS)
    w = np.ones((n, n), dtype=np.float64)
    for (a, b), v in _BASE_TRANSITIONS.items():
        w[TAGS.index(a), TAGS.index(b)] = v
    for (a, b), v in tweaks.items():
        w[TAGS.index(a), TAGS.index(b)] *= v
    np.fill_diagonal(w, w.diagonal() * 0.3)  # discourage runs of one tag
    return w / w.sum(axis=1, keepdims=True)


_MATRICES = {
    "translated": _transition_matrix(_TRANSLATED_TWEAKS),
    "original": _transition_matrix(_ORIGINAL_TWEAKS),
}
_START = np.array([3.0 if t in ("DT", "PRP") else 1.0 if t not in (",", ".") else 0.05 for t in TAGS])
_START = _START / _START.sum()


def _draw_length(rng: np.random.Generator) -> int:
    return int(np.clip(round(rng.lognormal(mean=3.65, sigma=0.65)), 8, 300))


def _make_paragraph(rng: np.random.Generator, class_label: str, n_words: int) -> tuple[tuple[str, ...], str]:
    matrix = _MATRICES[class_label]
    tags = []
    idx = int(rng.choice(len(TAGS), p=_START))
    for _ in range(n_words):
        tags.append(TAGS[idx])
        idx = int(rng.choice(len(TAGS), p=matrix[idx]))
    words = [ _TAG_WORDS[t][int(rng.integers(len(_TAG_WORDS[t])))] for t in tags ]
    return tuple(tags), " ".join(words)


def _source_text(rng: np.random.Generator, lang: str, n_words: int) -> str:
    pool = _SOURCE_WORDS.get(lang, ("lorem", "ipsum", "dolor", "sit"))
    return " ".join(pool[int(rng.integers(len(pool)))] for _ in range(max(3, n_words)))


def _quality(rng: np.random.Generator, source_type: str, n_words: int) -> float:
    base = _QUALITY_BASE[source_type]
    v = base - 0.05 * (n_words - 40) / 100.0 + rng.normal(0.0, 0.06)
    return float(np.clip(v, 0.02, 0.98))


def generate_corpus(config: SyntheticConfig = SyntheticConfig()) -> list[ParagraphRecord]:
    rng = np.random.default_rng(config.seed)
    records: list[ParagraphRecord] = []

    lang_books = [(lang, i) for lang in config.languages for i in range(config.books_per_language)]
    lang_books += [(lang, i) for lang in config.rare_languages for i in range(config.books_per_rare_language)]

    dup_budget = config.duplicate_work_books
    for lang, i in lang_books:
        book_id = f"{lang}-b{i:03d}"
        if dup_budget > 0 and i == 0 and lang != lang_books[0][0]:
            # reuse the first language's first work to exercise deduplication
            work_id = f"work-{lang_books[0][0]}-0"
            dup_budget -= 1
        else:
            work_id = f"work-{lang}-{i}"
        for p in range(config.paragraphs_per_book):
            src_len = _draw_length(rng)
            source_text = _source_text(rng, lang, src_len)
            n_human = 1 + int(rng.integers(2))
            variants = ["human"] * n_human + ["google", "llm"]
            n_variants = len(variants)
            google_words = None
            for v_idx, source_type in enumerate(variants, start=1):
                n_words = _draw_length(rng)
                if source_type == "google":
                    google_words = n_words
                elif source_type == "llm" and google_words is not None:
                    if rng.random() < config.p_llm_overlong:
                        n_words = google_words + 140
                    else:
                        n_words = max(8, google_words + int(rng.integers(-5, 6)))
                tags, text = _make_paragraph(rng, "translated", n_words)
                align = float(np.clip(rng.normal(0.82, 0.07), -1.0, 1.0))
                if rng.random() < config.p_low_align:
                    align = float(rng.uniform(0.15, 0.42))
                records.append(
                    ParagraphRecord(
                        record_id=f"{book_id}:p{p:03d}:v{v_idx}",
                        book_id=book_id,
                        work_id=work_id,
                        class_label="translated",
                        source_lang=lang,
                        source_text=source_text,
                        english_text=text,
                        source_type=source_type,
                        variant_index=v_idx,
                        n_variants=n_variants,
                        pos_tags=tags,
                        word_count=n_words,
                        comet_kiwi=_quality(rng, source_type, n_words),
                        align_sim=align,
                        roundtrip_sim=float(np.clip(rng.normal(0.74, 0.08), -1.0, 1.0))
                        if rng.random() < 0.5
                        else None,
                    )
                )

    for i in range(config.n_original_books):
        book_id = f"en-b{i:03d}"
        for p in range(config.paragraphs_per_book):
            n_words = _draw_length(rng)
            tags, text = _make_paragraph(rng, "original", n_words)
            records.append(
                ParagraphRecord(
                    record_id=f"{book_id}:p{p:03d}:v1",
                    book_id=book_id,
                    work_id=f"work-en-{i}",
                    class_label="original",
                    source_lang="en-original",
                    source_text="",
                    english_text=text,
                    source_type="original",
                    variant_index=1,
                    n_variants=1,
                    pos_tags=tags,
                    word_count=n_words,
                )
            )
    return records


def main(argv=None) -> int:
    import argparse

    from .corpus import write_records

    parser = argparse.ArgumentParser(description="write a seeded synthetic corpus as NDJSON")
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--paragraphs-per-book", type=int, default=10)
    args = parser.parse_args(argv)
    config = SyntheticConfig(seed=args.seed, paragraphs_per_book=args.paragraphs_per_book)
    records = generate_corpus(config)
    write_records(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
