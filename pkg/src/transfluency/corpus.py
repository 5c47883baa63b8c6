"""Corpus record schema, NDJSON ingestion, work dedup, and length filtering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import IO, Iterable, Iterator, Optional, Union

CLASS_LABELS = ("original", "translated")
SOURCE_TYPES = ("human", "google", "llm", "original")

REQUIRED_FIELDS = (
    "record_id",
    "book_id",
    "work_id",
    "class_label",
    "source_lang",
    "source_text",
    "english_text",
    "source_type",
    "variant_index",
    "n_variants",
    "pos_tags",
    "word_count",
)
OPTIONAL_FIELDS = ("comet_kiwi", "align_sim", "roundtrip_sim")


@dataclass(frozen=True)
class ParagraphRecord:
    """One aligned (source, English) paragraph pair, or one original-English paragraph."""

    record_id: str
    book_id: str
    work_id: str
    class_label: str
    source_lang: str
    source_text: str
    english_text: str
    source_type: str
    variant_index: int
    n_variants: int
    pos_tags: tuple[str, ...]
    word_count: int
    comet_kiwi: Optional[float] = None
    align_sim: Optional[float] = None
    roundtrip_sim: Optional[float] = None


@dataclass(frozen=True)
class BookEntry:
    book_id: str
    work_id: str
    source_lang: str
    class_label: str
    n_paragraphs: int


@dataclass(frozen=True)
class SchemaError:
    """One rejected input line: where it failed and why."""

    line_no: int
    reason: str
    field: Optional[str] = None


def count_words(text: str) -> int:
    """Number of maximal non-whitespace runs (Unicode whitespace)."""
    return len(text.split())


def _validate(raw: dict, line_no: int) -> Union[ParagraphRecord, SchemaError]:
    for name in REQUIRED_FIELDS:
        if name not in raw:
            return SchemaError(line_no, f"missing required field '{name}'", name)
    unknown = set(raw) - set(REQUIRED_FIELDS) - set(OPTIONAL_FIELDS)
    if unknown:
        name = sorted(unknown)[0]
        return SchemaError(line_no, f"unknown field '{name}'", name)

    for name in ("record_id", "book_id", "work_id", "source_lang", "source_text", "english_text"):
        if not isinstance(raw[name], str):
            return SchemaError(line_no, f"'{name}' must be a string", name)
    for name in ("variant_index", "n_variants", "word_count"):
        if not isinstance(raw[name], int) or isinstance(raw[name], bool):
            return SchemaError(line_no, f"'{name}' must be an integer", name)

    if raw["class_label"] not in CLASS_LABELS:
        return SchemaError(line_no, f"class_label must be one of {CLASS_LABELS}", "class_label")
    if raw["source_type"] not in SOURCE_TYPES:
        return SchemaError(line_no, f"source_type must be one of {SOURCE_TYPES}", "source_type")

    pos_tags = raw["pos_tags"]
    if isinstance(pos_tags, str):
        tags = tuple(pos_tags.split())
    elif isinstance(pos_tags, list) and all(isinstance(t, str) for t in pos_tags):
        tags = tuple(pos_tags)
    else:
        return SchemaError(line_no, "pos_tags must be a string or an array of strings", "pos_tags")

    for name, lo, hi in (("comet_kiwi", 0.0, 1.0), ("align_sim", -1.0, 1.0), ("roundtrip_sim", -1.0, 1.0)):
        v = raw.get(name)
        if v is None:
            continue
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            return SchemaError(line_no, f"'{name}' must be a number", name)
        if not lo <= float(v) <= hi:
            return SchemaError(line_no, f"'{name}' out of range [{lo}, {hi}]", name)

    if raw["variant_index"] < 1 or raw["n_variants"] < 1:
        return SchemaError(line_no, "variant_index and n_variants must be >= 1", "variant_index")
    if raw["variant_index"] > raw["n_variants"]:
        return SchemaError(line_no, "variant_index > n_variants", "variant_index")

    if raw["class_label"] == "original":
        for name in OPTIONAL_FIELDS:
            if raw.get(name) is not None:
                return SchemaError(line_no, f"original-class record must not carry '{name}'", name)
        if raw["source_text"] != "":
            return SchemaError(line_no, "original-class record must have empty source_text", "source_text")

    expected = count_words(raw["english_text"])
    if raw["word_count"] != expected:
        return SchemaError(
            line_no,
            f"word_count {raw['word_count']} does not match whitespace token count {expected}",
            "word_count",
        )
    if raw["english_text"] != "" and not tags:
        return SchemaError(line_no, "pos_tags empty for non-empty english_text", "pos_tags")

    return ParagraphRecord(
        record_id=raw["record_id"],
        book_id=raw["book_id"],
        work_id=raw["work_id"],
        class_label=raw["class_label"],
        source_lang=raw["source_lang"],
        source_text=raw["source_text"],
        english_text=raw["english_text"],
        source_type=raw["source_type"],
        variant_index=raw["variant_index"],
        n_variants=raw["n_variants"],
        pos_tags=tags,
        word_count=raw["word_count"],
        comet_kiwi=None if raw.get("comet_kiwi") is None else float(raw["comet_kiwi"]),
        align_sim=None if raw.get("align_sim") is None else float(raw["align_sim"]),
        roundtrip_sim=None if raw.get("roundtrip_sim") is None else float(raw["roundtrip_sim"]),
    )


def _iter_lines(stream: Union[str, bytes, IO, Iterable[str]]) -> Iterator[str]:
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        yield from stream.splitlines()
        return
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line.rstrip("\n").rstrip("\r")


def parse_records(stream: Union[str, bytes, IO, Iterable[str]]) -> tuple[list[ParagraphRecord], list[SchemaError]]:
    """Parse newline-delimited JSON records; malformed lines become SchemaErrors, never drops."""
    records: list[ParagraphRecord] = []
    errors: list[SchemaError] = []
    for line_no, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(SchemaError(line_no, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(raw, dict):
            errors.append(SchemaError(line_no, "line is not a JSON object"))
            continue
        out = _validate(raw, line_no)
        if isinstance(out, SchemaError):
            errors.append(out)
        else:
            records.append(out)
    return records, errors


def record_to_dict(record: ParagraphRecord) -> dict:
    """Serializable dict with pos_tags as an array and optional fields omitted when absent."""
    d = asdict(record)
    d["pos_tags"] = list(record.pos_tags)
    for name in OPTIONAL_FIELDS:
        if d[name] is None:
            del d[name]
    return d


def serialize_records(records: Iterable[ParagraphRecord]) -> str:
    return "".join(json.dumps(record_to_dict(r), ensure_ascii=False) + "\n" for r in records)


def load_records(path) -> tuple[list[ParagraphRecord], list[SchemaError]]:
    with open(path, "rb") as fh:
        return parse_records(fh)


def write_records(records: Iterable[ParagraphRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_records(records))


def dedupe_works(records: list[ParagraphRecord]) -> list[ParagraphRecord]:
    """Keep one translated volume per work: the lexicographically first book_id.

    Original-class books and works with a single volume pass through untouched.
    """
    books_by_work: dict[str, set[str]] = {}
    for r in records:
        if r.class_label == "translated":
            books_by_work.setdefault(r.work_id, set()).add(r.book_id)
    keep = {work: min(books) for work, books in books_by_work.items()}
    return [
        r
        for r in records
        if r.class_label != "translated" or r.book_id == keep[r.work_id]
    ]


def filter_min_length(records: list[ParagraphRecord], min_words: int = 20) -> list[ParagraphRecord]:
    """Keep records with word_count >= min_words (inclusive threshold)."""
    return [r for r in records if r.word_count >= min_words]


def books_from_records(records: Iterable[ParagraphRecord]) -> list[BookEntry]:
    """Aggregate records into per-book entries, checking within-book consistency."""
    by_book: dict[str, list[ParagraphRecord]] = {}
    for r in records:
        by_book.setdefault(r.book_id, []).append(r)
    entries = []
    for book_id in sorted(by_book):
        rs = by_book[book_id]
        first = rs[0]
        for r in rs[1:]:
            if (r.work_id, r.source_lang, r.class_label) != (first.work_id, first.source_lang, first.class_label):
                raise ValueError(
                    f"book '{book_id}' mixes work/language/class assignments"
                )
        entries.append(
            BookEntry(
                book_id=book_id,
                work_id=first.work_id,
                source_lang=first.source_lang,
                class_label=first.class_label,
                n_paragraphs=len(rs),
            )
        )
    return entries
