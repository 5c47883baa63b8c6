"""Shared builders for test corpora."""

from __future__ import annotations

import pytest

from transfluency.corpus import ParagraphRecord


def make_record(**overrides) -> ParagraphRecord:
    """A valid translated record; word_count and pos_tags track english_text."""
    fields = {
        "record_id": "b1:p1:v1",
        "book_id": "b1",
        "work_id": "w1",
        "class_label": "translated",
        "source_lang": "de",
        "source_text": "ein haus am fluss",
        "english_text": "a house by the river",
        "source_type": "human",
        "variant_index": 1,
        "n_variants": 1,
        "comet_kiwi": 0.8,
        "align_sim": 0.9,
    }
    fields.update(overrides)
    words = fields["english_text"].split()
    fields.setdefault("word_count", len(words))
    fields.setdefault("pos_tags", tuple(["NN"] * len(words)))
    if isinstance(fields["pos_tags"], list):
        fields["pos_tags"] = tuple(fields["pos_tags"])
    return ParagraphRecord(**fields)


def make_original(**overrides) -> ParagraphRecord:
    fields = {
        "record_id": "en1:p1:v1",
        "book_id": "en1",
        "work_id": "w-en1",
        "class_label": "original",
        "source_lang": "en-original",
        "source_text": "",
        "english_text": "the river ran quiet",
        "source_type": "original",
        "variant_index": 1,
        "n_variants": 1,
        "comet_kiwi": None,
        "align_sim": None,
    }
    fields.update(overrides)
    return make_record(**fields)


@pytest.fixture
def record():
    return make_record()
