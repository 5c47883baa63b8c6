"""POS n-gram featurization: capped vocabulary, smoothed idf, TF-IDF or raw counts."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import sparse

Gram = tuple[str, ...]

WEIGHTINGS = ("tfidf", "count")


@dataclass(frozen=True)
class FeatureConfig:
    weighting: str = "tfidf"
    n_min: int = 1
    n_max: int = 3
    max_features: int = 20000

    def __post_init__(self):
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")
        if self.n_min < 1 or self.n_min > self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")


@dataclass(frozen=True)
class Vocabulary:
    """Dense gram -> column mapping; indices follow lexicographic gram order."""

    entries: dict[Gram, int]
    max_features: int
    corpus_freq: dict[Gram, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class FeatureMatrix:
    """Sparse row-major document-term matrix plus the weighting that produced it."""

    matrix: sparse.csr_matrix
    weighting: str
    idf: Optional[np.ndarray] = None

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    def triplets(self) -> list[tuple[int, int, float]]:
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))


def extract_ngrams(pos_tags: Sequence[str], n_min: int = 1, n_max: int = 3) -> Counter:
    """All contiguous n-grams for n in [n_min, n_max], with multiplicities."""
    if n_min < 1 or n_min > n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    if not pos_tags:
        raise ValueError("cannot extract n-grams from an empty tag sequence")
    tags = tuple(pos_tags)
    grams: Counter = Counter()
    for n in range(n_min, n_max + 1):
        for i in range(len(tags) - n + 1):
            grams[tags[i : i + n]] += 1
    return grams


def build_vocabulary(corpus: Iterable[Counter], max_features: int = 20000) -> Vocabulary:
    """Keep the max_features grams with highest total corpus frequency.

    Ties at the cutoff go to the lexicographically smaller gram; column indices
    are assigned in lexicographic gram order.
    """
    totals: Counter = Counter()
    n_docs = 0
    for doc in corpus:
        totals.update(doc)
        n_docs += 1
    if n_docs == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    selected = sorted(g for g, _ in ranked)
    entries = {g: i for i, g in enumerate(selected)}
    return Vocabulary(
        entries=entries,
        max_features=max_features,
        corpus_freq={g: totals[g] for g in selected},
    )


def fit_idf(corpus: Iterable[Counter], vocab: Vocabulary) -> np.ndarray:
    """Smoothed idf: ln((1+N)/(1+df)) + 1 per vocabulary column."""
    df = np.zeros(len(vocab), dtype=np.int64)
    n_docs = 0
    for doc in corpus:
        n_docs += 1
        for gram in doc:
            col = vocab.entries.get(gram)
            if col is not None:
                df[col] += 1
    if n_docs == 0:
        raise ValueError("cannot fit idf on an empty corpus")
    if np.any(df == 0):
        missing = [g for g, i in vocab.entries.items() if df[i] == 0]
        raise ValueError(f"vocabulary grams absent from the corpus: {missing[:3]}")
    return np.log((1.0 + n_docs) / (1.0 + df)) + 1.0


def vectorize(
    doc: Counter,
    vocab: Vocabulary,
    weighting: str = "tfidf",
    idf: Optional[np.ndarray] = None,
) -> sparse.csr_matrix:
    """One sparse row; tfidf rows are L2-normalized, out-of-vocabulary grams ignored."""
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    if weighting == "tfidf" and idf is None:
        raise ValueError("tfidf weighting requires an idf vector")
    cols, vals = [], []
    for gram, count in doc.items():
        col = vocab.entries.get(gram)
        if col is not None:
            cols.append(col)
            vals.append(float(count))
    row = sparse.csr_matrix(
        (vals, ([0] * len(cols), cols)), shape=(1, len(vocab)), dtype=np.float64
    )
    if weighting == "tfidf":
        row = row.multiply(idf).tocsr()
        norm = np.sqrt(row.multiply(row).sum())
        if norm > 0:
            row = row.multiply(1.0 / norm).tocsr()
    return row


def vectorize_corpus(
    docs: Sequence[Counter],
    vocab: Vocabulary,
    weighting: str = "tfidf",
    idf: Optional[np.ndarray] = None,
) -> FeatureMatrix:
    """Stacked document-term matrix for a list of gram multisets."""
    if weighting == "tfidf" and idf is None:
        raise ValueError("tfidf weighting requires an idf vector")
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        cols = sorted(
            (vocab.entries[g], float(c)) for g, c in doc.items() if g in vocab.entries
        )
        indices.extend(c for c, _ in cols)
        data.extend(v for _, v in cols)
        indptr.append(len(indices))
    mat = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(docs), len(vocab)),
    )
    if weighting == "tfidf":
        mat = mat.multiply(np.asarray(idf)).tocsr()
        norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        mat = sparse.diags(scale).dot(mat).tocsr()
        return FeatureMatrix(matrix=mat, weighting="tfidf", idf=np.asarray(idf, dtype=np.float64))
    return FeatureMatrix(matrix=mat, weighting="count")


def vocabulary_hash(vocab: Vocabulary, idf: Optional[np.ndarray] = None) -> str:
    """Content hash binding a model artifact to the vocabulary (and idf) it was trained on."""
    payload = {
        "entries": [[" ".join(g), i] for g, i in sorted(vocab.entries.items())],
        "idf": None if idf is None else [float(v) for v in idf],
    }
    blob = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def dump_vocabulary_csv(vocab: Vocabulary, idf: Optional[np.ndarray], path) -> None:
    """Inspection dump: gram, column index, corpus frequency, idf."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("gram,index,corpus_freq,idf\n")
        for gram in sorted(vocab.entries):
            i = vocab.entries[gram]
            freq = vocab.corpus_freq.get(gram, "")
            idf_val = "" if idf is None else repr(float(idf[i]))
            fh.write(f"{' '.join(gram)},{i},{freq},{idf_val}\n")
