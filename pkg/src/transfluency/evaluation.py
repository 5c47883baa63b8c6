"""Book-grouped, language-stratified cross-validation and classifier metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classifier import TrainConfig, TrainedModel, predict_proba_matrix, train
from .corpus import BookEntry, ParagraphRecord
from .features import (
    FeatureConfig,
    Vocabulary,
    build_vocabulary,
    extract_ngrams,
    fit_idf,
    vectorize_corpus,
    vocabulary_hash,
)
from .sampling import WeightedRecord
from .stats import rankdata

RARE_LANGUAGE_LABEL = "rare-languages"
ORIGINAL_STRATUM_LABEL = "en-original"
RARE_BOOK_THRESHOLD = 2  # languages with at most this many translated books are pooled


@dataclass(frozen=True)
class Stratum:
    label: str
    book_ids: tuple[str, ...]


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    book_to_fold: dict[str, int]

    def fold_of(self, book_id: str) -> int:
        return self.book_to_fold[book_id]


def build_strata(books: Sequence[BookEntry]) -> list[Stratum]:
    """Group books by source language; pool sparse languages; originals isolated."""
    translated: dict[str, list[str]] = {}
    originals: list[str] = []
    for b in books:
        if b.class_label == "original":
            originals.append(b.book_id)
        else:
            translated.setdefault(b.source_lang, []).append(b.book_id)
    strata: list[Stratum] = []
    rare: list[str] = []
    for lang in sorted(translated):
        ids = sorted(translated[lang])
        if len(ids) <= RARE_BOOK_THRESHOLD:
            rare.extend(ids)
        else:
            strata.append(Stratum(lang, tuple(ids)))
    if rare:
        strata.append(Stratum(RARE_LANGUAGE_LABEL, tuple(sorted(rare))))
    if originals:
        strata.append(Stratum(ORIGINAL_STRATUM_LABEL, tuple(sorted(originals))))
    strata.sort(key=lambda s: s.label)
    return strata


def make_folds(books: Sequence[BookEntry], k: int = 10, seed: int = 0) -> FoldAssignment:
    """Assign whole books to k folds, round-robin within each language stratum.

    The fold pointer continues across strata so small strata don't all land on
    fold 0. Per stratum the fold sizes differ by at most one book.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(books) < k:
        raise ValueError(f"need at least {k} books for {k} folds, got {len(books)}")
    seen: set[str] = set()
    for b in books:
        if b.book_id in seen:
            raise ValueError(f"duplicate book_id {b.book_id!r}")
        seen.add(b.book_id)
    rng = np.random.default_rng(seed)
    mapping: dict[str, int] = {}
    pointer = 0
    for stratum in build_strata(books):
        ids = list(stratum.book_ids)
        order = rng.permutation(len(ids))
        for idx in order:
            mapping[ids[idx]] = pointer % k
            pointer += 1
    return FoldAssignment(k=k, book_to_fold=mapping)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    model: TrainedModel
    n_train: int
    n_test: int
    vocab_hash: str = ""
    vocab: Optional[Vocabulary] = None


@dataclass(frozen=True)
class CrossValResult:
    """Out-of-fold probabilities aligned with the input record order."""

    folds: FoldAssignment
    p_translated: np.ndarray
    fold_index: np.ndarray
    y_true: np.ndarray
    fold_results: tuple[FoldResult, ...]

    @property
    def fluency(self) -> np.ndarray:
        return 1.0 - self.p_translated


def _label_of(record: ParagraphRecord) -> int:
    return 1 if record.class_label == "translated" else 0


def cross_val_oof(
    weighted: Sequence[WeightedRecord],
    folds: FoldAssignment,
    feature_config: FeatureConfig = FeatureConfig(),
    train_config: TrainConfig = TrainConfig(),
    refit_features_per_fold: bool = True,
) -> CrossValResult:
    """Train on k-1 folds, score the held-out fold; every record scored exactly once.

    Vocabulary, idf, and class weights are refit from the training split of each
    fold unless refit_features_per_fold is False (then fit once on all records,
    which leaks document frequencies and is only for diagnostics).
    """
    records = [w.record for w in weighted]
    weights = np.array([w.weight for w in weighted], dtype=np.float64)
    for r in records:
        if r.book_id not in folds.book_to_fold:
            raise ValueError(f"record {r.record_id!r}: book {r.book_id!r} has no fold assignment")
    fold_of = np.array([folds.fold_of(r.book_id) for r in records], dtype=np.int64)
    y = np.array([_label_of(r) for r in records], dtype=np.int64)

    docs = [extract_ngrams(r.pos_tags, feature_config.n_min, feature_config.n_max) for r in records]

    shared_vocab = shared_idf = None
    if not refit_features_per_fold:
        shared_vocab = build_vocabulary(docs, feature_config.max_features)
        if feature_config.weighting == "tfidf":
            shared_idf = fit_idf(docs, shared_vocab)

    p_oof = np.full(len(records), np.nan, dtype=np.float64)
    fold_results: list[FoldResult] = []
    for fold in range(folds.k):
        test_mask = fold_of == fold
        train_mask = ~test_mask
        if not test_mask.any():
            continue
        if not train_mask.any():
            raise ValueError(f"fold {fold}: empty training split")
        train_docs = [d for d, m in zip(docs, train_mask) if m]
        test_docs = [d for d, m in zip(docs, test_mask) if m]
        y_train = y[train_mask]
        if len(np.unique(y_train)) < 2:
            raise ValueError(f"fold {fold}: training split has a single class")

        if refit_features_per_fold:
            vocab = build_vocabulary(train_docs, feature_config.max_features)
            idf = None
            if feature_config.weighting == "tfidf":
                idf = fit_idf(train_docs, vocab)
        else:
            vocab, idf = shared_vocab, shared_idf

        X_train = vectorize_corpus(train_docs, vocab, feature_config.weighting, idf)
        X_test = vectorize_corpus(test_docs, vocab, feature_config.weighting, idf)
        # train() composes class weights with these per-sample weights itself
        model = train(X_train.matrix, y_train, weights[train_mask], train_config)
        p_oof[test_mask] = predict_proba_matrix(model, X_test.matrix)
        fold_results.append(
            FoldResult(
                fold=fold,
                model=model,
                n_train=len(train_docs),
                n_test=len(test_docs),
                vocab_hash=vocabulary_hash(vocab, idf),
                vocab=vocab,
            )
        )

    if np.isnan(p_oof).any():
        raise ValueError("some records were never scored; check fold coverage")
    return CrossValResult(
        folds=folds,
        p_translated=p_oof,
        fold_index=fold_of,
        y_true=y,
        fold_results=tuple(fold_results),
    )


def auc_score(y_true: Sequence[int], scores: Sequence[float]) -> float:
    """Probability a random positive outscores a random negative, ties counting half.

    Computed from the rank-sum identity with fractional ranks.
    """
    y = np.asarray(y_true, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if len(y) != len(s):
        raise ValueError("y_true and scores must have equal length")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = rankdata(s)
    rank_sum_pos = float(ranks[y == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def classifier_metrics(
    y_true: Sequence[int], p_translated: Sequence[float], threshold: float = 0.5
) -> dict[str, float]:
    """Accuracy, macro-F1 (per-class F1 averaged unweighted), and rank AUC."""
    y = np.asarray(y_true, dtype=np.int64)
    p = np.asarray(p_translated, dtype=np.float64)
    if len(y) != len(p):
        raise ValueError("y_true and p_translated must have equal length")
    if len(y) == 0:
        raise ValueError("empty input")
    pred = (p >= threshold).astype(np.int64)
    accuracy = float((pred == y).mean())
    f1s = []
    for cls in (0, 1):
        tp = int(((pred == cls) & (y == cls)).sum())
        fp = int(((pred == cls) & (y != cls)).sum())
        fn = int(((pred != cls) & (y == cls)).sum())
        denom = 2 * tp + fp + fn
        f1s.append(2 * tp / denom if denom > 0 else 0.0)
    macro_f1 = float(np.mean(f1s))
    return {"accuracy": accuracy, "macro_f1": macro_f1, "auc": auc_score(y, p)}
