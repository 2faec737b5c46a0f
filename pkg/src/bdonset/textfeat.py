"""Word-level features: n-gram tf-idf and category-lexicon ratios."""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import tokenize
from .lexicon import CategoryLexicon
from .windows import PeriodSlice

log = logging.getLogger(__name__)

DEFAULT_VOCAB_CAP = 1000


def slice_ngrams(s: PeriodSlice) -> list[str]:
    """Unigrams and bigrams over every tweet in the slice; bigrams never cross tweets."""
    grams: list[str] = []
    for tweet in s.tweets:
        tokens = tokenize(tweet.text)
        grams.extend(tokens)
        grams.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    return grams


def slice_tokens(s: PeriodSlice) -> list[str]:
    tokens: list[str] = []
    for tweet in s.tweets:
        tokens.extend(tokenize(tweet.text))
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    """Ordered n-gram vocabulary with per-user document frequencies."""

    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_users: int

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}


def build_vocabulary(slices: list[PeriodSlice], n_max: int = DEFAULT_VOCAB_CAP) -> Vocabulary:
    """Top n_max terms by per-user document frequency, ordered descending df
    then lexicographic for determinism."""
    df: Counter[str] = Counter()
    any_tokens = False
    for s in slices:
        grams = set(slice_ngrams(s))
        if grams:
            any_tokens = True
        df.update(grams)
    if not any_tokens:
        raise ValueError("cannot build a vocabulary: all slices are empty")
    ordered = sorted(df.items(), key=lambda item: (-item[1], item[0]))[:n_max]
    return Vocabulary(
        terms=tuple(t for t, _ in ordered),
        df=tuple(c for _, c in ordered),
        n_users=len(slices),
    )


def tfidf_vector(s: PeriodSlice, vocab: Vocabulary, n_users: int) -> np.ndarray:
    """Raw tf-idf: term count in the slice times ln(K / (1 + df)), natural log."""
    if n_users < 1:
        raise ValueError("population size must be >= 1")
    counts = Counter(slice_ngrams(s))
    out = np.zeros(len(vocab.terms))
    for i, (term, df) in enumerate(zip(vocab.terms, vocab.df)):
        freq = counts.get(term, 0)
        if freq:
            out[i] = freq * math.log(n_users / (1 + df))
    return out


def normalize_tfidf(matrix: np.ndarray) -> np.ndarray:
    """Divide each term column by its Euclidean norm across users; zero columns stay zero."""
    matrix = np.asarray(matrix, dtype=float)
    norms = np.sqrt((matrix**2).sum(axis=0))
    safe = np.where(norms > 0, norms, 1.0)
    return matrix / safe


def category_scores(
    s: PeriodSlice, lexicon: CategoryLexicon, literal_norm: bool = True
) -> np.ndarray:
    """Per-category matching-token ratio; divided again by the slice tweet count
    when literal_norm is set (the double normalization as published)."""
    tokens = slice_tokens(s)
    scores = np.zeros(len(lexicon.categories))
    if not tokens:
        log.warning("slice for %s has no tokens; zero category scores", s.user_id)
        return scores
    index = {c: i for i, c in enumerate(lexicon.categories)}
    for token in tokens:
        for category in lexicon.match(token):
            scores[index[category]] += 1
    scores /= len(tokens)
    if literal_norm:
        scores /= len(s.tweets)
    return scores


class TfidfFeaturizer(BaseEstimator, TransformerMixin):
    """Per-user n-gram tf-idf with population-wide Euclidean column normalization.

    fit() learns the vocabulary, document frequencies, population size, and
    training column norms; transform() on new slices reuses all of them so a
    single window can be scored consistently at prediction time.
    """

    def __init__(self, n_max: int = DEFAULT_VOCAB_CAP):
        self.n_max = n_max

    def fit(self, slices: list[PeriodSlice], y=None):
        self.vocabulary_ = build_vocabulary(slices, self.n_max)
        self.n_users_ = len(slices)
        raw = np.vstack([tfidf_vector(s, self.vocabulary_, self.n_users_) for s in slices])
        norms = np.sqrt((raw**2).sum(axis=0))
        self.column_norms_ = np.where(norms > 0, norms, 1.0)
        return self

    def transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        raw = np.vstack([tfidf_vector(s, self.vocabulary_, self.n_users_) for s in slices])
        return raw / self.column_norms_

    def get_feature_names_out(self, input_features=None) -> list[str]:
        return [f"tfidf:{t}" for t in self.vocabulary_.terms]


class CategoryLexiconFeaturizer(BaseEstimator, TransformerMixin):
    """Stateless category-ratio features over a loaded category lexicon."""

    def __init__(self, lexicon: CategoryLexicon | None = None, literal_norm: bool = True):
        self.lexicon = lexicon
        self.literal_norm = literal_norm

    def _lexicon(self) -> CategoryLexicon:
        if self.lexicon is None:
            from .lexicon import default_data_path

            self.lexicon = CategoryLexicon.load(default_data_path("categories.lex"))
        return self.lexicon

    def fit(self, slices: list[PeriodSlice], y=None):
        self._lexicon()
        return self

    def transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        lexicon = self._lexicon()
        return np.vstack(
            [category_scores(s, lexicon, self.literal_norm) for s in slices]
        )

    def get_feature_names_out(self, input_features=None) -> list[str]:
        return [f"liwc:{c}" for c in self._lexicon().categories]
