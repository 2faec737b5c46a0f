"""Energy-of-words pipeline: pronunciation lookup, per-phoneme articulatory
feature scores grouped into 8 categories, and per-user energy vectors."""
from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .lexicon import default_data_path
from .textfeat import slice_tokens
from .windows import PeriodSlice

log = logging.getLogger(__name__)

ENERGY_CATEGORIES = (
    "oral_cavity",
    "mouth_openness",
    "obstruent",
    "tongue_position",
    "resonance",
    "vowel",
    "round",
    "tense",
)

# 19 retained binary articulatory features, grouped by category.
CATEGORY_FEATURES = {
    "oral_cavity": ("anterior", "back", "approximant"),
    "mouth_openness": ("high", "mid", "low"),
    "obstruent": ("continuant", "labial", "fricative", "stop"),
    "tongue_position": ("coronal", "dental", "retroflex"),
    "resonance": ("nasal", "glottal", "velar"),
    "vowel": ("vowel",),
    "round": ("round",),
    "tense": ("tense",),
}
ALL_FEATURES = tuple(f for feats in CATEGORY_FEATURES.values() for f in feats)

_STRESS_RE = re.compile(r"\d+$")

OOV = None  # out-of-vocabulary marker returned by transcription


@dataclass
class PronunciationLexicon:
    """word (lowercase) -> phoneme sequence, parsed from ARPAbet-style lines."""

    entries: dict[str, tuple[str, ...]]

    @classmethod
    def load(
        cls, path: str | Path | None = None, arpabet_map: dict[str, tuple[str, ...]] | None = None
    ) -> "PronunciationLexicon":
        if path is None:
            path = default_data_path("pronouncing.dict")
        if arpabet_map is None:
            arpabet_map = load_arpabet_map()
        entries: dict[str, tuple[str, ...]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith(";;;"):
                continue
            word, *arpa = line.split()
            phonemes: list[str] = []
            for symbol in arpa:
                symbol = _STRESS_RE.sub("", symbol)
                if symbol not in arpabet_map:
                    raise ValueError(f"unknown ARPAbet symbol {symbol!r} for {word!r}")
                phonemes.extend(arpabet_map[symbol])
            entries[word.lower()] = tuple(phonemes)
        return cls(entries=entries)


def load_arpabet_map(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    if path is None:
        path = default_data_path("arpabet_to_ipa.tsv")
    mapping = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        arpa, ipa = line.split("\t")
        mapping[arpa] = tuple(ipa.split())
    return mapping


@dataclass
class PhonemeFeatureTable:
    """phoneme -> set of active articulatory features."""

    features: dict[str, frozenset[str]]

    @classmethod
    def load(cls, path: str | Path | None = None) -> "PhonemeFeatureTable":
        if path is None:
            path = default_data_path("phoneme_features.tsv")
        table = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            phoneme, feats = line.split("\t")
            active = frozenset(feats.split(","))
            unknown = active - set(ALL_FEATURES)
            if unknown:
                raise ValueError(f"unknown features for {phoneme!r}: {sorted(unknown)}")
            if not active:
                raise ValueError(f"phoneme {phoneme!r} has no active features")
            table[phoneme] = active
        return cls(features=table)


@dataclass
class DifficultyWeights:
    """Non-negative per-sub-feature pronunciation-difficulty weights."""

    weights: dict[str, float] = field(
        default_factory=lambda: {f: 1.0 for f in ALL_FEATURES}
    )

    def __post_init__(self) -> None:
        for name, value in self.weights.items():
            if name not in ALL_FEATURES:
                raise ValueError(f"unknown sub-feature {name!r}")
            if not (value >= 0.0 and np.isfinite(value)):
                raise ValueError(f"weight for {name!r} must be finite and >= 0")

    @classmethod
    def load(cls, path: str | Path | None = None) -> "DifficultyWeights":
        if path is None:
            path = default_data_path("difficulty_weights.txt")
        weights = {f: 1.0 for f in ALL_FEATURES}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, value = line.split("=")
            weights[name.strip()] = float(value)
        return cls(weights=weights)


def ipa_transcribe(word: str, lexicon: PronunciationLexicon) -> tuple[str, ...] | None:
    """Phoneme sequence for a known word, or the OOV marker (None)."""
    return lexicon.entries.get(word)


def phoneme_pf(
    phoneme: str, table: PhonemeFeatureTable, weights: DifficultyWeights
) -> np.ndarray:
    """8-category energy vector for one phoneme: per category, the summed
    weights of the category's sub-features active for the phoneme."""
    active = table.features.get(phoneme)
    if active is None:
        raise KeyError(f"phoneme {phoneme!r} not in feature table")
    return np.array(
        [
            sum(weights.weights[f] for f in CATEGORY_FEATURES[cat] if f in active)
            for cat in ENERGY_CATEGORIES
        ]
    )


def pf_score(
    phonemes: tuple[str, ...], table: PhonemeFeatureTable, weights: DifficultyWeights
) -> np.ndarray:
    """Component-wise sum of per-phoneme vectors; empty sequence -> zero vector."""
    out = np.zeros(len(ENERGY_CATEGORIES))
    for p in phonemes:
        out += phoneme_pf(p, table, weights)
    return out


def word_energy(
    word: str,
    lexicon: PronunciationLexicon,
    table: PhonemeFeatureTable,
    weights: DifficultyWeights,
) -> np.ndarray | None:
    """Energy of one word's transcription; None for out-of-vocabulary words."""
    phonemes = ipa_transcribe(word, lexicon)
    if phonemes is None:
        return None
    return pf_score(phonemes, table, weights)


def user_energy(
    s: PeriodSlice,
    lexicon: PronunciationLexicon,
    table: PhonemeFeatureTable,
    weights: DifficultyWeights,
) -> tuple[np.ndarray, float]:
    """Mean word energy over every token occurrence in the slice.

    OOV tokens contribute zero but stay in the denominator, so unknown
    vocabulary penalizes energy rather than inflating it. Returns the 8-dim
    vector and the transcription coverage fraction. Summation runs over
    sorted unique words so the result is exactly permutation-invariant.
    """
    tokens = slice_tokens(s)
    if not tokens:
        log.warning("slice for %s has no tokens; zero energy", s.user_id)
        return np.zeros(len(ENERGY_CATEGORIES)), 0.0
    counts = Counter(tokens)
    total = np.zeros(len(ENERGY_CATEGORIES))
    covered = 0
    for word in sorted(counts):
        energy = word_energy(word, lexicon, table, weights)
        if energy is None:
            continue
        total += counts[word] * energy
        covered += counts[word]
    return total / len(tokens), covered / len(tokens)


class WordEnergyFeaturizer(BaseEstimator, TransformerMixin):
    """Per-slice 8-dim energy vectors; emits a coverage report after transform."""

    def __init__(
        self,
        lexicon: PronunciationLexicon | None = None,
        table: PhonemeFeatureTable | None = None,
        weights: DifficultyWeights | None = None,
    ):
        self.lexicon = lexicon
        self.table = table
        self.weights = weights

    def _resolve(self) -> None:
        if self.lexicon is None:
            self.lexicon = PronunciationLexicon.load()
        if self.table is None:
            self.table = PhonemeFeatureTable.load()
        if self.weights is None:
            self.weights = DifficultyWeights.load()

    def fit(self, slices: list[PeriodSlice], y=None):
        self._resolve()
        return self

    def transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        self._resolve()
        rows = []
        coverages = []
        for s in slices:
            vector, coverage = user_energy(s, self.lexicon, self.table, self.weights)
            rows.append(vector)
            coverages.append(coverage)
        self.coverage_ = tuple(coverages)
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None) -> list[str]:
        return [f"energy_{c}" for c in ENERGY_CATEGORIES]
