"""Feature-set variants: which extractor blocks feed each trainable model."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .bdplf import FULL_BLOCKS, PatternOfLifeConfig, PatternOfLifeFeaturizer
from .corpus import Corpus, Group
from .phonology import WordEnergyFeaturizer
from .textfeat import (
    DEFAULT_VOCAB_CAP,
    CategoryLexiconFeaturizer,
    TfidfFeaturizer,
    Vocabulary,
)
from .windows import PeriodSlice, onset_window

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariantSpec:
    pol_blocks: tuple[str, ...] = ()
    use_tfidf: bool = False
    use_liwc: bool = False
    use_energy: bool = False


# Pattern-of-life blocks come first, energy last; dims match the published
# superscripts (see README for the two pure-text rows).
VARIANTS: dict[str, VariantSpec] = {
    "clf": VariantSpec(use_tfidf=True),
    "liwc": VariantSpec(use_liwc=True),
    "bdplf": VariantSpec(pol_blocks=FULL_BLOCKS),
    "phon": VariantSpec(use_energy=True),
    "plf": VariantSpec(pol_blocks=("ag", "pol", "emot", "soc")),
    "lt_plf": VariantSpec(pol_blocks=("ag", "pol", "emot", "soc", "lt")),
    "trd_plf": VariantSpec(pol_blocks=("ag", "pol", "emot", "soc", "trd")),
    "phon_plf": VariantSpec(pol_blocks=("ag", "pol", "emot", "soc"), use_energy=True),
    "phon_bdplf": VariantSpec(pol_blocks=FULL_BLOCKS, use_energy=True),
    "emot_ag": VariantSpec(pol_blocks=("ag", "emot")),
    "emot_phon": VariantSpec(pol_blocks=("emot", "lt", "trd"), use_energy=True),
    "emot_ag_phon": VariantSpec(pol_blocks=("ag", "emot", "lt", "trd"), use_energy=True),
}


class VariantExtractor:
    """Fit/transform pipeline for one feature-set variant over period slices."""

    def __init__(
        self,
        variant: str,
        n_max: int = DEFAULT_VOCAB_CAP,
        pol_config: Optional[PatternOfLifeConfig] = None,
        lexicon_paths: Optional[dict[str, str]] = None,
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; known: {sorted(VARIANTS)}")
        self.variant = variant
        self.n_max = n_max
        self.pol_config = pol_config
        self.lexicon_paths = dict(lexicon_paths or {})
        spec = VARIANTS[variant]
        self._parts: list[tuple[str, Any]] = []
        if spec.pol_blocks:
            self._parts.append(
                ("pol", PatternOfLifeFeaturizer(blocks=spec.pol_blocks, config=pol_config))
            )
        if spec.use_energy:
            self._parts.append(("energy", WordEnergyFeaturizer()))
        if spec.use_liwc:
            self._parts.append(("liwc", CategoryLexiconFeaturizer()))
        if spec.use_tfidf:
            self._parts.append(("tfidf", TfidfFeaturizer(n_max=n_max)))

    def fit(self, slices: list[PeriodSlice]) -> "VariantExtractor":
        for _, featurizer in self._parts:
            featurizer.fit(slices)
        return self

    def transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        return np.hstack([f.transform(slices) for _, f in self._parts])

    def fit_transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        return self.fit(slices).transform(slices)

    def feature_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for _, featurizer in self._parts:
            names.extend(featurizer.get_feature_names_out())
        return tuple(names)

    def state(self) -> dict[str, Any]:
        """Serializable fit state, enough to rebuild the extractor for prediction."""
        state: dict[str, Any] = {"variant": self.variant, "n_max": self.n_max}
        for name, featurizer in self._parts:
            if name == "tfidf":
                state["tfidf"] = {
                    "terms": list(featurizer.vocabulary_.terms),
                    "df": list(featurizer.vocabulary_.df),
                    "n_users": featurizer.n_users_,
                    "column_norms": [float(v) for v in featurizer.column_norms_],
                }
        return state

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "VariantExtractor":
        extractor = cls(state["variant"], n_max=state.get("n_max", DEFAULT_VOCAB_CAP))
        if "tfidf" in state:
            saved = state["tfidf"]
            for name, featurizer in extractor._parts:
                if name == "tfidf":
                    featurizer.vocabulary_ = Vocabulary(
                        terms=tuple(saved["terms"]),
                        df=tuple(saved["df"]),
                        n_users=saved["n_users"],
                    )
                    featurizer.n_users_ = saved["n_users"]
                    featurizer.column_norms_ = np.array(saved["column_norms"])
        # Stateless featurizers just need their default lexica loaded.
        for _, featurizer in extractor._parts:
            if hasattr(featurizer, "_resolve"):
                featurizer._resolve()
        return extractor


@dataclass
class LabeledSlices:
    slices: list[PeriodSlice]
    labels: np.ndarray
    user_ids: tuple[str, ...]
    excluded: tuple[str, ...] = ()


def onset_training_slices(corpus: Corpus, alpha_days: float) -> LabeledSlices:
    """Onset windows for bipolar (label 1) and regular (label 0) users.

    Unlabeled users are skipped; users whose onset window is empty are
    excluded from training and reported.
    """
    slices: list[PeriodSlice] = []
    labels: list[int] = []
    user_ids: list[str] = []
    excluded: list[str] = []
    for user_id in sorted(corpus.users):
        user = corpus.users[user_id]
        if user.group is Group.UNLABELED:
            continue
        window = onset_window(user, alpha_days)
        if window.is_empty():
            log.warning("user %s: empty onset window, excluded from training", user_id)
            excluded.append(user_id)
            continue
        slices.append(window)
        labels.append(1 if user.group is Group.BIPOLAR else 0)
        user_ids.append(user_id)
    return LabeledSlices(
        slices=slices,
        labels=np.array(labels, dtype=int),
        user_ids=tuple(user_ids),
        excluded=tuple(excluded),
    )


def train_variant_model(
    variant: str,
    data: LabeledSlices,
    alpha_days: float,
    seed: int,
    n_trees: int = 100,
    max_depth: Optional[int] = None,
    min_samples_leaf: int = 1,
    n_max: int = DEFAULT_VOCAB_CAP,
    pol_config: Optional[PatternOfLifeConfig] = None,
    n_jobs: int = 1,
):
    """Fit one variant's extractor and forest; returns a saveable ForestModel."""
    from .forest import ForestModel, OnsetForest

    extractor = VariantExtractor(variant, n_max=n_max, pol_config=pol_config)
    X = extractor.fit_transform(data.slices)
    forest = OnsetForest(
        n_trees=n_trees,
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        seed=seed,
        n_jobs=n_jobs,
    )
    forest.fit(X, data.labels)
    return ForestModel(
        variant=variant,
        feature_names=extractor.feature_names(),
        forest=forest,
        alpha_days=alpha_days,
        extractor_state=extractor.state(),
    )


def feature_set_models(
    data: LabeledSlices,
    alpha_days: float,
    seed: int,
    variants: Optional[list[str]] = None,
    **kwargs,
) -> dict[str, Any]:
    """Train every (or the requested) feature-set variant on the same slices."""
    variants = variants or sorted(VARIANTS)
    return {
        v: train_variant_model(v, data, alpha_days, seed=seed, **kwargs) for v in variants
    }
