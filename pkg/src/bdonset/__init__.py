"""Onset-period detection and prodrome localization from short-text archives."""

from .corpus import (
    Corpus,
    Group,
    LoadReport,
    Tweet,
    UserRecord,
    format_instant,
    load_corpus,
    parse_instant,
    save_corpus,
    to_local_time,
    tokenize,
)
from .windows import (
    ALPHA_PRESETS_DAYS,
    PeriodSlice,
    alpha_days_for_months,
    onset_window,
    slice_user,
    slide_windows,
)
from .textfeat import TfidfFeaturizer, CategoryLexiconFeaturizer, Vocabulary, build_vocabulary
from .bdplf import PatternOfLifeConfig, PatternOfLifeFeaturizer, bdplf_vector
from .phonology import WordEnergyFeaturizer, user_energy, word_energy
from .forest import CVResult, ForestModel, OnsetForest, cross_validate, stratified_folds
from .features import VARIANTS, LabeledSlices, VariantExtractor, onset_training_slices, train_variant_model
from .prodrome import OnsetTimeline, ProdromeInterval, TimelinePoint, locate_prodrome, onset_timeline
from .synth import SynthConfig, generate
from .config import PipelineConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "ALPHA_PRESETS_DAYS",
    "CVResult",
    "CategoryLexiconFeaturizer",
    "Corpus",
    "ForestModel",
    "Group",
    "LabeledSlices",
    "LoadReport",
    "OnsetForest",
    "OnsetTimeline",
    "PatternOfLifeConfig",
    "PatternOfLifeFeaturizer",
    "PeriodSlice",
    "PipelineConfig",
    "ProdromeInterval",
    "SynthConfig",
    "TfidfFeaturizer",
    "TimelinePoint",
    "Tweet",
    "UserRecord",
    "VARIANTS",
    "VariantExtractor",
    "Vocabulary",
    "WordEnergyFeaturizer",
    "alpha_days_for_months",
    "bdplf_vector",
    "build_vocabulary",
    "cross_validate",
    "format_instant",
    "generate",
    "load_config",
    "load_corpus",
    "locate_prodrome",
    "onset_timeline",
    "onset_training_slices",
    "onset_window",
    "parse_instant",
    "save_corpus",
    "slice_user",
    "slide_windows",
    "stratified_folds",
    "to_local_time",
    "tokenize",
    "train_variant_model",
    "user_energy",
    "word_energy",
]
