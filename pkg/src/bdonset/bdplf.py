"""Pattern-of-life feature set: age/gender, mood polarity, emotions, social
interaction, insomnia (late tweets), and over-talking (tweet rate difference)."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import DAY_SECONDS, tokenize, to_local_time
from .lexicon import CategoryLexicon, WeightedLexicon, default_data_path
from .textfeat import slice_tokens
from .windows import PeriodSlice

log = logging.getLogger(__name__)

EMOTIONS = (
    "joy",
    "surprise",
    "anticipation",
    "trust",
    "sadness",
    "disgust",
    "anger",
    "fear",
)

POLARITY_NAMES = ("pos_ratio", "neg_ratio", "pos_combo", "neg_combo", "flips_ratio")
SOCIAL_NAMES = ("tweeting_frequency", "mention_ratio", "frequent_mentions", "unique_mentions")

BLOCK_NAMES = {
    "ag": ("age", "gender"),
    "pol": POLARITY_NAMES,
    "emot": tuple(f"emot_{e}" for e in EMOTIONS),
    "soc": SOCIAL_NAMES,
    "lt": ("late_tweet_frequency",),
    "trd": ("tweet_rate_difference",),
}
FULL_BLOCKS = ("ag", "pol", "emot", "soc", "lt", "trd")

DEFAULT_SEGMENT_DAYS = 7.0
DEFAULT_AGE_PRIOR = 24.0
DEFAULT_GENDER_PRIOR = 0.0


def label_polarity(
    s: PeriodSlice, sentiment: WeightedLexicon, neutral_band: float = 0.0
) -> list[int]:
    """Per-tweet polarity: +1 / -1 / 0 by summed token weights against the band.

    Scores exactly on the band boundary are neutral.
    """
    labels = []
    for tweet in s.tweets:
        score = sum(sentiment.score(tok) for tok in tokenize(tweet.text))
        if score > neutral_band:
            labels.append(1)
        elif score < -neutral_band:
            labels.append(-1)
        else:
            labels.append(0)
    return labels


def _longest_run(seq: list[int], value: int) -> int:
    best = run = 0
    for item in seq:
        run = run + 1 if item == value else 0
        best = max(best, run)
    return best


def polarity_features(labels: list[int]) -> np.ndarray:
    """(pos_ratio, neg_ratio, pos_combo, neg_combo, flips_ratio).

    Combos are normalized longest runs over the non-neutral subsequence;
    flips count adjacent sign changes in that subsequence.
    """
    if not labels:
        log.warning("empty slice: zero polarity features")
        return np.zeros(5)
    n = len(labels)
    pos_ratio = labels.count(1) / n
    neg_ratio = labels.count(-1) / n
    signed = [l for l in labels if l != 0]
    if signed:
        pos_combo = _longest_run(signed, 1) / len(signed)
        neg_combo = _longest_run(signed, -1) / len(signed)
    else:
        pos_combo = neg_combo = 0.0
    if len(signed) >= 2:
        flips = sum(1 for a, b in zip(signed, signed[1:]) if a != b)
        flips_ratio = flips / (len(signed) - 1)
    else:
        flips_ratio = 0.0
    return np.array([pos_ratio, neg_ratio, pos_combo, neg_combo, flips_ratio])


def emotion_scores(
    s: PeriodSlice, emotion_lex: CategoryLexicon, constant_denominator: bool = False
) -> np.ndarray:
    """Distribution of dominant tweet emotions over the eight categories.

    Each tweet gets its max-hit emotion (ties -> none). The denominator is the
    count of emotion-labeled tweets, or the constant 8 when
    constant_denominator is set.
    """
    missing = set(EMOTIONS) - set(emotion_lex.categories)
    if missing:
        raise ValueError(f"emotion lexicon missing categories: {sorted(missing)}")
    counts = Counter()
    for tweet in s.tweets:
        hits = Counter()
        for token in tokenize(tweet.text):
            for category in emotion_lex.match(token):
                if category in EMOTIONS:
                    hits[category] += 1
        if not hits:
            continue
        top = hits.most_common()
        if len(top) > 1 and top[0][1] == top[1][1]:
            continue  # tied dominant emotion: no label
        counts[top[0][0]] += 1
    total = sum(counts.values())
    if total == 0:
        return np.zeros(len(EMOTIONS))
    denom = len(EMOTIONS) if constant_denominator else total
    return np.array([counts.get(e, 0) / denom for e in EMOTIONS])


def social_features(s: PeriodSlice) -> np.ndarray:
    """(tweets/day, mention ratio, most-mentioned share, distinct-handle share)."""
    n = len(s.tweets)
    freq = n / s.window_days if s.window_days > 0 else 0.0
    if n == 0:
        return np.array([freq, 0.0, 0.0, 0.0])
    with_mentions = sum(1 for t in s.tweets if t.mentions)
    all_mentions = [m for t in s.tweets for m in t.mentions]
    if all_mentions:
        top = Counter(all_mentions).most_common(1)[0][1]
        frequent = top / len(all_mentions)
        unique = len(set(all_mentions)) / len(all_mentions)
    else:
        frequent = unique = 0.0
    return np.array([freq, with_mentions / n, frequent, unique])


def late_tweet_frequency(s: PeriodSlice) -> float:
    """Daily rate of tweets posted between midnight and 6:00 am local time."""
    late = 0
    for tweet in s.tweets:
        local, _ = to_local_time(tweet)
        hour = (local % DAY_SECONDS) // 3600
        if 0 <= hour < 6:
            late += 1
    return late / s.window_days if s.window_days > 0 else 0.0


def tweet_rate_difference(s: PeriodSlice, segment_days: float = DEFAULT_SEGMENT_DAYS) -> float:
    """Max minus min of per-segment daily tweet rates over consecutive segments.

    The trailing partial segment is kept and normalized by its own length.
    A slice no longer than one segment yields 0.
    """
    if s.window_days <= segment_days:
        return 0.0
    start = s.window_end - s.window_days * DAY_SECONDS
    seg_seconds = segment_days * DAY_SECONDS
    n_full, remainder = divmod(s.window_days, segment_days)
    bounds = []
    for i in range(int(n_full)):
        bounds.append((start + i * seg_seconds, start + (i + 1) * seg_seconds, segment_days))
    if remainder > 1e-9:
        bounds.append((start + n_full * seg_seconds, s.window_end + 1, remainder))
    else:
        # closed window endpoint belongs to the final full segment
        lo, hi, length = bounds[-1]
        bounds[-1] = (lo, hi + 1, length)
    rates = []
    for lo, hi, length in bounds:
        count = sum(1 for t in s.tweets if lo <= t.created_at_utc < hi)
        rates.append(count / length)
    return max(rates) - min(rates)


def age_gender(
    s: PeriodSlice, age_lex: WeightedLexicon, gender_lex: WeightedLexicon
) -> np.ndarray:
    """Linear lexicon predictors: intercept + relative token frequency x weight."""
    tokens = slice_tokens(s)
    out = []
    for lex in (age_lex, gender_lex):
        score = lex.intercept
        if tokens:
            counts = Counter(tokens)
            n = len(tokens)
            score += sum(
                (c / n) * lex.weights[w] for w, c in counts.items() if w in lex.weights
            )
        out.append(score)
    return np.array(out)


@dataclass
class PatternOfLifeConfig:
    neutral_band: float = 0.0
    segment_days: float = DEFAULT_SEGMENT_DAYS
    constant_emotion_denominator: bool = False
    age_prior: float = DEFAULT_AGE_PRIOR
    gender_prior: float = DEFAULT_GENDER_PRIOR


class PatternOfLifeFeaturizer(BaseEstimator, TransformerMixin):
    """Per-slice pattern-of-life features, block-selectable for ablations.

    Default blocks produce the full 21-dim vector in the fixed order
    AG(2) | Pol(5) | Emot(8) | Soc(4) | LT(1) | TRD(1).
    """

    def __init__(
        self,
        blocks: tuple[str, ...] = FULL_BLOCKS,
        sentiment_lex: WeightedLexicon | None = None,
        emotion_lex: CategoryLexicon | None = None,
        age_lex: WeightedLexicon | None = None,
        gender_lex: WeightedLexicon | None = None,
        config: PatternOfLifeConfig | None = None,
    ):
        self.blocks = blocks
        self.sentiment_lex = sentiment_lex
        self.emotion_lex = emotion_lex
        self.age_lex = age_lex
        self.gender_lex = gender_lex
        self.config = config

    def _resolve(self) -> None:
        unknown = set(self.blocks) - set(BLOCK_NAMES)
        if unknown:
            raise ValueError(f"unknown feature blocks: {sorted(unknown)}")
        if self.config is None:
            self.config = PatternOfLifeConfig()
        if self.sentiment_lex is None:
            self.sentiment_lex = WeightedLexicon.load(default_data_path("sentiment.lex"))
        if self.emotion_lex is None:
            self.emotion_lex = CategoryLexicon.load(default_data_path("emotion.lex"))
        if self.age_lex is None:
            self.age_lex = self._load_or_prior("age.lex", self.config.age_prior)
        if self.gender_lex is None:
            self.gender_lex = self._load_or_prior("gender.lex", self.config.gender_prior)

    @staticmethod
    def _load_or_prior(name: str, prior: float) -> WeightedLexicon:
        path = default_data_path(name)
        try:
            return WeightedLexicon.load(path)
        except OSError:
            log.warning("lexicon %s missing; using prior %s", name, prior)
            return WeightedLexicon(weights={}, intercept=prior)

    def fit(self, slices: list[PeriodSlice], y=None):
        self._resolve()
        return self

    def _vector(self, s: PeriodSlice) -> np.ndarray:
        cfg = self.config
        parts = []
        for block in self.blocks:
            if block == "ag":
                parts.append(age_gender(s, self.age_lex, self.gender_lex))
            elif block == "pol":
                labels = label_polarity(s, self.sentiment_lex, cfg.neutral_band)
                parts.append(polarity_features(labels))
            elif block == "emot":
                parts.append(
                    emotion_scores(s, self.emotion_lex, cfg.constant_emotion_denominator)
                )
            elif block == "soc":
                parts.append(social_features(s))
            elif block == "lt":
                parts.append(np.array([late_tweet_frequency(s)]))
            elif block == "trd":
                parts.append(np.array([tweet_rate_difference(s, cfg.segment_days)]))
        return np.concatenate(parts)

    def transform(self, slices: list[PeriodSlice]) -> np.ndarray:
        self._resolve()
        return np.vstack([self._vector(s) for s in slices])

    def get_feature_names_out(self, input_features=None) -> list[str]:
        return [name for block in self.blocks for name in BLOCK_NAMES[block]]


def bdplf_vector(s: PeriodSlice, featurizer: PatternOfLifeFeaturizer | None = None) -> np.ndarray:
    """The full 21-dim pattern-of-life vector for one slice."""
    featurizer = featurizer or PatternOfLifeFeaturizer()
    return featurizer.fit([s]).transform([s])[0]
