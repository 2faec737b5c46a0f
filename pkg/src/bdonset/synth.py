"""Synthetic cohort generator: Poisson tweet arrivals with an hour-of-day
profile, and multiplicative onset effects confined to the final window."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import Corpus, DAY_SECONDS, Group, Tweet, UserRecord, format_instant, parse_instant
from .lexicon import WeightedLexicon, default_data_path
from .phonology import DifficultyWeights, PhonemeFeatureTable, PronunciationLexicon, word_energy

SPAN_START = parse_instant("2016-01-01T00:00:00Z")

# Waking-hours bias; onset multiplies the 0-5h weights.
HOUR_WEIGHTS = np.array(
    [0.2, 0.15, 0.1, 0.1, 0.1, 0.15, 0.3, 0.6, 1.0, 1.2, 1.2, 1.2,
     1.3, 1.2, 1.1, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.5, 1.2, 0.7]
)

UTC_OFFSETS = (-480, -300, -240, -120, 0, 60, 120, 330, 540)


@dataclass(frozen=True)
class SynthConfig:
    n_bipolar: int = 20
    n_regular: int = 20
    span_days: int = 420
    base_rate: float = 2.0  # tweets/day
    onset_days: float = 60.0
    rate_mult: float = 1.5
    late_mult: float = 4.0
    flip_mult: float = 5.0
    energy_bias: float = 0.18  # onset probability of a high-energy word
    base_energy_rate: float = 0.08
    sentiment_rate: float = 0.35
    base_flip_prob: float = 0.04
    mention_prob: float = 0.25
    missing_offset_prob: float = 0.1
    seed: int = 0

    def validate(self) -> None:
        if self.n_bipolar < 0 or self.n_regular < 0:
            raise ValueError("user counts must be >= 0")
        if min(self.rate_mult, self.late_mult, self.flip_mult) < 1.0:
            raise ValueError("onset multipliers must be >= 1")
        if self.span_days < self.onset_days:
            raise ValueError("span must cover at least one onset window")
        if not 0.0 <= self.energy_bias <= 1.0:
            raise ValueError("energy_bias must be in [0, 1]")


@dataclass(frozen=True)
class WordPools:
    neutral: tuple[str, ...]
    positive: tuple[str, ...]
    negative: tuple[str, ...]
    high_energy: tuple[str, ...]


def build_word_pools() -> WordPools:
    """Pools drawn from the bundled pronunciation and sentiment lexica.

    High-energy words are the top quintile of the dictionary by summed
    per-category energy.
    """
    pron = PronunciationLexicon.load()
    sentiment = WeightedLexicon.load(default_data_path("sentiment.lex"))
    table = PhonemeFeatureTable.load()
    weights = DifficultyWeights()
    words = sorted(pron.entries)
    totals = {w: float(word_energy(w, pron, table, weights).sum()) for w in words}
    cut = float(np.quantile(sorted(totals.values()), 0.8))
    high = tuple(w for w in words if totals[w] >= cut)
    positive = tuple(w for w in words if sentiment.weights.get(w, 0.0) > 0)
    negative = tuple(w for w in words if sentiment.weights.get(w, 0.0) < 0)
    tagged = set(positive) | set(negative) | set(high)
    neutral = tuple(w for w in words if w not in tagged)
    return WordPools(neutral=neutral, positive=positive, negative=negative, high_energy=high)


def _user_tweets(
    cfg: SynthConfig,
    pools: WordPools,
    user_id: str,
    rng: np.random.Generator,
    bipolar: bool,
    tau: int,
) -> tuple[list[Tweet], Optional[int]]:
    offset = None
    if rng.random() >= cfg.missing_offset_prob:
        offset = int(rng.choice(UTC_OFFSETS))
    # Per-user heterogeneity so raw volume and word preferences are noisy
    # rather than clean class giveaways.
    user_rate = cfg.base_rate * float(rng.lognormal(0.0, 0.35))
    user_energy_rate = float(np.clip(rng.normal(cfg.base_energy_rate, 0.04), 0.0, 1.0))
    user_sentiment_rate = float(np.clip(rng.normal(cfg.sentiment_rate, 0.08), 0.05, 0.9))
    onset_start = tau - cfg.onset_days * DAY_SECONDS
    mood = 1 if rng.random() < 0.5 else -1
    tweets: list[Tweet] = []
    serial = 0
    for day in range(cfg.span_days):
        day_start = SPAN_START + day * DAY_SECONDS
        in_onset = bipolar and day_start + DAY_SECONDS > onset_start
        rate = user_rate * (cfg.rate_mult if in_onset else 1.0)
        count = rng.poisson(rate)
        hour_w = HOUR_WEIGHTS.copy()
        if in_onset:
            hour_w[:6] *= cfg.late_mult
        hour_p = hour_w / hour_w.sum()
        flip_prob = min(0.5, cfg.base_flip_prob * (cfg.flip_mult if in_onset else 1.0))
        energy_rate = cfg.energy_bias if in_onset else user_energy_rate
        for _ in range(count):
            hour = int(rng.choice(24, p=hour_p))
            local = day_start + hour * 3600 + int(rng.integers(0, 3600))
            utc = local - (offset or 0) * 60
            if rng.random() < flip_prob:
                mood = -mood
            words = []
            for _ in range(int(rng.integers(5, 13))):
                roll = rng.random()
                if roll < energy_rate:
                    words.append(str(rng.choice(pools.high_energy)))
                elif roll < energy_rate + user_sentiment_rate:
                    pool = pools.positive if mood > 0 else pools.negative
                    words.append(str(rng.choice(pool)))
                else:
                    words.append(str(rng.choice(pools.neutral)))
            text = " ".join(words)
            if rng.random() < cfg.mention_prob:
                text = f"@friend{int(rng.integers(0, 6))} " + text
            serial += 1
            tweets.append(
                Tweet.create(
                    id=f"{user_id}-{serial:06d}",
                    author_id=user_id,
                    text=text,
                    created_at_utc=utc,
                    utc_offset_minutes=offset,
                )
            )
    if bipolar:
        # The announcement follows the diagnosis instant, so it falls outside
        # the training window [tau - alpha, tau].
        serial += 1
        tweets.append(
            Tweet.create(
                id=f"{user_id}-{serial:06d}",
                author_id=user_id,
                text="i was diagnosed with bipolar this month today it is official",
                created_at_utc=tau + 12 * 3600,
                utc_offset_minutes=offset,
            )
        )
    tweets.sort(key=lambda t: t.created_at_utc)
    return tweets, offset


def generate(cfg: SynthConfig) -> Corpus:
    """Deterministic synthetic corpus with groups and diagnosis times set.

    Bipolar users get tau at the end of the span and onset effects only
    within [tau - onset_days, tau]; regular users are homogeneous.
    """
    cfg.validate()
    pools = build_word_pools()
    tau = SPAN_START + cfg.span_days * DAY_SECONDS
    users: dict[str, UserRecord] = {}
    specs = [(f"bd{i:04d}", True) for i in range(cfg.n_bipolar)]
    specs += [(f"reg{i:04d}", False) for i in range(cfg.n_regular)]
    for index, (user_id, bipolar) in enumerate(specs):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(index,)))
        tweets, _ = _user_tweets(cfg, pools, user_id, rng, bipolar, tau)
        users[user_id] = UserRecord(
            user_id=user_id,
            group=Group.BIPOLAR if bipolar else Group.REGULAR,
            tau=tau if bipolar else None,
            tweets=tuple(tweets),
        )
    return Corpus(users=users)


def write_truth(corpus: Corpus, path: str | Path) -> None:
    """Ground-truth assignment CSV: user_id, group, tau_utc (empty when absent)."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user_id", "group", "tau_utc"])
        for user_id in sorted(corpus.users):
            user = corpus.users[user_id]
            tau = format_instant(user.tau) if user.tau is not None else ""
            writer.writerow([user_id, user.group.value, tau])


def read_truth(path: str | Path) -> dict[str, tuple[Group, Optional[int]]]:
    truth = {}
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            tau = parse_instant(row["tau_utc"]) if row["tau_utc"] else None
            truth[row["user_id"]] = (Group(row["group"]), tau)
    return truth


def apply_truth(corpus: Corpus, truth: dict[str, tuple[Group, Optional[int]]]) -> Corpus:
    from dataclasses import replace

    users = dict(corpus.users)
    for user_id, (group, tau) in truth.items():
        if user_id in users:
            users[user_id] = replace(users[user_id], group=group, tau=tau)
    return replace(corpus, users=users)
