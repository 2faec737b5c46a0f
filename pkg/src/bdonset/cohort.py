"""Offline cohort construction: keyword search, diagnosis labeling, activity filters."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .corpus import Corpus, Group, UserRecord, format_instant, tokenize

log = logging.getLogger(__name__)

ENGLISH_LATIN_FRACTION = 0.8
MIN_ACTIVE_TWEETS = 100  # strictly more than this required
MAX_NOISY_FRACTION = 0.5


@dataclass(frozen=True)
class DiagnosisLabel:
    user_id: str
    tau: int  # month precision, resolved to first day of month 00:00 UTC
    evidence_tweet_id: str


def month_start(year: int, month: int) -> int:
    return int(datetime(year, month, 1, tzinfo=timezone.utc).timestamp())


def minimum_keyword_search(corpus: Corpus, keys: set[str]) -> set[tuple[str, str]]:
    """(user_id, tweet_id) pairs whose token set is a superset of the filter keys."""
    if not keys:
        raise ValueError("keyword filter requires at least one key")
    keys = {k.lower() for k in keys}
    hits = set()
    for user in corpus.users.values():
        for tweet in user.tweets:
            if keys <= set(tokenize(tweet.text)):
                hits.add((user.user_id, tweet.id))
    return hits


def time_keyword_filter(
    corpus: Corpus, candidates: set[tuple[str, str]], time_keys: set[str]
) -> set[tuple[str, str]]:
    """Keep candidates whose token set intersects the time keywords (any-of)."""
    if not time_keys:
        raise ValueError("time keyword filter requires at least one key")
    time_keys = {k.lower() for k in time_keys}
    by_id = {
        tweet.id: tweet for user in corpus.users.values() for tweet in user.tweets
    }
    kept = set()
    for user_id, tweet_id in candidates:
        tweet = by_id.get(tweet_id)
        if tweet is not None and time_keys & set(tokenize(tweet.text)):
            kept.add((user_id, tweet_id))
    return kept


def write_review_worklist(
    corpus: Corpus, candidates: set[tuple[str, str]], path: str | Path
) -> None:
    """Emit the manual-labeling worklist CSV."""
    by_id = {t.id: t for t in corpus.all_tweets()}
    rows = sorted(candidates)
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user_id", "tweet_id", "created_at_utc", "text"])
        for user_id, tweet_id in rows:
            tweet = by_id[tweet_id]
            writer.writerow(
                [user_id, tweet_id, format_instant(tweet.created_at_utc), tweet.text]
            )


def read_label_file(path: str | Path) -> list[DiagnosisLabel]:
    labels = []
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            labels.append(
                DiagnosisLabel(
                    user_id=row["user_id"],
                    tau=month_start(int(row["tau_year"]), int(row["tau_month"])),
                    evidence_tweet_id=row["evidence_tweet_id"],
                )
            )
    return labels


def apply_diagnosis_labels(
    corpus: Corpus, labels: list[DiagnosisLabel]
) -> tuple[Corpus, list[str]]:
    """Mark labeled users bipolar with their diagnosis time; returns per-row errors."""
    errors: list[str] = []
    users = dict(corpus.users)
    by_id = {t.id: t for t in corpus.all_tweets()}
    labeled: set[str] = set()
    for label in labels:
        user = users.get(label.user_id)
        if user is None:
            errors.append(f"unknown user_id {label.user_id}")
            continue
        evidence = by_id.get(label.evidence_tweet_id)
        if evidence is None:
            errors.append(f"unknown evidence tweet {label.evidence_tweet_id}")
            continue
        if label.tau > evidence.created_at_utc:
            errors.append(
                f"label for {label.user_id} rejected: tau after evidence tweet"
            )
            continue
        if label.user_id in labeled:
            if users[label.user_id].tau != label.tau:
                log.warning(
                    "conflicting diagnosis times for %s, keeping first", label.user_id
                )
            continue
        users[label.user_id] = replace(user, group=Group.BIPOLAR, tau=label.tau)
        labeled.add(label.user_id)
    return replace(corpus, users=users), errors


def tweet_is_english(text: str) -> bool:
    """Cheap proxy: at least 80% of non-space characters in the basic Latin range."""
    chars = [c for c in text if not c.isspace()]
    if not chars:
        return True
    latin = sum(1 for c in chars if ord(c) < 128)
    return latin / len(chars) >= ENGLISH_LATIN_FRACTION


def language_activity_filter(corpus: Corpus) -> tuple[Corpus, dict[str, str]]:
    """Drop inactive users and users dominated by links or non-English posts."""
    removed: dict[str, str] = {}
    users = {}
    for user in corpus.users.values():
        if len(user.tweets) <= MIN_ACTIVE_TWEETS:
            removed[user.user_id] = f"only {len(user.tweets)} tweets"
            continue
        noisy = sum(
            1 for t in user.tweets if t.has_url or not tweet_is_english(t.text)
        )
        if noisy / len(user.tweets) > MAX_NOISY_FRACTION:
            removed[user.user_id] = "mostly links or non-English"
            continue
        users[user.user_id] = user
    return replace(corpus, users=users), removed


def mark_regular_cohort(
    corpus: Corpus, user_ids: list[str]
) -> tuple[Corpus, list[str]]:
    """Mark unlabeled users as the regular (control) cohort."""
    errors: list[str] = []
    users = dict(corpus.users)
    for user_id in user_ids:
        user = users.get(user_id)
        if user is None:
            errors.append(f"unknown user_id {user_id}")
            continue
        if user.group is Group.BIPOLAR:
            raise ValueError(f"user {user_id} is already bipolar; cohorts must be disjoint")
        users[user_id] = replace(user, group=Group.REGULAR, tau=None)
    return replace(corpus, users=users), errors
