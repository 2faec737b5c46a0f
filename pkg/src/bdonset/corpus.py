"""Archive loading, timestamps, and tokenization shared by all feature extractors."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

log = logging.getLogger(__name__)

DAY_SECONDS = 86_400
MAX_UTC_OFFSET_MINUTES = 14 * 60

_URL_RE = re.compile(r"(?:https?://\S+|www\.\S+)", re.IGNORECASE)
_MENTION_RE = re.compile(r"@(\w+)")
# Unicode alphanumeric runs; apostrophes kept inside words ("don't" is one token).
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*", re.UNICODE)


class Group(str, Enum):
    BIPOLAR = "bipolar"
    REGULAR = "regular"
    UNLABELED = "unlabeled"


def parse_instant(value: str) -> int:
    """Parse an ISO-8601 timestamp to epoch seconds (UTC)."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_instant(epoch: int) -> str:
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ"
    )


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with URLs, mention handles, and punctuation dropped.

    The hashtag symbol is stripped but the word kept. Mention handles are
    consumed by the social features, not the text features.
    """
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = text.replace("#", " ")
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class Tweet:
    id: str
    author_id: str
    text: str
    created_at_utc: int
    utc_offset_minutes: Optional[int] = None
    has_url: bool = False
    mentions: tuple[str, ...] = ()

    @classmethod
    def create(
        cls,
        id: str,
        author_id: str,
        text: str,
        created_at_utc: int,
        utc_offset_minutes: Optional[int] = None,
    ) -> "Tweet":
        """Build a tweet with has_url and mentions derived from the text."""
        if utc_offset_minutes is not None and abs(utc_offset_minutes) > MAX_UTC_OFFSET_MINUTES:
            raise ValueError(f"utc_offset_minutes out of range: {utc_offset_minutes}")
        return cls(
            id=id,
            author_id=author_id,
            text=text,
            created_at_utc=int(created_at_utc),
            utc_offset_minutes=utc_offset_minutes,
            has_url=bool(_URL_RE.search(text)),
            mentions=tuple(m.lower() for m in _MENTION_RE.findall(text)),
        )


def to_local_time(tweet: Tweet) -> tuple[int, str]:
    """Shift to the author's local time; falls back to UTC when no offset is known.

    Returns (epoch_seconds, flag) with flag "exact" or "utc_fallback".
    """
    if tweet.utc_offset_minutes is None:
        return tweet.created_at_utc, "utc_fallback"
    return tweet.created_at_utc + tweet.utc_offset_minutes * 60, "exact"


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    group: Group = Group.UNLABELED
    tau: Optional[int] = None  # diagnosis time, epoch seconds
    tweets: tuple[Tweet, ...] = ()

    def __post_init__(self) -> None:
        if self.group is Group.BIPOLAR and self.tau is None:
            raise ValueError(f"bipolar user {self.user_id} has no diagnosis time")
        if self.group is Group.REGULAR and self.tau is not None:
            raise ValueError(f"regular user {self.user_id} must not carry a diagnosis time")
        times = [t.created_at_utc for t in self.tweets]
        if times != sorted(times):
            object.__setattr__(
                self, "tweets", tuple(sorted(self.tweets, key=lambda t: t.created_at_utc))
            )


@dataclass(frozen=True)
class LoadReport:
    path: str
    loaded_tweets: int = 0
    skipped_lines: tuple[int, ...] = ()
    duplicate_ids: int = 0


@dataclass(frozen=True)
class Corpus:
    users: dict[str, UserRecord] = field(default_factory=dict)
    provenance: Optional[LoadReport] = None

    def all_tweets(self) -> Iterable[Tweet]:
        for user in self.users.values():
            yield from user.tweets

    def with_user(self, user: UserRecord) -> "Corpus":
        users = dict(self.users)
        users[user.user_id] = user
        return replace(self, users=users)


_REQUIRED_KEYS = ("id", "user_id", "text", "created_at_utc")


def _parse_line(line: str) -> Tweet:
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("record is not an object")
    for key in _REQUIRED_KEYS:
        if key not in record:
            raise ValueError(f"missing key {key!r}")
    offset = record.get("utc_offset_minutes")
    if offset is not None:
        offset = int(offset)
    return Tweet.create(
        id=str(record["id"]),
        author_id=str(record["user_id"]),
        text=str(record["text"]),
        created_at_utc=parse_instant(str(record["created_at_utc"])),
        utc_offset_minutes=offset,
    )


def load_corpus(path: str | Path) -> Corpus:
    """Load a line-oriented JSON archive; malformed lines are skipped with a warning."""
    path = Path(path)
    by_user: dict[str, list[Tweet]] = {}
    seen_ids: set[str] = set()
    skipped: list[int] = []
    duplicates = 0
    loaded = 0
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                tweet = _parse_line(line)
            except (ValueError, json.JSONDecodeError) as exc:
                log.warning("%s:%d skipped malformed line: %s", path, lineno, exc)
                skipped.append(lineno)
                continue
            if tweet.id in seen_ids:
                log.warning("%s:%d duplicate tweet id %s, keeping first", path, lineno, tweet.id)
                duplicates += 1
                continue
            seen_ids.add(tweet.id)
            by_user.setdefault(tweet.author_id, []).append(tweet)
            loaded += 1
    if loaded == 0:
        log.warning("empty corpus loaded from %s", path)
    users = {
        uid: UserRecord(user_id=uid, tweets=tuple(sorted(tweets, key=lambda t: t.created_at_utc)))
        for uid, tweets in by_user.items()
    }
    report = LoadReport(
        path=str(path),
        loaded_tweets=loaded,
        skipped_lines=tuple(skipped),
        duplicate_ids=duplicates,
    )
    return Corpus(users=users, provenance=report)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the archive back out; load_corpus(save_corpus(c)) round-trips."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for uid in sorted(corpus.users):
            for tweet in corpus.users[uid].tweets:
                record = {
                    "id": tweet.id,
                    "user_id": tweet.author_id,
                    "text": tweet.text,
                    "created_at_utc": format_instant(tweet.created_at_utc),
                    "utc_offset_minutes": tweet.utc_offset_minutes,
                }
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
