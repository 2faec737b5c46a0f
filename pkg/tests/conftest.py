"""Shared fixture helpers for building tweets, users, and period slices."""
from __future__ import annotations

from typing import Optional

import pytest

from bdonset.corpus import DAY_SECONDS, Group, Tweet, UserRecord, parse_instant
from bdonset.windows import PeriodSlice

T0 = parse_instant("2016-01-01T00:00:00Z")


def make_tweet(
    id: str,
    text: str,
    at: int,
    user: str = "u1",
    offset: Optional[int] = None,
) -> Tweet:
    return Tweet.create(
        id=id, author_id=user, text=text, created_at_utc=at, utc_offset_minutes=offset
    )


def make_user(
    texts: list[str],
    start: int = T0,
    spacing: int = DAY_SECONDS,
    user: str = "u1",
    group: Group = Group.UNLABELED,
    tau: Optional[int] = None,
    offset: Optional[int] = None,
) -> UserRecord:
    tweets = tuple(
        make_tweet(f"{user}-{i}", text, start + i * spacing, user=user, offset=offset)
        for i, text in enumerate(texts)
    )
    return UserRecord(user_id=user, group=group, tau=tau, tweets=tweets)


def make_slice(
    texts: list[str],
    window_days: float = 60.0,
    start: int = T0,
    spacing: int = DAY_SECONDS,
    user: str = "u1",
    offset: Optional[int] = None,
) -> PeriodSlice:
    tweets = tuple(
        make_tweet(f"{user}-{i}", text, start + i * spacing, user=user, offset=offset)
        for i, text in enumerate(texts)
    )
    end = start + int(window_days * DAY_SECONDS)
    return PeriodSlice(user_id=user, window_end=end, window_days=window_days, tweets=tweets)


@pytest.fixture
def empty_slice() -> PeriodSlice:
    return PeriodSlice(user_id="u1", window_end=T0, window_days=60.0, tweets=())
