"""Analysis windows: the onset window anchored at the diagnosis time and
week-stepped sliding windows over a user's full history."""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import DAY_SECONDS, Group, Tweet, UserRecord

# Months normalized to 30-day blocks so window lengths are exact durations.
ALPHA_PRESETS_DAYS = {2: 60, 3: 90, 6: 180, 9: 270, 12: 360}
DEFAULT_STEP_DAYS = 7.0


def alpha_days_for_months(months: int) -> float:
    if months not in ALPHA_PRESETS_DAYS:
        raise ValueError(
            f"alpha preset must be one of {sorted(ALPHA_PRESETS_DAYS)}, got {months}"
        )
    return float(ALPHA_PRESETS_DAYS[months])


@dataclass(frozen=True)
class PeriodSlice:
    """A user's tweets restricted to the closed window [end - alpha, end]."""

    user_id: str
    window_end: int
    window_days: float
    tweets: tuple[Tweet, ...]

    @property
    def window_start(self) -> int:
        return int(self.window_end - self.window_days * DAY_SECONDS)

    def is_empty(self) -> bool:
        return not self.tweets


def slice_user(user: UserRecord, window_end: int, alpha_days: float) -> PeriodSlice:
    start = window_end - alpha_days * DAY_SECONDS
    tweets = tuple(
        t for t in user.tweets if start <= t.created_at_utc <= window_end
    )
    return PeriodSlice(
        user_id=user.user_id,
        window_end=int(window_end),
        window_days=float(alpha_days),
        tweets=tweets,
    )


def onset_window(user: UserRecord, alpha_days: float) -> PeriodSlice:
    """Training slice: anchored at the diagnosis time for bipolar users, at the
    last tweet for regular users (comparable recency without a diagnosis)."""
    if user.group is Group.BIPOLAR:
        if user.tau is None:
            raise ValueError(f"bipolar user {user.user_id} has no diagnosis time")
        anchor = user.tau
    else:
        if not user.tweets:
            raise ValueError(f"user {user.user_id} has no tweets")
        anchor = user.tweets[-1].created_at_utc
    return slice_user(user, anchor, alpha_days)


def slide_windows(
    user: UserRecord, alpha_days: float, step_days: float = DEFAULT_STEP_DAYS
) -> list[PeriodSlice]:
    """Windows ending at the last tweet and stepping backward by `step_days`.

    Iteration stops after the first window whose start precedes the first
    tweet; output is in ascending chronological order of the window end.
    Empty intermediate windows are retained.
    """
    if not user.tweets:
        raise ValueError(f"user {user.user_id} has no tweets")
    first = user.tweets[0].created_at_utc
    last = user.tweets[-1].created_at_utc
    step = step_days * DAY_SECONDS
    slices = []
    j = 0
    while True:
        end = last - j * step
        window = slice_user(user, int(end), alpha_days)
        slices.append(window)
        if window.window_start < first:
            break
        j += 1
    slices.reverse()
    return slices
