import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdonset.corpus import DAY_SECONDS, Group, UserRecord, parse_instant
from bdonset.windows import (
    ALPHA_PRESETS_DAYS,
    alpha_days_for_months,
    onset_window,
    slice_user,
    slide_windows,
)

from conftest import T0, make_tweet, make_user


class TestAlphaPresets:
    def test_presets(self):
        assert ALPHA_PRESETS_DAYS == {2: 60, 3: 90, 6: 180, 9: 270, 12: 360}

    def test_invalid_months(self):
        with pytest.raises(ValueError):
            alpha_days_for_months(4)


class TestOnsetWindow:
    def test_membership_by_hand(self):
        tau = parse_instant("2016-06-01T00:00:00Z")
        tweets = (
            make_tweet("apr", "x", parse_instant("2016-04-15T00:00:00Z")),
            make_tweet("jul", "y", parse_instant("2016-07-01T00:00:00Z")),
        )
        u = UserRecord(user_id="u1", group=Group.BIPOLAR, tau=tau, tweets=tweets)
        window = onset_window(u, 60.0)
        assert [t.id for t in window.tweets] == ["apr"]

    def test_tweet_exactly_at_tau_included(self):
        tau = T0 + 10 * DAY_SECONDS
        u = UserRecord(
            user_id="u1",
            group=Group.BIPOLAR,
            tau=tau,
            tweets=(make_tweet("edge", "x", tau),),
        )
        assert len(onset_window(u, 60.0).tweets) == 1

    def test_tweet_exactly_at_lower_bound_included(self):
        tau = T0 + 60 * DAY_SECONDS
        u = UserRecord(
            user_id="u1",
            group=Group.BIPOLAR,
            tau=tau,
            tweets=(make_tweet("lo", "x", T0),),
        )
        assert len(onset_window(u, 60.0).tweets) == 1

    def test_regular_user_anchored_at_last_tweet(self):
        u = make_user(["a", "b", "c"], group=Group.REGULAR)
        window = onset_window(u, 60.0)
        assert window.window_end == u.tweets[-1].created_at_utc

    def test_matches_brute_force_filter(self):
        u = make_user([f"t{i}" for i in range(100)], spacing=DAY_SECONDS, group=Group.REGULAR)
        window = onset_window(u, 60.0)
        lo = window.window_end - 60 * DAY_SECONDS
        expected = [t for t in u.tweets if lo <= t.created_at_utc <= window.window_end]
        assert list(window.tweets) == expected


class TestSlideWindows:
    def test_hundred_day_span_seven_windows(self):
        u = make_user(["a", "b"], spacing=100 * DAY_SECONDS)
        windows = slide_windows(u, 60.0, 7.0)
        assert len(windows) == 7

    def test_matches_brute_force_enumeration(self):
        for span in (30, 61, 100, 150, 365):
            u = make_user(["a", "b"], spacing=span * DAY_SECONDS)
            got = slide_windows(u, 60.0, 7.0)
            # oracle: enumerate backward, emit each window, stop after the
            # first one starting before the first tweet
            first = u.tweets[0].created_at_utc
            last = u.tweets[-1].created_at_utc
            ends = []
            j = 0
            while True:
                end = last - j * 7 * DAY_SECONDS
                ends.append(end)
                if end - 60 * DAY_SECONDS < first:
                    break
                j += 1
            assert [w.window_end for w in got] == sorted(ends)

    def test_span_shorter_than_alpha_single_window(self):
        u = make_user(["a", "b"], spacing=10 * DAY_SECONDS)
        assert len(slide_windows(u, 60.0, 7.0)) == 1

    def test_ascending_constant_step(self):
        u = make_user(["a", "b"], spacing=120 * DAY_SECONDS)
        windows = slide_windows(u, 60.0, 7.0)
        ends = [w.window_end for w in windows]
        assert ends == sorted(ends)
        diffs = {b - a for a, b in zip(ends, ends[1:])}
        assert diffs == {7 * DAY_SECONDS}

    def test_union_covers_span(self):
        u = make_user(["a", "b", "c"], spacing=80 * DAY_SECONDS)
        windows = slide_windows(u, 60.0, 7.0)
        assert windows[0].window_start <= u.tweets[0].created_at_utc
        assert windows[-1].window_end == u.tweets[-1].created_at_utc

    def test_no_tweets_raises(self):
        u = UserRecord(user_id="u1")
        with pytest.raises(ValueError):
            slide_windows(u, 60.0)

    @given(
        span_days=st.integers(min_value=1, max_value=500),
        alpha=st.sampled_from([60.0, 90.0, 180.0]),
    )
    @settings(max_examples=50, deadline=None)
    def test_property_window_count_and_bounds(self, span_days, alpha):
        u = make_user(["a", "b"], spacing=span_days * DAY_SECONDS)
        windows = slide_windows(u, alpha, 7.0)
        assert windows[-1].window_end == u.tweets[-1].created_at_utc
        assert windows[0].window_start < u.tweets[0].created_at_utc + 7 * DAY_SECONDS
        for w in windows:
            for t in w.tweets:
                assert w.window_start <= t.created_at_utc <= w.window_end


class TestSliceUser:
    def test_closed_interval(self):
        u = make_user(["a", "b", "c"], spacing=30 * DAY_SECONDS, group=Group.REGULAR)
        s = slice_user(u, T0 + 60 * DAY_SECONDS, 60.0)
        assert len(s.tweets) == 3  # ends at both boundaries included
