"""Onset timelines over sliding windows and prodromal-period localization."""
from __future__ import annotations

import csv
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .corpus import UserRecord, format_instant
from .features import VariantExtractor
from .forest import ForestModel
from .windows import DEFAULT_STEP_DAYS, PeriodSlice, slide_windows

DEFAULT_L_LOWER = 0.3
DEFAULT_L_UPPER = 0.7


@dataclass(frozen=True)
class TimelinePoint:
    window: PeriodSlice
    probability: Optional[float]  # None for empty windows


@dataclass(frozen=True)
class OnsetTimeline:
    user_id: str
    points: tuple[TimelinePoint, ...]


@dataclass(frozen=True)
class ProdromeInterval:
    start: int
    end: int
    member_indices: tuple[int, ...]
    trigger_index: int  # window whose probability exceeded the upper bound


def onset_timeline(
    user: UserRecord,
    model: ForestModel,
    step_days: float = DEFAULT_STEP_DAYS,
    extractor: Optional[VariantExtractor] = None,
) -> OnsetTimeline:
    """Week-stepped sliding windows scored with the trained model.

    Windows without tweets get an undefined probability and are transparent
    to the locator.
    """
    if extractor is None:
        extractor = VariantExtractor.from_state(model.extractor_state)
    slices = slide_windows(user, model.alpha_days, step_days)
    non_empty = [s for s in slices if not s.is_empty()]
    probabilities: dict[int, float] = {}
    if non_empty:
        X = extractor.transform(non_empty)
        if X.shape[1] != len(model.feature_names):
            raise ValueError(
                f"extractor produced {X.shape[1]} features, model expects "
                f"{len(model.feature_names)}"
            )
        probs = model.forest.onset_probability(X)
        for s, p in zip(non_empty, probs):
            probabilities[s.window_end] = float(p)
    points = tuple(
        TimelinePoint(window=s, probability=probabilities.get(s.window_end))
        for s in slices
    )
    return OnsetTimeline(user_id=user.user_id, points=points)


def locate_prodrome(
    timeline: OnsetTimeline,
    l_lower: float = DEFAULT_L_LOWER,
    l_upper: float = DEFAULT_L_UPPER,
    clear_below_lower: bool = False,
) -> list[ProdromeInterval]:
    """Accumulate windows with probability in [l_lower, l_upper]; a window above
    the upper bound closes and emits the accumulated candidate.

    Windows below the lower bound neither extend nor clear the candidate (the
    published pseudocode has no clearing branch); set clear_below_lower to get
    the clearing behavior instead. A trailing unclosed candidate is discarded.
    Undefined probabilities are skipped entirely.
    """
    if not (0.0 <= l_lower < l_upper <= 1.0):
        raise ValueError(f"bounds must satisfy 0 <= lower < upper <= 1, got ({l_lower}, {l_upper})")
    qualified: list[ProdromeInterval] = []
    candidate: list[int] = []
    for i, point in enumerate(timeline.points):
        prob = point.probability
        if prob is None:
            continue
        if l_lower <= prob <= l_upper:
            candidate.append(i)
        elif prob > l_upper and candidate:
            members = tuple(candidate)
            qualified.append(
                ProdromeInterval(
                    start=timeline.points[members[0]].window.window_start,
                    end=timeline.points[members[-1]].window.window_end,
                    member_indices=members,
                    trigger_index=i,
                )
            )
            candidate = []
        elif prob < l_lower and clear_below_lower:
            candidate = []
    return qualified


def write_timeline_csv(
    timeline: OnsetTimeline, intervals: list[ProdromeInterval], path: str | Path
) -> None:
    member = {i for interval in intervals for i in interval.member_indices}
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["window_end", "probability", "in_prodrome"])
        for i, point in enumerate(timeline.points):
            prob = "" if point.probability is None else repr(point.probability)
            writer.writerow(
                [format_instant(point.window.window_end), prob, int(i in member)]
            )


def write_timeline_svg(
    timeline: OnsetTimeline,
    intervals: list[ProdromeInterval],
    path: str | Path,
    l_lower: float = DEFAULT_L_LOWER,
    l_upper: float = DEFAULT_L_UPPER,
) -> None:
    """Static probability-vs-time plot with prodrome intervals drawn as boxes."""
    width, height, margin = 800, 300, 40
    n = max(len(timeline.points), 1)

    def x_at(i: int) -> float:
        return margin + (width - 2 * margin) * (i / max(n - 1, 1))

    def y_at(p: float) -> float:
        return height - margin - (height - 2 * margin) * p

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(width),
        height=str(height),
        viewBox=f"0 0 {width} {height}",
    )
    ET.SubElement(
        svg, "rect", x="0", y="0", width=str(width), height=str(height), fill="white"
    )
    for interval in intervals:
        x0 = x_at(interval.member_indices[0])
        x1 = x_at(interval.trigger_index)
        ET.SubElement(
            svg,
            "rect",
            x=f"{x0:.1f}",
            y=str(margin),
            width=f"{max(x1 - x0, 2.0):.1f}",
            height=str(height - 2 * margin),
            fill="#f5c26b",
            opacity="0.4",
            stroke="#b8860b",
        )
    for bound in (l_lower, l_upper):
        y = y_at(bound)
        ET.SubElement(
            svg,
            "line",
            x1=str(margin),
            x2=str(width - margin),
            y1=f"{y:.1f}",
            y2=f"{y:.1f}",
            stroke="#999999",
            attrib={"stroke-dasharray": "4 3"},
        )
    defined = [
        (i, p.probability) for i, p in enumerate(timeline.points) if p.probability is not None
    ]
    if defined:
        points = " ".join(f"{x_at(i):.1f},{y_at(p):.1f}" for i, p in defined)
        ET.SubElement(
            svg, "polyline", points=points, fill="none", stroke="#2b6cb0",
            attrib={"stroke-width": "2"},
        )
    axis = ET.SubElement(svg, "g", stroke="#333333")
    ET.SubElement(axis, "line", x1=str(margin), x2=str(width - margin),
                  y1=str(height - margin), y2=str(height - margin))
    ET.SubElement(axis, "line", x1=str(margin), x2=str(margin),
                  y1=str(margin), y2=str(height - margin))
    label = ET.SubElement(svg, "text", x=str(margin), y="20", attrib={"font-size": "13"})
    label.text = f"onset probability timeline: {timeline.user_id}"
    ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=True)


def write_intervals_csv(
    timeline: OnsetTimeline, intervals: list[ProdromeInterval], path: str | Path
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["start", "end", "trigger_window_end"])
        for interval in intervals:
            trigger = timeline.points[interval.trigger_index].window
            writer.writerow(
                [
                    format_instant(interval.start),
                    format_instant(interval.end),
                    format_instant(trigger.window_end),
                ]
            )


def emit_timeline_artifacts(
    timeline: OnsetTimeline,
    intervals: list[ProdromeInterval],
    out_dir: str | Path,
    l_lower: float = DEFAULT_L_LOWER,
    l_upper: float = DEFAULT_L_UPPER,
) -> dict[str, Path]:
    """Write the timeline CSV, interval CSV, and SVG plot; filenames keyed by user."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "timeline_csv": out_dir / f"timeline_{timeline.user_id}.csv",
        "intervals_csv": out_dir / f"prodrome_{timeline.user_id}.csv",
        "svg": out_dir / f"timeline_{timeline.user_id}.svg",
    }
    write_timeline_csv(timeline, intervals, paths["timeline_csv"])
    write_intervals_csv(timeline, intervals, paths["intervals_csv"])
    write_timeline_svg(timeline, intervals, paths["svg"], l_lower, l_upper)
    return paths
