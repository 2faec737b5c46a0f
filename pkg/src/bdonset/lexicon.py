"""Pluggable lexicon file formats: category lexica and weighted lexica."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


def default_data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(str(resources.files("bdonset").joinpath("data", name)))


@dataclass
class CategoryLexicon:
    """Category -> word patterns; a trailing '*' means prefix match.

    One token may match several categories.
    """

    categories: tuple[str, ...]
    exact: dict[str, dict[str, bool]] = field(default_factory=dict)
    prefixes: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]]) -> "CategoryLexicon":
        categories: list[str] = []
        exact: dict[str, dict[str, bool]] = {}
        prefixes: dict[str, list[str]] = {}
        for category, pattern in pairs:
            pattern = pattern.lower()
            if category not in exact:
                categories.append(category)
                exact[category] = {}
                prefixes[category] = []
            if pattern.endswith("*"):
                prefixes[category].append(pattern[:-1])
            else:
                exact[category][pattern] = True
        return cls(
            categories=tuple(categories),
            exact=exact,
            prefixes={c: tuple(p) for c, p in prefixes.items()},
        )

    @classmethod
    def load(cls, path: str | Path) -> "CategoryLexicon":
        pairs = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            category, pattern = line.split("\t")
            pairs.append((category, pattern))
        if not pairs:
            raise ValueError(f"empty category lexicon: {path}")
        return cls.from_pairs(pairs)

    def match(self, token: str) -> list[str]:
        hits = []
        for category in self.categories:
            if token in self.exact[category] or any(
                token.startswith(p) for p in self.prefixes[category]
            ):
                hits.append(category)
        return hits


@dataclass
class WeightedLexicon:
    """word -> real weight, plus an optional intercept row (_intercept)."""

    weights: dict[str, float]
    intercept: float = 0.0

    @classmethod
    def load(cls, path: str | Path) -> "WeightedLexicon":
        weights: dict[str, float] = {}
        intercept = 0.0
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, value = line.split("\t")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"non-finite weight for {word!r} in {path}")
            if word == "_intercept":
                intercept = value
            else:
                weights[word.lower()] = value
        return cls(weights=weights, intercept=intercept)

    def score(self, token: str) -> float:
        return self.weights.get(token, 0.0)
