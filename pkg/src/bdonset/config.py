"""Pipeline configuration: sectioned key=value files with flag overrides."""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

ENV_CONFIG_VAR = "BDONSET_CONFIG"

DEFAULTS: dict[str, dict[str, str]] = {
    "windows": {"alpha_months": "2", "step_days": "7"},
    "features": {
        "n_max": "1000",
        "neutral_band": "0.0",
        "segment_days": "7",
        "constant_emotion_denominator": "false",
        "literal_liwc_norm": "true",
    },
    "forest": {"n_trees": "100", "max_depth": "", "min_samples_leaf": "1"},
    "prodrome": {"l_lower": "0.3", "l_upper": "0.7", "clear_below_lower": "false"},
    "synth": {
        "n_bipolar": "20",
        "n_regular": "20",
        "span_days": "420",
        "base_rate": "2.0",
        "rate_mult": "1.5",
        "late_mult": "4.0",
        "flip_mult": "5.0",
        "energy_bias": "0.18",
    },
    "run": {"seed": "", "workers": "1"},
    "report": {
        "alpha_months": "2,3,6,9,12",
        "variants": "",  # empty -> all variants
    },
}


@dataclass
class PipelineConfig:
    alpha_months: int = 2
    step_days: float = 7.0
    n_max: int = 1000
    neutral_band: float = 0.0
    segment_days: float = 7.0
    constant_emotion_denominator: bool = False
    literal_liwc_norm: bool = True
    n_trees: int = 100
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    l_lower: float = 0.3
    l_upper: float = 0.7
    clear_below_lower: bool = False
    n_bipolar: int = 20
    n_regular: int = 20
    span_days: int = 420
    base_rate: float = 2.0
    rate_mult: float = 1.5
    late_mult: float = 4.0
    flip_mult: float = 5.0
    energy_bias: float = 0.18
    seed: Optional[int] = None
    workers: int = 1
    report_alpha_months: tuple[int, ...] = (2, 3, 6, 9, 12)
    report_variants: tuple[str, ...] = ()

    def validate(self) -> list[str]:
        errors = []
        if self.alpha_months not in (2, 3, 6, 9, 12):
            errors.append(f"windows.alpha_months must be one of 2,3,6,9,12, got {self.alpha_months}")
        if not (0.0 <= self.l_lower < self.l_upper <= 1.0):
            errors.append(f"prodrome bounds invalid: ({self.l_lower}, {self.l_upper})")
        if self.n_trees < 1:
            errors.append("forest.n_trees must be >= 1")
        if self.step_days <= 0:
            errors.append("windows.step_days must be > 0")
        for m in self.report_alpha_months:
            if m not in (2, 3, 6, 9, 12):
                errors.append(f"report.alpha_months entry invalid: {m}")
        return errors

    def dump(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name}={getattr(self, f.name)}")
        return "\n".join(lines)


def _as_bool(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def load_config(path: Optional[str] = None) -> PipelineConfig:
    """Build a config from defaults, overlaid with the file at `path` (or the
    path in the environment variable) when present."""
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULTS)
    if path is None:
        path = os.environ.get(ENV_CONFIG_VAR)
    if path:
        if not Path(path).exists():
            raise FileNotFoundError(f"config file not found: {path}")
        parser.read(path)
    g = parser.get
    max_depth = g("forest", "max_depth").strip()
    seed = g("run", "seed").strip()
    variants = tuple(v.strip() for v in g("report", "variants").split(",") if v.strip())
    return PipelineConfig(
        alpha_months=parser.getint("windows", "alpha_months"),
        step_days=parser.getfloat("windows", "step_days"),
        n_max=parser.getint("features", "n_max"),
        neutral_band=parser.getfloat("features", "neutral_band"),
        segment_days=parser.getfloat("features", "segment_days"),
        constant_emotion_denominator=_as_bool(g("features", "constant_emotion_denominator")),
        literal_liwc_norm=_as_bool(g("features", "literal_liwc_norm")),
        n_trees=parser.getint("forest", "n_trees"),
        max_depth=int(max_depth) if max_depth else None,
        min_samples_leaf=parser.getint("forest", "min_samples_leaf"),
        l_lower=parser.getfloat("prodrome", "l_lower"),
        l_upper=parser.getfloat("prodrome", "l_upper"),
        clear_below_lower=_as_bool(g("prodrome", "clear_below_lower")),
        n_bipolar=parser.getint("synth", "n_bipolar"),
        n_regular=parser.getint("synth", "n_regular"),
        span_days=parser.getint("synth", "span_days"),
        base_rate=parser.getfloat("synth", "base_rate"),
        rate_mult=parser.getfloat("synth", "rate_mult"),
        late_mult=parser.getfloat("synth", "late_mult"),
        flip_mult=parser.getfloat("synth", "flip_mult"),
        energy_bias=parser.getfloat("synth", "energy_bias"),
        seed=int(seed) if seed else None,
        workers=parser.getint("run", "workers"),
        report_alpha_months=tuple(
            int(m) for m in g("report", "alpha_months").split(",") if m.strip()
        ),
        report_variants=variants,
    )
