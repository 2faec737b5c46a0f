"""Command-line orchestration of the full pipeline."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import cohort, prodrome, synth
from .bdplf import PatternOfLifeConfig
from .config import PipelineConfig, load_config
from .corpus import Corpus, Group, format_instant, load_corpus, parse_instant, save_corpus
from .features import (
    VARIANTS,
    VariantExtractor,
    onset_training_slices,
    train_variant_model,
)
from .forest import ForestModel, cross_validate
from .lexicon import default_data_path
from .windows import PeriodSlice, alpha_days_for_months

log = logging.getLogger(__name__)


def _pol_config(cfg: PipelineConfig) -> PatternOfLifeConfig:
    return PatternOfLifeConfig(
        neutral_band=cfg.neutral_band,
        segment_days=cfg.segment_days,
        constant_emotion_denominator=cfg.constant_emotion_denominator,
    )


def _require_seed(args, cfg: PipelineConfig) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise SystemExit("error: --seed is required (or set run.seed in the config)")
    return int(seed)


def _load_labeled_corpus(args, require_truth: bool = True) -> Corpus:
    corpus = load_corpus(args.corpus)
    if getattr(args, "truth", None):
        corpus = synth.apply_truth(corpus, synth.read_truth(args.truth))
    elif require_truth:
        raise SystemExit("error: --truth assignment file is required")
    return corpus


def _write_features_csv(path, user_ids, labels, names, X) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user_id", "label", *names])
        for uid, label, row in zip(user_ids, labels, X):
            writer.writerow([uid, int(label), *[repr(float(v)) for v in row]])


def _read_features_csv(path):
    path = Path(path)
    if not path.exists():
        raise SystemExit(f"error: feature CSV not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        names = header[2:]
        user_ids, labels, rows = [], [], []
        for row in reader:
            user_ids.append(row[0])
            labels.append(int(row[1]))
            rows.append([float(v) for v in row[2:]])
    return user_ids, np.array(labels, dtype=int), names, np.array(rows, dtype=float)


def cmd_ingest(args, cfg: PipelineConfig) -> int:
    corpus = load_corpus(args.corpus)
    report = corpus.provenance
    print(
        f"loaded {len(corpus.users)} users, {report.loaded_tweets} tweets, "
        f"{len(report.skipped_lines)} skipped lines, {report.duplicate_ids} duplicate ids"
    )
    return 0


def cmd_filter(args, cfg: PipelineConfig) -> int:
    corpus = load_corpus(args.corpus)
    keys = {k.strip().lower() for k in args.keys.split(",") if k.strip()}
    time_keys = {
        line.strip()
        for line in Path(args.time_keywords).read_text(encoding="utf-8").splitlines()
        if line.strip()
    }
    candidates = cohort.minimum_keyword_search(corpus, keys)
    worklist = cohort.time_keyword_filter(corpus, candidates, time_keys)
    cohort.write_review_worklist(corpus, worklist, args.out)
    filtered, removed = cohort.language_activity_filter(corpus)
    if args.filtered_corpus:
        save_corpus(filtered, args.filtered_corpus)
    print(
        f"{len(candidates)} keyword matches, {len(worklist)} with time keywords, "
        f"{len(removed)} users removed by language/activity filter"
    )
    return 0


def cmd_label(args, cfg: PipelineConfig) -> int:
    corpus = load_corpus(args.corpus)
    labels = cohort.read_label_file(args.labels)
    corpus, errors = cohort.apply_diagnosis_labels(corpus, labels)
    for error in errors:
        print(f"label error: {error}", file=sys.stderr)
    if args.mark_rest_regular:
        rest = [
            uid for uid, u in corpus.users.items() if u.group is Group.UNLABELED
        ]
        corpus, _ = cohort.mark_regular_cohort(corpus, rest)
    synth.write_truth(corpus, args.out)
    n_bd = sum(1 for u in corpus.users.values() if u.group is Group.BIPOLAR)
    print(f"labeled {n_bd} bipolar users; assignments written to {args.out}")
    return 0


def cmd_featurize(args, cfg: PipelineConfig) -> int:
    corpus = _load_labeled_corpus(args)
    alpha_days = alpha_days_for_months(args.alpha_months or cfg.alpha_months)
    data = onset_training_slices(corpus, alpha_days)
    if not data.slices:
        raise SystemExit("error: no labeled users with non-empty onset windows")
    extractor = VariantExtractor(args.variant, n_max=cfg.n_max, pol_config=_pol_config(cfg))
    X = extractor.fit_transform(data.slices)
    _write_features_csv(args.out, data.user_ids, data.labels, extractor.feature_names(), X)
    print(f"wrote {X.shape[0]} rows x {X.shape[1]} features to {args.out}")
    return 0


def cmd_train(args, cfg: PipelineConfig) -> int:
    seed = _require_seed(args, cfg)
    corpus = _load_labeled_corpus(args)
    alpha_days = alpha_days_for_months(args.alpha_months or cfg.alpha_months)
    data = onset_training_slices(corpus, alpha_days)
    model = train_variant_model(
        args.variant,
        data,
        alpha_days,
        seed=seed,
        n_trees=cfg.n_trees,
        max_depth=cfg.max_depth,
        min_samples_leaf=cfg.min_samples_leaf,
        n_max=cfg.n_max,
        pol_config=_pol_config(cfg),
        n_jobs=cfg.workers,
    )
    model.save(args.out)
    print(f"trained {args.variant} on {len(data.slices)} slices; model saved to {args.out}")
    return 0


def cmd_cv(args, cfg: PipelineConfig) -> int:
    seed = _require_seed(args, cfg)
    _, labels, _, X = _read_features_csv(args.features)
    result = cross_validate(
        X,
        labels,
        k=args.k,
        seed=seed,
        n_trees=cfg.n_trees,
        max_depth=cfg.max_depth,
        min_samples_leaf=cfg.min_samples_leaf,
        n_jobs=cfg.workers,
    )
    with Path(args.out).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["fold", "precision", "recall"])
        for i, (p, r) in enumerate(zip(result.fold_precision, result.fold_recall)):
            writer.writerow([i, repr(p), repr(r)])
        writer.writerow(["mean", repr(result.mean_precision), repr(result.mean_recall)])
    print(
        f"cv mean precision {result.mean_precision:.4f}, "
        f"mean recall {result.mean_recall:.4f} -> {args.out}"
    )
    return 0


def cmd_timeline(args, cfg: PipelineConfig) -> int:
    corpus = _load_labeled_corpus(args, require_truth=False)
    model = ForestModel.load(args.model)
    user = corpus.users.get(args.user)
    if user is None:
        raise SystemExit(f"error: user {args.user} not in corpus")
    timeline = prodrome.onset_timeline(user, model, step_days=cfg.step_days)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"timeline_raw_{user.user_id}.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["window_end", "window_start", "probability"])
        for point in timeline.points:
            prob = "" if point.probability is None else repr(point.probability)
            writer.writerow(
                [
                    format_instant(point.window.window_end),
                    format_instant(point.window.window_start),
                    prob,
                ]
            )
    print(f"timeline with {len(timeline.points)} windows -> {path}")
    return 0


def _read_raw_timeline(path: str, user_id: str) -> prodrome.OnsetTimeline:
    points = []
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            end = parse_instant(row["window_end"])
            start = parse_instant(row["window_start"])
            window = PeriodSlice(
                user_id=user_id,
                window_end=end,
                window_days=(end - start) / 86400.0,
                tweets=(),
            )
            prob = float(row["probability"]) if row["probability"] else None
            points.append(prodrome.TimelinePoint(window=window, probability=prob))
    return prodrome.OnsetTimeline(user_id=user_id, points=tuple(points))


def cmd_prodrome(args, cfg: PipelineConfig) -> int:
    timeline = _read_raw_timeline(args.timeline, args.user)
    intervals = prodrome.locate_prodrome(
        timeline, cfg.l_lower, cfg.l_upper, cfg.clear_below_lower
    )
    paths = prodrome.emit_timeline_artifacts(
        timeline, intervals, args.out_dir, cfg.l_lower, cfg.l_upper
    )
    print(f"{len(intervals)} prodrome interval(s); artifacts in {args.out_dir}")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


def cmd_synth(args, cfg: PipelineConfig) -> int:
    seed = _require_seed(args, cfg)
    scfg = synth.SynthConfig(
        n_bipolar=cfg.n_bipolar,
        n_regular=cfg.n_regular,
        span_days=cfg.span_days,
        base_rate=cfg.base_rate,
        onset_days=alpha_days_for_months(cfg.alpha_months),
        rate_mult=cfg.rate_mult,
        late_mult=cfg.late_mult,
        flip_mult=cfg.flip_mult,
        energy_bias=cfg.energy_bias,
        seed=seed,
    )
    corpus = synth.generate(scfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out_dir / "corpus.jsonl")
    synth.write_truth(corpus, out_dir / "truth.csv")
    total = sum(len(u.tweets) for u in corpus.users.values())
    print(f"generated {len(corpus.users)} users, {total} tweets -> {out_dir}")
    return 0


def cmd_report(args, cfg: PipelineConfig) -> int:
    seed = _require_seed(args, cfg)
    corpus = _load_labeled_corpus(args)
    variants = list(cfg.report_variants) or sorted(VARIANTS)
    alphas = list(cfg.report_alpha_months)
    lines = [
        "# Onset prediction report",
        "",
        "Mean 10-fold CV precision of the onset class per feature-set variant",
        "and window length. Published precision values are specific to the",
        "original cohort and are not reproducible; only the grid shape and the",
        "relative ordering are comparable.",
        "",
        "| variant | " + " | ".join(f"{m} mo" for m in alphas) + " |",
        "|---| " + " | ".join("---" for _ in alphas) + " |",
    ]
    for variant in variants:
        cells = []
        for months in alphas:
            alpha_days = alpha_days_for_months(months)
            data = onset_training_slices(corpus, alpha_days)
            extractor = VariantExtractor(variant, n_max=cfg.n_max, pol_config=_pol_config(cfg))
            X = extractor.fit_transform(data.slices)
            result = cross_validate(
                X,
                data.labels,
                k=args.k,
                seed=seed,
                n_trees=cfg.n_trees,
                max_depth=cfg.max_depth,
                min_samples_leaf=cfg.min_samples_leaf,
                n_jobs=cfg.workers,
            )
            cells.append(f"{result.mean_precision:.3f}")
        lines.append(f"| {variant} | " + " | ".join(cells) + " |")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"report with {len(variants)} variants x {len(alphas)} window lengths -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdonset",
        description="Onset-period detection and prodrome localization from short-text archives",
    )
    parser.add_argument("--config", help="config file (key=value sections)")
    parser.add_argument("--print-config", action="store_true", help="dump resolved config and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ingest", help="load and validate a corpus archive")
    p.add_argument("--corpus", required=True)

    p = sub.add_parser("filter", help="cohort filters; emits the review worklist")
    p.add_argument("--corpus", required=True)
    p.add_argument("--keys", default="diagnosed,bipolar")
    p.add_argument("--time-keywords", default=str(default_data_path("time_keywords.txt")))
    p.add_argument("--out", required=True, help="review worklist CSV")
    p.add_argument("--filtered-corpus", help="optional path for the activity-filtered archive")

    p = sub.add_parser("label", help="apply diagnosis labels; emits cohort assignments")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True, help="CSV: user_id,tau_year,tau_month,evidence_tweet_id")
    p.add_argument("--mark-rest-regular", action="store_true")
    p.add_argument("--out", required=True, help="assignment CSV (user_id,group,tau_utc)")

    p = sub.add_parser("featurize", help="emit a feature CSV for one variant")
    p.add_argument("--corpus", required=True)
    p.add_argument("--truth", required=True, help="assignment CSV")
    p.add_argument("--variant", default="phon_bdplf", choices=sorted(VARIANTS))
    p.add_argument("--alpha-months", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a forest on onset windows")
    p.add_argument("--corpus", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--variant", default="phon_bdplf", choices=sorted(VARIANTS))
    p.add_argument("--alpha-months", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cv", help="stratified k-fold precision/recall from a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("timeline", help="sliding-window onset probabilities for one user")
    p.add_argument("--corpus", required=True)
    p.add_argument("--truth")
    p.add_argument("--model", required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("prodrome", help="locate prodromal intervals on a timeline")
    p.add_argument("--timeline", required=True, help="raw timeline CSV from the timeline command")
    p.add_argument("--user", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled cohort")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("report", help="CV precision grid over variants and window lengths")
    p.add_argument("--corpus", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "filter": cmd_filter,
    "label": cmd_label,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "cv": cmd_cv,
    "timeline": cmd_timeline,
    "prodrome": cmd_prodrome,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.print_config:
        print(cfg.dump())
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    errors = cfg.validate()
    if errors:
        for error in errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args, cfg)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
