"""Acceptance gate: one test per criterion, tolerances pinned.

Each test prints a single "ACCEPTANCE n: PASS" line on success (visible with
-v / -s); a failing criterion fails its test.
"""
import csv
import math
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from bdonset.bdplf import PatternOfLifeFeaturizer, emotion_scores, tweet_rate_difference
from bdonset.cli import main
from bdonset.corpus import DAY_SECONDS, parse_instant
from bdonset.features import VariantExtractor, onset_training_slices
from bdonset.forest import cross_validate
from bdonset.lexicon import CategoryLexicon, default_data_path
from bdonset.phonology import (
    DifficultyWeights,
    PhonemeFeatureTable,
    PronunciationLexicon,
    ipa_transcribe,
    pf_score,
    user_energy,
)
from bdonset.prodrome import OnsetTimeline, TimelinePoint, locate_prodrome
from bdonset.synth import SynthConfig, generate
from bdonset.textfeat import build_vocabulary, normalize_tfidf, slice_ngrams, tfidf_vector
from bdonset.windows import PeriodSlice

from conftest import T0, make_slice

README = Path(__file__).resolve().parent.parent / "README.md"

COHORT_SEED = 20260823


@pytest.fixture(scope="module")
def big_cohort():
    """The pinned-seed 100+100 cohort shared by criteria 6 and 7, with its
    generation time (counted against criterion 6's budget)."""
    t0 = time.perf_counter()
    corpus = generate(SynthConfig(n_bipolar=100, n_regular=100, span_days=420, seed=COHORT_SEED))
    return corpus, time.perf_counter() - t0


def test_criterion_01_non_reproducibility_stated():
    text = README.read_text(encoding="utf-8").lower()
    assert "not reproducible" in text
    assert "0.984" in text
    print("ACCEPTANCE 1: PASS — README states published values are not reproducible")


def test_criterion_02_tfidf_oracle_equivalence():
    rng = np.random.default_rng(2)
    words = ["a", "be", "sad", "glad", "sleep", "run", "walk", "cry"]
    t0 = time.perf_counter()
    for _ in range(10):
        k = int(rng.integers(1, 6))
        slices = []
        for i in range(k):
            n_tokens = int(rng.integers(1, 51))
            tokens = list(rng.choice(words, size=n_tokens))
            # split tokens into 1-3 tweets
            cuts = sorted(rng.choice(range(1, n_tokens + 1), size=min(2, n_tokens), replace=False))
            texts, prev = [], 0
            for c in cuts + [n_tokens]:
                if c > prev:
                    texts.append(" ".join(tokens[prev:c]))
                    prev = c
            slices.append(make_slice(texts, user=f"u{i}"))
        vocab = build_vocabulary(slices, 1000)
        raw = np.vstack([tfidf_vector(s, vocab, k) for s in slices])
        got = normalize_tfidf(raw)
        # brute-force re-evaluation term by term
        grams_per_user = [slice_ngrams(s) for s in slices]
        expected_raw = np.zeros_like(raw)
        for u, grams in enumerate(grams_per_user):
            for j, term in enumerate(vocab.terms):
                df = sum(1 for g in grams_per_user if term in set(g))
                expected_raw[u, j] = grams.count(term) * math.log(k / (1 + df))
        norms = np.sqrt((expected_raw**2).sum(axis=0))
        expected = expected_raw / np.where(norms > 0, norms, 1.0)
        assert np.abs(raw - expected_raw).max() <= 1e-9
        assert np.abs(got - expected).max() <= 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"criterion 2 runtime {elapsed:.2f}s >= 1s"
    print(f"ACCEPTANCE 2: PASS — tf-idf matches brute force on 10 corpora in {elapsed:.2f}s")


def _timeline_of(probs):
    points = []
    for i, prob in enumerate(probs):
        window = PeriodSlice(
            user_id="u", window_end=T0 + i * 7 * DAY_SECONDS, window_days=60.0, tweets=()
        )
        points.append(TimelinePoint(window=window, probability=prob))
    return OnsetTimeline(user_id="u", points=tuple(points))


def test_criterion_03_locator_oracle_equivalence():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    for _ in range(1000):
        probs = [
            None if rng.random() < 0.08 else float(rng.random())
            for _ in range(int(rng.integers(0, 51)))
        ]
        lo = float(rng.uniform(0.0, 0.5))
        hi = float(rng.uniform(lo + 1e-6, 1.0))
        got = [
            (iv.member_indices, iv.trigger_index)
            for iv in locate_prodrome(_timeline_of(probs), lo, hi)
        ]
        # line-by-line pseudocode re-execution, including no-clear-below-lower
        expected, candidate = [], []
        for i, p in enumerate(probs):
            if p is None:
                continue
            if lo <= p <= hi:
                candidate.append(i)
            elif p > hi and candidate:
                expected.append((tuple(candidate), i))
                candidate = []
        assert got == expected
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"criterion 3 runtime {elapsed:.2f}s >= 1s"
    print(f"ACCEPTANCE 3: PASS — locator matches pseudocode on 1000 sequences in {elapsed:.2f}s")


def test_criterion_04_phonology_exactness():
    lex = PronunciationLexicon.load()
    table = PhonemeFeatureTable.load()
    weights = DifficultyWeights.load()
    assert ipa_transcribe("folder", lex) == ("f", "oʊ", "l", "d", "ə", "r")
    rng = np.random.default_rng(4)
    phonemes = sorted(table.features)
    for _ in range(1000):
        a = tuple(rng.choice(phonemes, size=rng.integers(0, 7)))
        b = tuple(rng.choice(phonemes, size=rng.integers(0, 7)))
        lhs = pf_score(a + b, table, weights)
        rhs = pf_score(a, table, weights) + pf_score(b, table, weights)
        assert (lhs == rhs).all()
    words = list(lex.entries)[:60] + ["zzoov"]
    for _ in range(100):
        tokens = list(rng.choice(words, size=rng.integers(1, 40)))
        base = make_slice([" ".join(tokens)])
        perm = list(tokens)
        rng.shuffle(perm)
        permuted = make_slice([" ".join(perm)])
        duplicated = make_slice([" ".join(tokens)] * 2)
        v0, c0 = user_energy(base, lex, table, weights)
        v1, c1 = user_energy(permuted, lex, table, weights)
        v2, c2 = user_energy(duplicated, lex, table, weights)
        assert (v0 == v1).all() and c0 == c1
        assert (v0 == v2).all() and c0 == c2
    print("ACCEPTANCE 4: PASS — pf_score additive, folder exact, user_energy invariant")


def test_criterion_05_feature_invariants():
    rng = np.random.default_rng(5)
    lex = PronunciationLexicon.load()
    emo_lex = CategoryLexicon.load(default_data_path("emotion.lex"))
    words = list(lex.entries)
    featurizer = PatternOfLifeFeaturizer()
    slices = []
    for i in range(200):
        n_tweets = int(rng.integers(1, 15))
        start = T0 + int(rng.integers(0, 10)) * DAY_SECONDS
        texts = [
            " ".join(rng.choice(words, size=rng.integers(1, 10))) for _ in range(n_tweets)
        ]
        slices.append(make_slice(texts, start=start, spacing=int(rng.integers(600, DAY_SECONDS))))
    X = featurizer.fit(slices).transform(slices)
    names = featurizer.get_feature_names_out()
    ratio_cols = [
        i
        for i, n in enumerate(names)
        if n in ("pos_ratio", "neg_ratio", "pos_combo", "neg_combo", "flips_ratio",
                 "mention_ratio", "frequent_mentions", "unique_mentions")
        or n.startswith("emot_")
    ]
    assert (X[:, ratio_cols] >= 0).all() and (X[:, ratio_cols] <= 1).all()
    for s in slices:
        total = emotion_scores(s, emo_lex).sum()
        assert total == pytest.approx(1.0) or total == 0.0
        assert tweet_rate_difference(s) >= 0.0
    # TRD equality on uniform arrivals: one tweet at the start of each day
    uniform = make_slice(["steady"] * 60, window_days=60.0, spacing=DAY_SECONDS)
    assert tweet_rate_difference(uniform) == pytest.approx(0.0)
    # tfidf sign rule over the random slices
    vocab = build_vocabulary(slices, 500)
    k = len(slices)
    for s in slices[:20]:
        v = tfidf_vector(s, vocab, k)
        grams = set(slice_ngrams(s))
        for j, (term, df) in enumerate(zip(vocab.terms, vocab.df)):
            if term not in grams:
                assert v[j] == 0.0
            elif df < k - 1:
                assert v[j] > 0.0
            elif df == k - 1:
                assert v[j] == 0.0
            else:
                assert v[j] < 0.0
    print("ACCEPTANCE 5: PASS — ratio bounds, emotion sums, TRD, tf-idf sign rule hold")


def test_criterion_06_synthetic_discriminability(big_cohort):
    corpus, gen_seconds = big_cohort
    t0 = time.perf_counter()
    data = onset_training_slices(corpus, 60.0)
    X_full = VariantExtractor("phon_bdplf").fit_transform(data.slices)
    full = cross_validate(X_full, data.labels, k=10, seed=11, n_trees=100)
    X_phon = VariantExtractor("phon").fit_transform(data.slices)
    phon = cross_validate(X_phon, data.labels, k=10, seed=11, n_trees=100)
    shuffled_labels = data.labels.copy()
    np.random.default_rng(11).shuffle(shuffled_labels)
    baseline = cross_validate(X_full, shuffled_labels, k=10, seed=11, n_trees=100)
    elapsed = gen_seconds + (time.perf_counter() - t0)
    prior = data.labels.mean()
    assert full.mean_precision >= 0.85
    assert full.mean_precision >= phon.mean_precision >= baseline.mean_precision
    assert abs(baseline.mean_precision - prior) <= 0.15
    assert elapsed < 180.0, f"criterion 6 runtime {elapsed:.1f}s >= 180s"
    print(
        f"ACCEPTANCE 6: PASS — phon_bdplf {full.mean_precision:.3f} >= phon "
        f"{phon.mean_precision:.3f} >= shuffled {baseline.mean_precision:.3f} "
        f"(prior {prior:.2f}) in {elapsed:.0f}s"
    )


def test_criterion_07_time_frame_trend(big_cohort):
    corpus, _ = big_cohort
    precisions = {}
    for months, alpha in ((2, 60.0), (12, 360.0)):
        data = onset_training_slices(corpus, alpha)
        X = VariantExtractor("clf").fit_transform(data.slices)
        precisions[months] = cross_validate(
            X, data.labels, k=10, seed=11, n_trees=100
        ).mean_precision
    margin = precisions[2] - precisions[12]
    assert margin >= 0.03, f"clf precision margin {margin:.3f} < 0.03"
    print(
        f"ACCEPTANCE 7: PASS — clf precision {precisions[2]:.3f} at 2mo vs "
        f"{precisions[12]:.3f} at 12mo (margin {margin:.3f})"
    )


def test_criterion_08_determinism_across_workers(tmp_path):
    cfg_tpl = (
        "[synth]\nn_bipolar = 8\nn_regular = 8\nspan_days = 150\n"
        "[forest]\nn_trees = 40\n[run]\nworkers = {workers}\n"
    )
    reports = []
    for run, workers in (("w1", 1), ("w2", 2), ("w1b", 1)):
        base = tmp_path / run
        base.mkdir()
        cfg = base / "cfg.ini"
        cfg.write_text(cfg_tpl.format(workers=workers), encoding="utf-8")
        assert main(["--config", str(cfg), "synth", "--seed", "77",
                     "--out-dir", str(base / "data")]) == 0
        assert main(["--config", str(cfg), "featurize",
                     "--corpus", str(base / "data" / "corpus.jsonl"),
                     "--truth", str(base / "data" / "truth.csv"),
                     "--variant", "phon_bdplf", "--out", str(base / "feats.csv")]) == 0
        assert main(["--config", str(cfg), "train",
                     "--corpus", str(base / "data" / "corpus.jsonl"),
                     "--truth", str(base / "data" / "truth.csv"),
                     "--variant", "phon_bdplf", "--seed", "77",
                     "--out", str(base / "model.json")]) == 0
        assert main(["--config", str(cfg), "cv", "--features", str(base / "feats.csv"),
                     "--k", "8", "--seed", "77", "--out", str(base / "cv.csv")]) == 0
        reports.append(
            (
                (base / "data" / "corpus.jsonl").read_bytes(),
                (base / "feats.csv").read_bytes(),
                (base / "model.json").read_bytes(),
                (base / "cv.csv").read_bytes(),
            )
        )
    assert reports[0] == reports[1] == reports[2]
    print("ACCEPTANCE 8: PASS — synth+train+cv byte-identical across reruns and worker counts")


def test_criterion_09_dimension_contracts():
    corpus = generate(SynthConfig(n_bipolar=3, n_regular=3, span_days=90, seed=9))
    data = onset_training_slices(corpus, 60.0)
    dims = {}
    for variant in ("bdplf", "plf", "phon", "phon_bdplf", "emot_ag_phon"):
        X = VariantExtractor(variant).fit_transform(data.slices)
        dims[variant] = X.shape[1]
    assert dims == {
        "bdplf": 21,
        "plf": 19,
        "phon": 8,
        "phon_bdplf": 29,
        "emot_ag_phon": 20,
    }
    print(f"ACCEPTANCE 9: PASS — dimensions {dims}")


def test_criterion_10_end_to_end_smoke(tmp_path):
    cfg_tpl = (
        "[synth]\nn_bipolar = 12\nn_regular = 12\nspan_days = 300\n"
        "[forest]\nn_trees = 100\n"
        "[report]\nalpha_months = 2\nvariants = phon_bdplf\n"
    )
    hits = 0
    artifacts_checked = False
    for seed in range(10):
        base = tmp_path / f"seed{seed}"
        base.mkdir()
        cfg = base / "cfg.ini"
        cfg.write_text(cfg_tpl, encoding="utf-8")
        run = ["--config", str(cfg)]
        data = base / "data"
        assert main(run + ["synth", "--seed", str(seed), "--out-dir", str(data)]) == 0
        corpus = str(data / "corpus.jsonl")
        truth = str(data / "truth.csv")
        assert main(run + ["filter", "--corpus", corpus, "--out", str(base / "worklist.csv")]) == 0
        assert main(run + ["featurize", "--corpus", corpus, "--truth", truth,
                           "--variant", "phon_bdplf", "--out", str(base / "feats.csv")]) == 0
        assert main(run + ["train", "--corpus", corpus, "--truth", truth,
                           "--variant", "phon_bdplf", "--seed", str(seed + 100),
                           "--out", str(base / "model.json")]) == 0
        out = base / "tl"
        assert main(run + ["timeline", "--corpus", corpus, "--truth", truth,
                           "--model", str(base / "model.json"), "--user", "bd0000",
                           "--out-dir", str(out)]) == 0
        assert main(run + ["prodrome", "--timeline", str(out / "timeline_raw_bd0000.csv"),
                           "--user", "bd0000", "--out-dir", str(out)]) == 0
        assert main(run + ["report", "--corpus", corpus, "--truth", truth, "--k", "8",
                           "--seed", str(seed), "--out", str(base / "report.md")]) == 0
        # well-formed artifacts
        ET.parse(out / "timeline_bd0000.svg")
        with (out / "timeline_bd0000.csv").open() as handle:
            assert list(csv.DictReader(handle))
        artifacts_checked = True
        # injected onset window [tau-60d, tau] vs detected span
        with (data / "truth.csv").open() as handle:
            tau = {
                r["user_id"]: parse_instant(r["tau_utc"])
                for r in csv.DictReader(handle)
                if r["tau_utc"]
            }["bd0000"]
        onset_lo, onset_hi = tau - 60 * DAY_SECONDS, tau
        with (out / "prodrome_bd0000.csv").open() as handle:
            for row in csv.DictReader(handle):
                lo = parse_instant(row["start"])
                hi = max(parse_instant(row["end"]), parse_instant(row["trigger_window_end"]))
                if lo <= onset_hi and hi >= onset_lo:
                    hits += 1
                    break
    assert artifacts_checked
    assert hits >= 8, f"onset overlap in only {hits}/10 seeded runs (< 80%)"
    print(f"ACCEPTANCE 10: PASS — end-to-end chain exits 0; onset overlap in {hits}/10 runs")
