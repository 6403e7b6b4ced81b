"""Model fitting, prediction, classification boundary, and scored I/O."""

import dataclasses

import numpy as np
import pytest

from helpers import make_record
from leadshare.corpus import bri_income_class, classify_topics, filter_corpus, impact_factor_bin
from leadshare.errors import ConfigError, MalformedRecord, TooFewExamples
from leadshare.features import LeadFeatureVector, build_profiles, extract_features
from leadshare.leadmodel import (
    LEADER,
    SUPPORTER,
    LinearLeadModel,
    classify,
    evaluate,
    fit,
    predict,
    predict_many,
    read_model,
    read_scored,
    rescore,
    score_corpus,
    write_eval,
    write_model,
    write_scored,
)
from leadshare.synth import separable_examples


def vec(**overrides) -> LeadFeatureVector:
    base = dict(
        f1_refs_previously_cited=0, f2_keyword_overlap=0, f3_self_citations=0,
        f4_career_age=0, f5_prior_pub_count=0, f6_citations_received=0,
        f7_unique_keywords=0, f8_first_or_last_count=0, f9_affiliation_score=0.0,
    )
    base.update(overrides)
    return LeadFeatureVector(**base)


def flat_model(intercept=0.0, weights=(0.0,) * 9) -> LinearLeadModel:
    return LinearLeadModel(
        weights=tuple(weights), intercept=intercept,
        feature_means=(0.0,) * 9, feature_stds=(1.0,) * 9,
        seed=0, split_ratio=0.9, n_train=100,
    )


def test_classify_boundary():
    assert classify(0.65) == SUPPORTER
    assert classify(0.65 + 1e-9) == LEADER
    assert classify(0.66) == LEADER
    assert classify(0.0) == SUPPORTER
    assert classify(0.7, threshold=0.7) == SUPPORTER


def test_predict_intercept_only():
    model = flat_model(intercept=0.3)
    assert predict(model, vec()) == 0.3
    assert predict(model, vec(f5_prior_pub_count=40)) == 0.3


def test_predict_hand_model():
    weights = [0.0] * 9
    weights[8] = 1.0
    model = flat_model(weights=tuple(weights))
    assert predict(model, vec(f9_affiliation_score=0.4)) == pytest.approx(0.4)


def test_predict_clamps():
    assert predict(flat_model(intercept=1.2), vec()) == 1.0
    assert predict(flat_model(intercept=-0.2), vec()) == 0.0


def test_exact_linear_labels_recovered():
    rng = np.random.default_rng(1)
    examples = []
    for _ in range(60):
        v = vec(
            f1_refs_previously_cited=int(rng.integers(0, 20)),
            f5_prior_pub_count=int(rng.integers(0, 30)),
            f9_affiliation_score=float(rng.uniform(0, 1)),
        )
        y = 0.15 + 0.01 * v.f1_refs_previously_cited + 0.005 * v.f5_prior_pub_count \
            + 0.2 * v.f9_affiliation_score
        examples.append((v, y))
    model, _ = fit(examples, seed=3)
    for v, y in examples:
        assert predict(model, v) == pytest.approx(y, abs=1e-9)


def test_fit_is_deterministic():
    examples = separable_examples(seed=4)
    a, _ = fit(examples, seed=11)
    b, _ = fit(examples, seed=11)
    assert a == b


def test_separable_examples_classified():
    model, report = fit(separable_examples(seed=2), seed=0)
    assert report.precision >= 0.95
    assert report.recall >= 0.95


def test_eval_identities():
    probs = np.array([0.9, 0.8, 0.2, 0.7, 0.1])
    labels = np.array([1.0, 0.0, 1.0, 1.0, 0.0])
    report = evaluate(probs, labels, threshold=0.65)
    assert (report.tp, report.fp, report.fn, report.tn) == (2, 1, 1, 1)
    assert report.precision == pytest.approx(2 / 3)
    assert report.recall == pytest.approx(2 / 3)


def test_eval_zero_divisions():
    report = evaluate(np.array([0.1, 0.2]), np.array([0.0, 0.0]), 0.65)
    assert report.precision == 0.0 and report.recall == 0.0


def test_recall_never_rises_with_threshold():
    rng = np.random.default_rng(8)
    probs = rng.uniform(size=500)
    labels = (rng.uniform(size=500) < 0.5).astype(float)
    recalls = [
        evaluate(probs, labels, t).recall
        for t in np.arange(0.05, 1.0, 0.05)
    ]
    assert all(a >= b for a, b in zip(recalls, recalls[1:]))


def test_degenerate_feature_frozen_out():
    examples = []
    rng = np.random.default_rng(5)
    for i in range(40):
        v = vec(
            f4_career_age=7,  # constant across all examples
            f1_refs_previously_cited=int(rng.integers(0, 10)),
        )
        examples.append((v, 0.1 + 0.05 * v.f1_refs_previously_cited))
    model, _ = fit(examples, seed=0)
    assert model.weights[3] == 0.0
    assert model.feature_stds[3] == 1.0


def test_collinear_design_uses_ridge():
    rng = np.random.default_rng(6)
    examples = []
    for _ in range(40):
        f1 = int(rng.integers(0, 10))
        # f2 duplicates f1 exactly, so the standardized design is singular
        examples.append((vec(f1_refs_previously_cited=f1, f2_keyword_overlap=f1),
                         0.05 * f1))
    model, _ = fit(examples, seed=0)
    assert model.damping > 0.0


def test_too_few_examples():
    examples = separable_examples(seed=0)[:19]
    with pytest.raises(TooFewExamples):
        fit(examples, seed=0)


def test_fit_rejects_bad_config():
    examples = separable_examples(seed=0)
    with pytest.raises(ConfigError):
        fit(examples, split_ratio=1.0)
    with pytest.raises(ConfigError):
        fit(examples, family="forest")
    bad = [(v, 2.0) for v, _ in examples[:30]]
    with pytest.raises(ConfigError):
        fit(bad)


def test_logistic_family():
    examples = separable_examples(seed=7)
    model, report = fit(examples, seed=0, family="logistic")
    assert model.family == "logistic"
    assert report.precision >= 0.95 and report.recall >= 0.95
    probs = predict_many(model, np.array([v.as_array() for v, _ in examples]))
    labels = np.array([y for _, y in examples])
    assert np.all((probs >= 0.0) & (probs <= 1.0))
    # separable data saturates the sigmoid toward the true labels
    assert np.all(np.abs(probs - labels) < 0.01)


def test_feature_rescaling_invariance():
    examples = separable_examples(seed=9)
    scaled = [
        (dataclasses.replace(v, f6_citations_received=v.f6_citations_received * 1000), y)
        for v, y in examples
    ]
    base_model, _ = fit(examples, seed=1)
    scaled_model, _ = fit(scaled, seed=1)
    for (v, _), (w, _) in zip(examples[:50], scaled[:50]):
        assert predict(scaled_model, w) == pytest.approx(
            predict(base_model, v), abs=1e-9
        )


def test_positive_weight_monotonicity():
    model, _ = fit(separable_examples(seed=12), seed=0)
    i = int(np.argmax(model.weights))
    assert model.weights[i] > 0

    def raw(x):
        return model.intercept + sum(
            w * (xi - m) / s
            for w, xi, m, s in zip(
                model.weights, x, model.feature_means, model.feature_stds
            )
        )

    base = vec().as_array()
    bumped = base.copy()
    bumped[i] += 10
    assert raw(bumped) > raw(base)


def test_model_file_round_trip(tmp_path):
    model, report = fit(separable_examples(seed=3), seed=2)
    path = tmp_path / "model.tsv"
    write_model(model, path)
    assert read_model(path) == model
    write_eval(report, tmp_path / "eval.tsv")
    header = (tmp_path / "eval.tsv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "threshold\tprecision\trecall\ttp\tfp\tfn\ttn"


def test_model_file_missing_field(tmp_path):
    model, _ = fit(separable_examples(seed=3), seed=2)
    path = tmp_path / "model.tsv"
    write_model(model, path)
    lines = [l for l in path.read_text().splitlines() if not l.startswith("stds")]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        read_model(path)


@pytest.fixture(scope="module")
def scoring_setup(request):
    region_map = request.getfixturevalue("region_map")
    topics = request.getfixturevalue("topics")
    bri = request.getfixturevalue("bri")
    corpus = [
        make_record(
            "P1", 2019, date="2019-03-01",
            authors=("A1", "A2"), countries=("China", "United States"),
            refs=(), concepts=(("alpha", 0),),
        ),
        make_record(
            "P2", 2020, date="2020-04-01",
            authors=("A1", "A2"), countries=("China", "United States"),
            refs=("P1",), concepts=(("alpha", 0), ("beta", 1)),
        ),
    ]
    model, _ = fit(separable_examples(seed=1), seed=0)
    return corpus, model, region_map, topics, bri


def test_score_corpus_matches_composition(scoring_setup):
    corpus, model, region_map, topics, bri = scoring_setup
    edges = (1, 2, 4, 8, 16)
    filtered = list(filter_corpus(corpus, region_map))
    index = build_profiles(corpus)
    rows = list(score_corpus(model, filtered, index, region_map, topics, bri, edges))
    assert len(rows) == 4
    for row in rows:
        rec = next(r for r in corpus if r.paper_id == row.paper_id)
        v = extract_features(rec, row.author_id, index)
        assert row.lead_prob == pytest.approx(predict(model, v), abs=1e-12)
        assert row.is_leader == (row.lead_prob > 0.65)
        assert row.region == region_map.region_of(row.country)
        areas, fields = classify_topics(rec, topics)
        assert (row.areas, row.fields) == (areas, fields)
        assert row.if_bin == impact_factor_bin(rec.impact_factor, edges)
        assert row.bri_class == bri_income_class(row.country, bri)


def test_scored_file_round_trip(tmp_path, scoring_setup):
    corpus, model, region_map, topics, bri = scoring_setup
    filtered = list(filter_corpus(corpus, region_map))
    index = build_profiles(corpus)
    rows = list(score_corpus(model, filtered, index, region_map, topics, bri, (1, 2, 4, 8, 16)))
    path = tmp_path / "scored.tsv"
    write_scored(rows, path)
    again = list(read_scored(path))
    assert len(again) == len(rows)
    for before, after in zip(rows, again):
        assert after.lead_prob == pytest.approx(before.lead_prob, abs=1e-9)
        assert dataclasses.replace(after, lead_prob=0.0) == dataclasses.replace(
            before, lead_prob=0.0
        )


def test_scored_file_rejects_missing_tags(tmp_path):
    path = tmp_path / "scored.tsv"
    path.write_text(
        "paper_id\tauthor_id\tregion\tyear\tlead_prob\tis_leader\ttags\n"
        "P1\tA1\tChina\t2020\t0.5\tfalse\tareas=;if_bin=0\n",
        encoding="utf-8",
    )
    with pytest.raises(MalformedRecord):
        list(read_scored(path))


def test_rescore_flips_classification():
    from leadshare.metrics import ScoredAuthorship

    def stub(author_id, prob):
        return ScoredAuthorship(
            paper_id="P1", author_id=author_id, region="China", year=2020,
            lead_prob=prob, is_leader=prob > 0.65, areas=frozenset(),
            fields=frozenset(), if_bin=0, bri_class="NonSignatory", country="China",
        )

    rows = [stub("A1", 0.6), stub("A2", 0.7)]
    assert [r.is_leader for r in rescore(rows, 0.5)] == [True, True]
    high = list(rescore(rows, 0.75))
    assert [r.is_leader for r in high] == [False, False]
    assert [r.lead_prob for r in high] == [0.6, 0.7]
