"""Author profile index and the nine lead-prediction features.

The hand corpus below is small enough to verify every feature by eye;
the property tests check the sweep implementation against a brute-force
oracle that rescans the raw record list per query.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_record, oracle_features, vector_as_tuple
from leadshare.errors import AuthorNotOnPaper, DuplicatePaperId, MalformedRecord
from leadshare.features import (
    build_profiles,
    extract_all,
    extract_features,
    read_features,
    write_features,
)
from leadshare.records import AuthorshipRecord, PublicationRecord
from leadshare.synth import random_corpus


def hand_corpus():
    return [
        make_record(
            "P1", 2010, date="2010-01-10",
            authors=("A1", "A2"), countries=("China", "United States"),
            institutions=("I1", "I2"),
            refs=("X1",), concepts=(("alpha", 0), ("beta", 2)),
        ),
        make_record(
            "P2", 2012, date=None,
            authors=("A2", "A1"), countries=("United States", "China"),
            institutions=("I2", "I1"),
            refs=("P1", "X1"), concepts=(("alpha", 0), ("gamma", 1)),
        ),
        make_record(
            "P3", 2015, date="2015-06-01",
            authors=("A1", "A3", "A2"), countries=("China", "China", "United States"),
            institutions=("I1", "I3", "I2"),
            refs=("P1", "P2", "X2"), concepts=(("beta", 2), ("delta", 0)),
        ),
        # same sort date as P3: neither is prior to the other
        make_record(
            "P4", 2015, date="2015-06-01",
            authors=("A1", "A4"), countries=("China", "Japan"),
            institutions=("I1", "I4"),
            refs=("P2",), concepts=(("alpha", 0),),
        ),
        make_record(
            "P5", 2016, date="2016-02-02",
            authors=("A4", "A1"), countries=("Japan", "China"),
            institutions=("I4", "I1"),
            refs=("P3", "P1"), concepts=(("alpha", 0), ("beta", 2), ("eps", 3)),
        ),
    ]


@pytest.fixture(scope="module")
def hand_index():
    corpus = hand_corpus()
    return corpus, build_profiles(corpus)


def test_established_author(hand_index):
    corpus, index = hand_index
    v = extract_features(corpus[4], "A1", index)
    assert vector_as_tuple(v) == (1, 2, 2, 6, 4, 4, 4, 4, 1.0)


def test_short_history_author(hand_index):
    corpus, index = hand_index
    v = extract_features(corpus[4], "A4", index)
    assert vector_as_tuple(v) == (0, 1, 0, 1, 1, 0, 1, 1, 0.5)


def test_same_date_paper_is_not_prior(hand_index):
    corpus, index = hand_index
    v = extract_features(corpus[2], "A1", index)
    # P4 shares P3's date, so A1 has only P1 and P2 behind P3
    assert v.f5_prior_pub_count == 2
    assert vector_as_tuple(v) == (1, 1, 2, 5, 2, 1, 3, 2, 1.0)


def test_debut_author_all_zero(hand_index):
    corpus, index = hand_index
    v = extract_features(corpus[2], "A3", index)
    assert vector_as_tuple(v) == (0, 0, 0, 0, 0, 0, 0, 0, 0.0)


def test_oracle_agrees_on_hand_corpus(hand_index):
    corpus, index = hand_index
    for rec in corpus:
        for a in rec.authorships:
            v = extract_features(rec, a.author_id, index)
            assert vector_as_tuple(v) == pytest.approx(
                oracle_features(corpus, rec, a.author_id), abs=1e-12
            )


def test_author_not_on_paper(hand_index):
    corpus, index = hand_index
    with pytest.raises(AuthorNotOnPaper):
        extract_features(corpus[0], "A9", index)


def test_duplicate_paper_id():
    corpus = hand_corpus()
    with pytest.raises(DuplicatePaperId):
        build_profiles(corpus + [corpus[0]])


def test_empty_corpus_index():
    index = build_profiles([])
    assert index.prior_papers("A1", (2020, 1, 1)) == []


def test_input_order_is_irrelevant():
    corpus = hand_corpus()
    shuffled = list(corpus)
    random.Random(9).shuffle(shuffled)
    a = build_profiles(corpus)
    b = build_profiles(shuffled)
    for rec in corpus:
        for auth in rec.authorships:
            assert extract_features(rec, auth.author_id, a) == extract_features(
                rec, auth.author_id, b
            )


def test_extract_all_one_row_per_author(hand_index):
    corpus, index = hand_index
    rows = list(extract_all(corpus, index))
    assert len(rows) == sum(len(r.authorships) for r in corpus)
    assert rows[0][:2] == ("P1", "A1")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_oracle_equivalence_random(seed):
    corpus = random_corpus(seed, max_papers=12, max_authors=6)
    index = build_profiles(corpus)
    for rec in corpus:
        for a in rec.authorships:
            v = extract_features(rec, a.author_id, index)
            expected = oracle_features(corpus, rec, a.author_id)
            assert vector_as_tuple(v)[:8] == expected[:8]
            assert abs(v.f9_affiliation_score - expected[8]) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_temporal_causality(seed):
    corpus = random_corpus(seed, max_papers=15, max_authors=6)
    ordered = sorted(corpus, key=lambda r: (r.sort_date(), r.paper_id))
    focal = ordered[len(ordered) // 2]
    truncated = [r for r in corpus if r.sort_date() <= focal.sort_date()]
    full_index = build_profiles(corpus)
    cut_index = build_profiles(truncated)
    for a in focal.authorships:
        assert extract_features(focal, a.author_id, full_index) == extract_features(
            focal, a.author_id, cut_index
        )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_monotone_history(seed):
    corpus = random_corpus(seed, max_papers=10, max_authors=5)
    focal = max(corpus, key=lambda r: (r.sort_date(), r.paper_id))
    author = focal.authorships[0].author_id
    before = extract_features(focal, author, build_profiles(corpus))
    extra = make_record(
        "EARLY1", 1994, date="1994-05-05",
        authors=(author,), countries=("China",), institutions=("I1",),
        refs=(), concepts=(("ancient topic", 1),),
    )
    after = extract_features(focal, author, build_profiles(corpus + [extra]))
    assert after.f5_prior_pub_count == before.f5_prior_pub_count + 1
    assert after.f7_unique_keywords >= before.f7_unique_keywords
    assert after.f8_first_or_last_count >= before.f8_first_or_last_count


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_f9_invariant_to_volume_scaling(seed, k):
    corpus = random_corpus(seed, max_papers=10, max_authors=5)
    focal = max(corpus, key=lambda r: (r.sort_date(), r.paper_id))
    author = focal.authorships[0].author_id
    before = extract_features(focal, author, build_profiles(corpus))
    # replicate every earlier-year paper's institution footprint k-fold
    # with fresh papers that cannot touch any other feature
    clones = []
    n = 0
    for rec in corpus:
        if rec.year >= focal.year:
            continue
        for _ in range(k - 1):
            n += 1
            clones.append(
                PublicationRecord(
                    paper_id=f"CLONE{n:04d}",
                    year=rec.year,
                    pub_date=rec.pub_date,
                    journal_id="JX",
                    impact_factor=1.0,
                    concepts=frozenset(),
                    references=frozenset(),
                    authorships=tuple(
                        AuthorshipRecord(f"GHOST{n:04d}x{i}", i, a.country, a.institution_id)
                        for i, a in enumerate(rec.authorships)
                    ),
                )
            )
    after = extract_features(focal, author, build_profiles(corpus + clones))
    assert after.f9_affiliation_score == pytest.approx(
        before.f9_affiliation_score, abs=1e-12
    )


def test_features_file_round_trip(tmp_path, hand_index):
    corpus, index = hand_index
    rows = list(extract_all(corpus, index))
    path = tmp_path / "features.tsv"
    write_features(rows, path)
    again = read_features(path)
    assert len(again) == len(rows)
    for (p1, a1, v1), (p2, a2, v2) in zip(rows, again):
        assert (p1, a1) == (p2, a2)
        assert vector_as_tuple(v1)[:8] == vector_as_tuple(v2)[:8]
        assert v2.f9_affiliation_score == pytest.approx(
            v1.f9_affiliation_score, abs=1e-9
        )


def test_features_file_rejects_bad_shape(tmp_path):
    path = tmp_path / "features.tsv"
    path.write_text("wrong\theader\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        read_features(path)
