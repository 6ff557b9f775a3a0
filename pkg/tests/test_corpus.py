import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from radembed.corpus import (
    CondensedReport,
    CorpusError,
    ParseError,
    Report,
    corpus_stats,
    load_condensed,
    load_reports,
    save_condensed,
    save_reports,
)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_two_valid_lines(tmp_path):
    p = tmp_path / "r.jsonl"
    write_lines(p, ['{"id":"r1","text":"a b"}', '{"id":"r2","text":"c","label":3}'])
    reps = load_reports(p)
    assert [r.id for r in reps] == ["r1", "r2"]
    assert reps[1].label == 3 and reps[0].label is None


def test_label_out_of_range(tmp_path):
    p = tmp_path / "r.jsonl"
    write_lines(p, ['{"id":"r1","text":"...","label":6}'])
    with pytest.raises(CorpusError):
        load_reports(p)


def test_malformed_line_reports_line_number(tmp_path):
    p = tmp_path / "r.jsonl"
    write_lines(p, ['{"id":"r1","text":"a"}', "{not json"])
    with pytest.raises(ParseError) as err:
        load_reports(p)
    assert err.value.lineno == 2
    assert ":2:" in str(err.value)


def test_missing_field(tmp_path):
    p = tmp_path / "r.jsonl"
    write_lines(p, ['{"id":"r1"}'])
    with pytest.raises(ParseError):
        load_reports(p)


def test_duplicate_id(tmp_path):
    p = tmp_path / "r.jsonl"
    write_lines(p, ['{"id":"r1","text":"a"}', '{"id":"r1","text":"b"}'])
    with pytest.raises(CorpusError, match="duplicate"):
        load_reports(p)
    with pytest.raises(CorpusError):
        save_reports([Report("a", "x"), Report("a", "y")], tmp_path / "o.jsonl")


def test_bool_label_rejected():
    with pytest.raises(CorpusError):
        Report("r1", "t", True)


def test_ten_thousand_line_round_trip(tmp_path):
    rng = random.Random(3)
    words = ["hemorrhage", "no", "acute", "mass", "é", "naïve", "tab\there", 'quote"d', "line\nbreak"]
    reports = [Report(f"r{i:05d}", " ".join(rng.choice(words) for _ in range(rng.randint(0, 30))),
                      rng.choice([None, 1, 2, 3, 4, 5]))
               for i in range(10_000)]
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_reports(reports, p1)
    loaded = load_reports(p1)
    assert loaded == reports
    save_reports(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert len(p1.read_text(encoding="utf-8").splitlines()) == 10_000


def test_condensed_round_trip(tmp_path):
    reps = [CondensedReport.build("a", ["no_mass", "hemorrhage"], 5), CondensedReport.build("b", [])]
    p = tmp_path / "c.jsonl"
    save_condensed(reps, p)
    back = load_condensed(p)
    assert back == reps
    assert back[1].degenerate


def test_condensed_rejects_whitespace_token():
    with pytest.raises(CorpusError):
        CondensedReport.build("a", ["two words"])


def test_empty_tokens_must_be_flagged():
    with pytest.raises(CorpusError):
        CondensedReport("a", ())


def test_stats_hand_example():
    s = corpus_stats([Report("r", "a b c")], [CondensedReport.build("r", ["b"])])
    assert (s.mean_tokens_raw, s.mean_tokens_condensed, s.reduction_ratio) == (3.0, 1.0, 3.0)


def test_stats_errors():
    with pytest.raises(CorpusError):
        corpus_stats([], [])
    with pytest.raises(CorpusError):
        corpus_stats([Report("r", "a")], [CondensedReport.build("s", ["a"])])


def test_stats_all_degenerate_gives_nan():
    s = corpus_stats([Report("r", "a b")], [CondensedReport.build("r", [])])
    assert s.reduction_ratio != s.reduction_ratio


def test_stats_synthetic_corpus(small_corpus, small_condensed):
    reports, _ = small_corpus
    s = corpus_stats(reports, small_condensed.reports)
    assert s.report_count == 2000
    assert s.reduction_ratio >= 2.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.text(max_size=40), st.sampled_from([None, 1, 2, 3, 4, 5])), max_size=20))
def test_report_json_round_trip(items):
    for k, (text, label) in enumerate(items):
        r = Report(f"id{k}", text, label)
        obj = json.loads(r.to_json())
        assert Report(obj["id"], obj["text"], obj.get("label")) == r


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.text(alphabet="abc_", min_size=1, max_size=5), max_size=6), min_size=1, max_size=8))
def test_stats_is_order_independent(docs):
    raw = [Report(f"r{i}", " ".join(d) + " x") for i, d in enumerate(docs)]
    cond = [CondensedReport.build(f"r{i}", d) for i, d in enumerate(docs)]
    a = corpus_stats(raw, cond)
    b = corpus_stats(raw[::-1], cond[::-1])
    assert a == b or (a.reduction_ratio != a.reduction_ratio and b.reduction_ratio != b.reduction_ratio)
