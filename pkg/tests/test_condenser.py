import warnings
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from radembed.condenser import (
    BOUNDARY,
    CollocationTable,
    CondenserConfig,
    MissingSectionsWarning,
    apply_collocations,
    clean_text,
    condense_corpus,
    condense_report_tokens,
    encode_negation,
    extract_sections,
    mine_collocations,
    prune_rare_terms,
    split_sections,
)
from radembed.corpus import Report

MEDICOLEGAL = ("I have personally reviewed the images for this examination and agreed "
               "with the report transcribed above.")


def naive_pair_counts(corpus):
    counts = {}
    for toks in corpus:
        for k in range(len(toks) - 1):
            a, b = toks[k], toks[k + 1]
            if a == "." or b == ".":
                continue
            counts[(a, b)] = counts.get((a, b), 0) + 1
    return counts


# -- sections -----------------------------------------------------------------

def test_header_split():
    assert split_sections("HISTORY: x FINDINGS: a b IMPRESSION: c").text == "a b c"


def test_no_headers_falls_back_with_warning():
    with pytest.warns(MissingSectionsWarning):
        assert extract_sections("plain text only") == "plain text only"
    assert split_sections("plain text only").found is False


def test_section_stops_at_next_header():
    text = "FINDINGS: a b\nADDITIONAL COMMENT: zz\nIMPRESSION: c"
    assert split_sections(text).text == "a b c"


def test_section_spans_match_generator(small_corpus):
    reports, gt = small_corpus
    for r in reports:
        spans = gt.sections[r.id]
        expected = " ".join(r.text[a:b].strip() for a, b in (spans["FINDINGS"], spans["IMPRESSION"]))
        got = split_sections(r.text).text
        assert len(got.split()) == len(expected.split())
        assert got == expected


# -- cleaning -------------------------------------------------------------------

def test_clean_with_custom_stoplist():
    cfg = CondenserConfig(stopword_list={"the", "is"})
    assert clean_text("The scan is NORMAL.", cfg) == ["scan", "normal"]


def test_medicolegal_sentence_removed(condenser_config):
    assert clean_text(MEDICOLEGAL, condenser_config) == []


def test_dates_and_times_removed(condenser_config):
    assert clean_text("seen 01/02/2015 at 10:45", condenser_config) == ["seen"]


def test_headers_and_names_removed(condenser_config):
    out = clean_text("Additional comment: Findings reviewed with Dr. Jane Smith on 07/15/2015.", condenser_config)
    assert out == []


def test_negation_cues_survive_stopword_removal(condenser_config):
    assert "no" in condenser_config.stopword_list
    assert clean_text("No mass.", condenser_config) == ["no", "mass"]


def test_keep_separators(condenser_config):
    toks = clean_text("No acute hemorrhage, infarction, or mass. Normal ventricles.", condenser_config,
                      keep_separators=True)
    assert toks == ["no", "acute", "hemorrhage", ",", "infarction", ",", "or", "mass", ".",
                    "normal", "ventricles", "."]


# -- negation -------------------------------------------------------------------

def test_negation_golden():
    toks = "no acute hemorrhage , infarction , or mass .".split()
    assert encode_negation(toks, ["no"]) == ["no_acute_hemorrhage", "no_infarction", "no_mass"]


def test_negation_scope_ends_at_boundary():
    assert encode_negation("no edema . mass present .".split(), ["no"]) == ["no_edema", "mass", "present"]


def test_multiword_cue():
    toks = "negative for bleed and shift .".split()
    assert encode_negation(toks, ["no", "negative for"]) == ["negative_for_bleed", "negative_for_shift"]


def test_bare_cue_kept():
    assert encode_negation(["no", "."], ["no"]) == ["no"]


def test_keep_boundaries_emits_single_dots():
    toks = ". . a . . no b . c".split()
    assert encode_negation(toks, ["no"], keep_boundaries=True) == ["a", ".", "no_b", ".", "c"]


word = st.sampled_from(["a", "b", "hemorrhage", "mass", "edema", "acute"])
sep = st.sampled_from([",", "or", "and", "."])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.one_of(word, sep), max_size=30))
def test_no_cue_means_identity_minus_separators(tokens):
    assert encode_negation(tokens, ["no"]) == [t for t in tokens if t not in {",", "or", "and", "."}]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.one_of(word, sep, st.just("no")), max_size=30))
def test_negation_preserves_words(tokens):
    # a cue's scope spans list separators, so one cue may prefix several items;
    # with cues removed, the words survive in order
    out = encode_negation(tokens, ["no"])
    flat = [p for tok in out for p in tok.split("_") if p != "no"]
    assert flat == [t for t in tokens if t not in {",", "or", "and", ".", "no"}]


def test_negation_scopes_match_generator(small_corpus, condenser_config):
    reports, gt = small_corpus
    for r in reports[:300]:
        toks, _ = condense_report_tokens(r.text, condenser_config)
        negated = {t for t in toks if "_" in t and t.split("_")[0] in {"no", "without", "negative"}}
        for cue, phrases in gt.negation_scopes[r.id]:
            prefix = cue.replace(" ", "_")
            for ph in phrases:
                words = [w for w in ph.split() if w not in condenser_config.stopword_list]
                assert prefix + "_" + "_".join(words) in negated, (r.id, cue, ph)


# -- pruning --------------------------------------------------------------------

def test_prune_examples():
    assert prune_rare_terms([["a", "b"], ["a"]], 2) == [["a"], ["a"]]
    corpus = [["x", "y"], ["y"]]
    assert prune_rare_terms(corpus, 1) == corpus


def test_prune_keeps_boundaries():
    assert prune_rare_terms([["a", ".", "b"]], 2) == [["."]]


def test_prune_rejects_zero():
    with pytest.raises(ValueError):
        prune_rare_terms([["a"]], 0)


def test_no_hapax_survives(small_corpus, small_condensed):
    _, gt = small_corpus
    for rep in small_condensed.reports:
        hapax = gt.hapaxes[rep.id]
        assert all(hapax not in tok.split("_") for tok in rep.tokens)


# -- collocations ---------------------------------------------------------------

def test_threshold_is_strict():
    corpus = [["midline", "shift"]] * 501 + [["mass", "effect"]] * 500
    table = mine_collocations(corpus, 500)
    assert ("midline", "shift") in table
    assert ("mass", "effect") not in table


def test_pairs_never_span_boundaries():
    corpus = [["a", ".", "b"]] * 10
    assert len(mine_collocations(corpus, 1)) == 0


def test_apply_examples():
    t = CollocationTable({("mass", "effect"): 600}, 500)
    assert apply_collocations(["mass", "effect"], t) == ["mass_effect"]
    assert apply_collocations(["a", "b"], CollocationTable({}, 500)) == ["a", "b"]
    t2 = CollocationTable({("a", "b"): 5, ("b", "c"): 5}, 1)
    assert apply_collocations(["a", "b", "c"], t2) == ["a_b", "c"]


def test_table_rejects_counts_below_threshold():
    with pytest.raises(ValueError):
        CollocationTable({("a", "b"): 3}, 5)


def test_table_tsv_round_trip(tmp_path):
    t = CollocationTable({("gray", "white"): 600, ("mass", "effect"): 501}, 500)
    t.to_tsv(tmp_path / "c.tsv")
    assert CollocationTable.from_tsv(tmp_path / "c.tsv") == t


def test_mining_matches_naive_counter(small_corpus, condenser_config):
    reports, _ = small_corpus
    per = [condense_report_tokens(r.text, condenser_config)[0] for r in reports]
    corpus = prune_rare_terms(per, condenser_config.min_term_frequency)
    for threshold in (1, 50, 500):
        expected = {p: c for p, c in naive_pair_counts(corpus).items() if c > threshold}
        assert mine_collocations(corpus, threshold).pairs == expected


def test_planted_collocations(small_corpus, small_condensed):
    _, gt = small_corpus
    assert gt.collocations == {"gray white": 600, "focal abnormality": 450}
    pairs = small_condensed.collocations.pairs
    assert pairs[("gray", "white")] == 600
    assert ("focal", "abnormality") not in pairs


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["a", "b", "c", "."]), max_size=12), max_size=10),
       st.integers(min_value=1, max_value=4))
def test_mining_property(corpus, threshold):
    expected = {p: c for p, c in naive_pair_counts(corpus).items() if c > threshold}
    assert mine_collocations(corpus, threshold).pairs == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c"]), max_size=15))
def test_apply_preserves_words(tokens):
    t = CollocationTable({("a", "b"): 2, ("b", "c"): 2}, 1)
    out = apply_collocations(tokens, t)
    assert [w for tok in out for w in tok.split("_")] == tokens


# -- pipeline -------------------------------------------------------------------

def test_condense_corpus_end_to_end(condenser_config):
    reps = [Report("r1", "HISTORY: mother with headache.\nFINDINGS: No acute hemorrhage, infarction, or mass. "
                         "Midline shift noted.\nIMPRESSION: " + MEDICOLEGAL, 1)]
    cfg = CondenserConfig.default(min_term_frequency=1, collocation_min_count=10)
    res = condense_corpus(reps, cfg)
    assert res.reports[0].tokens == ("no_acute_hemorrhage", "no_infarction", "no_mass", "midline", "shift", "noted")
    assert res.reports[0].label == 1
    assert res.missing_sections == []


def test_missing_sections_reported(condenser_config):
    res = condense_corpus([Report("r1", "mass mass")], CondenserConfig.default(min_term_frequency=1))
    assert res.missing_sections == ["r1"]
    assert res.reports[0].tokens == ("mass", "mass")


def test_negation_runs_before_collocations():
    # "no mass" would be a frequent pair; negation fuses it first
    reps = [Report(f"r{i}", "FINDINGS: No mass. Mass effect.") for i in range(20)]
    res = condense_corpus(reps, CondenserConfig.default(min_term_frequency=1, collocation_min_count=5))
    assert res.reports[0].tokens == ("no_mass", "mass_effect")


def test_collocations_do_not_cross_sentences():
    reps = [Report(f"r{i}", "FINDINGS: Brain normal. Sinuses clear.") for i in range(20)]
    res = condense_corpus(reps, CondenserConfig.default(min_term_frequency=1, collocation_min_count=5))
    assert res.reports[0].tokens == ("brain_normal", "sinuses_clear")


def test_deterministic_across_threads(small_corpus, condenser_config, small_condensed):
    reports, _ = small_corpus
    res4 = condense_corpus(reports, condenser_config, threads=4)
    assert res4.reports == small_condensed.reports
    assert res4.collocations == small_condensed.collocations


def test_reusing_a_collocation_table(small_corpus, condenser_config, small_condensed):
    reports, _ = small_corpus
    res = condense_corpus(reports[:50], condenser_config, collocations=small_condensed.collocations)
    assert res.collocations is small_condensed.collocations


def test_config_from_yaml(tmp_path):
    (tmp_path / "stop.txt").write_text("the\nis\n", encoding="utf-8")
    (tmp_path / "c.yaml").write_text("stopwords_path: stop.txt\nmin_term_frequency: 3\nnegation_cues: [no, without]\n",
                                     encoding="utf-8")
    cfg = CondenserConfig.from_file(tmp_path / "c.yaml")
    assert cfg.stopword_list == frozenset({"the", "is"})
    assert cfg.min_term_frequency == 3
    assert cfg.negation_cues == ("no", "without")


def test_config_rejects_unknown_keys(tmp_path):
    (tmp_path / "c.yaml").write_text("min_freq: 3\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown"):
        CondenserConfig.from_file(tmp_path / "c.yaml")


def test_config_validation():
    with pytest.raises(ValueError):
        CondenserConfig(min_term_frequency=0)
    with pytest.raises(ValueError):
        CondenserConfig(negation_cues=("No",))


def test_condensed_vocabulary_is_small(small_condensed):
    vocab = Counter(t for r in small_condensed.reports for t in r.tokens)
    assert min(vocab.values()) >= 1
    assert "." not in vocab
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert len(vocab) < 500
