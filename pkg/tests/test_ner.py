"""Dictionary NER and exclusion tests."""

from trialsieve.matcher import build_trie, tokenize
from trialsieve.ner import match_concepts
from trialsieve.ruleset import ExcludeRule, NerRule


def inc(*rows):
    return build_trie([(phrase, NerRule(phrase, concept, seeds, numeric,
                                        False, i), False)
                       for i, (phrase, concept, seeds, numeric)
                       in enumerate(rows, start=1)])


def exc(*rows):
    return build_trie([(phrase, ExcludeRule(phrase, target, False, i), False)
                       for i, (phrase, target) in enumerate(rows, start=1)])


EMPTY = exc()


def test_simple_match_carries_seeds():
    trie = inc(("myocardial infarction", "MI_Candidate",
                (("cardiac", "cardiac"),), False))
    toks = tokenize("had a myocardial infarction today")
    ms = match_concepts(toks, trie, EMPTY)
    assert len(ms) == 1
    m = ms[0]
    assert m.concept == "MI_Candidate"
    assert m.attributes == {"cardiac": "cardiac"}
    assert m.token_begin == 2 and m.token_end == 4
    assert m.rule_rows == (1,)


def test_longest_leftmost_within_includes():
    trie = inc(("skin", "SkinIssue_Candidate", (), False),
               ("skin infection", "SkinIssue_Candidate", (), False))
    ms = match_concepts(tokenize("skin infection noted"), trie, EMPTY)
    assert len(ms) == 1
    assert ms[0].token_end == 2


def test_one_mention_per_concept_on_shared_span():
    trie = inc(("mi", "MI_Candidate", (), False),
               ("mi", "Cardiac_Event", (), False))
    ms = match_concepts(tokenize("mi"), trie, EMPTY)
    assert sorted(m.concept for m in ms) == ["Cardiac_Event", "MI_Candidate"]


def test_numeric_flag_propagates():
    trie = inc(("creatinine", "Creatinine_Test", (), True))
    ms = match_concepts(tokenize("creatinine 2.1"), trie, EMPTY)
    assert ms[0].numeric_bearing


def test_exclusion_vetoes_contained_match():
    include = inc(("mi", "MI_Candidate", (), False))
    exclude = exc(("family history of mi", "MI_Candidate"))
    ms = match_concepts(tokenize("family history of mi"), include, exclude)
    assert ms == []


def test_exclusion_equal_span_vetoes():
    include = inc(("thick skin", "SkinIssue_Candidate", (), False))
    exclude = exc(("thick skin", "ANY"))
    assert match_concepts(tokenize("thick skin"), include, exclude) == []


def test_exclusion_targets_specific_concept_only():
    include = inc(("mi", "MI_Candidate", (), False),
                  ("mi", "Abbrev_Candidate", (), False))
    exclude = exc(("family history of mi", "MI_Candidate"))
    ms = match_concepts(tokenize("family history of mi"), include, exclude)
    assert [m.concept for m in ms] == ["Abbrev_Candidate"]


def test_exclusion_not_covering_does_not_veto():
    include = inc(("skin infection", "SkinIssue_Candidate", (), False))
    exclude = exc(("thick skin", "ANY"))
    ms = match_concepts(tokenize("thick skin infection"), include, exclude)
    # exclusion covers tokens 0..2, include spans 1..3: no containment
    assert len(ms) == 1


def test_adding_exclusions_never_adds_mentions():
    """Exclusion growth is monotone: mentions only ever disappear."""
    include = inc(("skin", "SkinIssue_Candidate", (), False),
                  ("mi", "MI_Candidate", (), False),
                  ("skin infection", "SkinIssue_Candidate", (), False))
    toks = tokenize("thick skin and mi and skin infection")
    base = match_concepts(toks, include, EMPTY)
    grown = [exc(("thick skin", "ANY")),
             exc(("thick skin", "ANY"), ("mi", "MI_Candidate")),
             exc(("thick skin", "ANY"), ("mi", "MI_Candidate"),
                 ("skin infection", "ANY"))]
    prev = {(m.concept, m.begin, m.end) for m in base}
    for exclude in grown:
        cur = {(m.concept, m.begin, m.end)
               for m in match_concepts(toks, include, exclude)}
        assert cur <= prev
        prev = cur


def test_sentence_index_recorded():
    trie = inc(("mi", "MI_Candidate", (), False))
    ms = match_concepts(tokenize("mi"), trie, EMPTY, sentence_index=4)
    assert ms[0].sentence_index == 4
