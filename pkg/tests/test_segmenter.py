"""Sentence segmentation tests."""

import re

from hypothesis import given, settings
from hypothesis import strategies as st

from trialsieve.segmenter import (DEFAULT_SENTENCE_RULES,
                                  compile_sentence_rule, segment)


def texts(spans, text):
    return [text[s.begin:s.end] for s in spans]


def test_simple_period_split():
    text = "He was seen today. He feels well."
    assert texts(segment(text), text) == ["He was seen today.",
                                          "He feels well."]


def test_newline_after_period_splits():
    text = "First sentence.\nsecond line"
    assert texts(segment(text), text) == ["First sentence.", "second line"]


def test_abbreviation_not_a_boundary():
    text = "Seen by Dr. Smith today. Follow up planned."
    got = texts(segment(text), text)
    assert got[0] == "Seen by Dr. Smith today."
    assert len(got) == 2


def test_initial_not_a_boundary():
    # a single capital followed by a period reads as an initial
    text = "Seen by John Q. Public today. Stable."
    got = texts(segment(text), text)
    assert got[0] == "Seen by John Q. Public today."


def test_list_markers_open_sentences():
    text = "MEDICATIONS:\n- aspirin 81 mg\n- lisinopril 10 mg\n"
    got = texts(segment(text), text)
    assert "- aspirin 81 mg" in got
    assert "- lisinopril 10 mg" in got


def test_colon_before_newline_ends_sentence():
    text = "FINDINGS:\nNo acute distress"
    got = texts(segment(text), text)
    assert got == ["FINDINGS:", "No acute distress"]


def test_blank_text_yields_no_sentences():
    assert segment("") == []
    assert segment("   \n\n  ") == []


def test_question_and_exclamation():
    text = "Any chest pain? None reported! Continue plan."
    assert len(segment(text)) == 3


def test_no_rules_whole_text_is_one_sentence():
    text = "One. Two. Three."
    spans = segment(text, sentence_rules=[])
    assert texts(spans, text) == [text]


def test_spans_are_ordered_and_indexed():
    text = "A b. C d. E f."
    spans = segment(text)
    assert [s.index for s in spans] == list(range(len(spans)))
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.begin


def test_compile_placeholders():
    rx = compile_sentence_rule(".|\\n", "end")
    assert rx.search("done.\n")
    assert not rx.search("done. next")
    rx2 = compile_sentence_rule("\\d. ", "begin")
    assert rx2.search("1. item")


def test_pseudo_rule_case_folds():
    rx = compile_sentence_rule("dr.", "pseudo_end")
    assert rx.search("Dr. Smith")
    assert rx.search("dr. smith")
    # must not fire inside another word
    assert not rx.search("cedr. x")


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="ab .\n!?:-*", max_size=120))
def test_non_whitespace_chars_partitioned(text):
    spans = segment(text)
    covered = set()
    prev_end = 0
    for s in spans:
        assert s.begin >= prev_end
        assert not text[s.begin].isspace()
        assert not text[s.end - 1].isspace()
        covered.update(range(s.begin, s.end))
        prev_end = s.end
    for i, ch in enumerate(text):
        if not ch.isspace():
            assert i in covered


def test_default_rules_table_is_well_formed():
    for pattern, action in DEFAULT_SENTENCE_RULES:
        rx = compile_sentence_rule(pattern, action)
        assert isinstance(rx, re.Pattern)
