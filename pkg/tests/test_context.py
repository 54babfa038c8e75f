"""Context attribute assignment tests (unit-level; the larger hand-oracled
sentence battery lives in test_acceptance)."""

from trialsieve.context import CONTEXT_DEFAULTS, apply_context
from trialsieve.matcher import build_trie, tokenize
from trialsieve.ner import Mention
from trialsieve.ruleset import ContextRule


def ctx_trie(*rows):
    entries = []
    for i, row in enumerate(rows, start=1):
        trigger, attr, value, direction, window, flag = row
        entries.append((trigger,
                        ContextRule(trigger, attr, value, direction,
                                    window, flag, i), False))
    return build_trie(entries)


NEG = ("no", "negation", "negated", "forward", 5, "trigger")
NEG_BACK = ("ruled out", "negation", "negated", "backward", 5, "trigger")
PSEUDO = ("no increase", "negation", "-", "forward", 5, "pseudo")
TERM = ("but", "ANY", "-", "both", 1, "terminate")


def mention_at(tokens, word):
    for i, t in enumerate(tokens):
        if t.norm == word:
            return Mention(concept="X", begin=t.begin, end=t.end,
                           sentence_index=0, token_begin=i, token_end=i + 1)
    raise AssertionError(f"{word} not in sentence")


def run(text, *rules, word="mi"):
    toks = tokenize(text)
    m = mention_at(toks, word)
    apply_context(toks, [m], ctx_trie(*rules))
    return m.attributes


def test_defaults_are_total():
    attrs = run("mi noted today")
    assert attrs == CONTEXT_DEFAULTS


def test_defaults_do_not_clobber_seeds():
    toks = tokenize("mi")
    m = mention_at(toks, "mi")
    m.attributes["negation"] = "negated"
    apply_context(toks, [m], ctx_trie())
    assert m.attributes["negation"] == "negated"
    assert m.attributes["certainty"] == "certain"


def test_forward_trigger_within_window():
    assert run("no mi", NEG)["negation"] == "negated"
    assert run("no w w w w mi", NEG)["negation"] == "negated"


def test_forward_trigger_past_window():
    assert run("no w w w w w mi", NEG)["negation"] == "affirm"


def test_forward_does_not_reach_backward():
    assert run("mi no", NEG)["negation"] == "affirm"


def test_backward_trigger():
    assert run("mi ruled out", NEG_BACK)["negation"] == "negated"
    assert run("ruled out mi", NEG_BACK)["negation"] == "affirm"


def test_terminate_blocks_forward_scope():
    attrs = run("no pain but mi persists", NEG, TERM)
    assert attrs["negation"] == "affirm"


def test_terminate_blocks_backward_scope():
    attrs = run("mi but pain ruled out", NEG_BACK, TERM)
    assert attrs["negation"] == "affirm"


def test_pseudo_neutralizes_contained_trigger():
    attrs = run("no increase in mi", NEG, PSEUDO)
    assert attrs["negation"] == "affirm"


def test_pseudo_leaves_other_triggers_alone():
    attrs = run("no increase in size and no mi", NEG, PSEUDO)
    assert attrs["negation"] == "negated"


def test_nearest_trigger_wins():
    denies = ("denies", "negation", "denied", "forward", 8, "trigger")
    attrs = run("denies pain and no mi", denies, NEG)
    assert attrs["negation"] == "negated"


def test_tie_goes_to_later_start():
    # overlapping triggers end at the same token, so distances tie and the
    # later-starting trigger supplies the value
    outer = ("rules out no", "negation", "outer", "forward", 8, "trigger")
    attrs = run("rules out no mi", outer, NEG)
    assert attrs["negation"] == "negated"


def test_independent_attributes_compose():
    unc = ("possible", "certainty", "uncertain", "forward", 5, "trigger")
    attrs = run("possible mi ruled out", unc, NEG_BACK)
    assert attrs["certainty"] == "uncertain"
    assert attrs["negation"] == "negated"


def test_no_mentions_is_a_no_op():
    assert apply_context(tokenize("no mi"), [], ctx_trie(NEG)) == []
