"""Rule-driven sentence segmentation.

Sentence rules are character patterns with an action: ``end`` marks a
sentence boundary, ``begin`` forces a new sentence to open, and
``pseudo_end`` neutralizes end boundaries that fall inside its match
(abbreviation guard). Patterns are literal characters plus the
placeholders ``\\C`` (capital), ``\\c`` (lower), ``\\d`` (digit),
``\\p`` (punctuation) and ``\\n`` (newline). A single ``|`` in the
pattern splits consumed text from lookahead context; the boundary sits
at the ``|`` position (end of match when absent).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_PLACEHOLDERS = {"C": "[A-Z]", "c": "[a-z]", "d": "[0-9]",
                 "p": r"[^\w\s]", "n": "\n"}

# Shipped defaults; the paper's RuSH rules are not published, so these are
# plausible clinical-note conventions, overridable via the sentence table.
DEFAULT_SENTENCE_RULES = [
    (".| \\C", "end"),
    (".|\\n", "end"),
    ("!|", "end"),
    ("?|", "end"),
    (":|\\n", "end"),
    ("\\n\\n|\\C", "begin"),
    ("\\n|- ", "begin"),
    ("\\n|* ", "begin"),
    ("\\n|\\d. ", "begin"),
    ("dr.", "pseudo_end"),
    ("mr.", "pseudo_end"),
    ("mrs.", "pseudo_end"),
    ("ms.", "pseudo_end"),
    ("vs.", "pseudo_end"),
    ("e.g.", "pseudo_end"),
    ("i.e.", "pseudo_end"),
    (" \\C.", "pseudo_end"),
]


@dataclass(frozen=True)
class SentenceSpan:
    begin: int
    end: int
    index: int


def _compile_part(part: str, fold_case: bool) -> str:
    out = []
    i = 0
    while i < len(part):
        ch = part[i]
        if ch == "\\" and i + 1 < len(part) and part[i + 1] in _PLACEHOLDERS:
            out.append(_PLACEHOLDERS[part[i + 1]])
            i += 2
            continue
        if ch == " ":
            out.append("[ \t]")
        elif ch.isalpha() and fold_case:
            out.append(f"[{ch.lower()}{ch.upper()}]")
        else:
            out.append(re.escape(ch))
        i += 1
    return "".join(out)


def compile_sentence_rule(pattern: str, action: str):
    """Compile one pattern cell into a regex with a boundary at match end."""
    if action == "pseudo_end":
        body = _compile_part(pattern, fold_case=True)
        if pattern[:1].isalpha():
            body = "(?<![A-Za-z])" + body
        return re.compile(body)
    consumed, _, look = pattern.partition("|")
    body = _compile_part(consumed, fold_case=False)
    if look:
        body += "(?=" + _compile_part(look, fold_case=False) + ")"
    return re.compile(body)


def segment(text: str, sentence_rules=None) -> list[SentenceSpan]:
    """Split text into sentence spans.

    With no rules the whole (non-whitespace) text is one sentence.
    Sentences are the trimmed segments between boundary positions; pure
    whitespace segments are dropped, so the non-whitespace characters of
    the text are exactly partitioned.
    """
    if not text.strip():
        return []
    if sentence_rules is None:
        rules = DEFAULT_SENTENCE_RULES
    else:
        rules = [(r.pattern, r.action) for r in sentence_rules]

    breaks: set[int] = set()
    pseudo_spans: list[tuple[int, int]] = []
    end_breaks: set[int] = set()
    for pattern, action in rules:
        rx = compile_sentence_rule(pattern, action)
        if action == "pseudo_end":
            pseudo_spans.extend(m.span() for m in rx.finditer(text))
        elif action == "end":
            end_breaks.update(m.end() for m in rx.finditer(text))
        elif action == "begin":
            breaks.update(m.end() for m in rx.finditer(text))
        else:
            raise ValueError(f"unknown sentence action {action!r}")
    for b in end_breaks:
        if not any(s < b <= e for s, e in pseudo_spans):
            breaks.add(b)

    bounds = sorted(b for b in breaks if 0 < b < len(text))
    spans = []
    prev = 0
    for bound in bounds + [len(text)]:
        chunk = text[prev:bound]
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk.rstrip())
        if trail > lead:
            spans.append(SentenceSpan(prev + lead, prev + trail, len(spans)))
        prev = bound
    return spans
