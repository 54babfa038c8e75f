"""Section detection: label document regions with canonical section names.

Headers only match at line start, optionally followed by a colon;
multiple header aliases may map onto one canonical name. The region
before the first header carries the reserved name ``Unknown``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matcher import Token, TokenKind, TokenTrie

UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SectionSpan:
    name: str
    header_span: tuple    # (begin, end) of the header text incl. colon
    body_span: tuple      # end of header to start of next header


class PositionError(Exception):
    pass


def _line_starts(text: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n" and i + 1 < len(text):
            starts.append(i + 1)
    return starts


def detect_sections(text: str, section_trie: TokenTrie,
                    tokens: list[Token] | None = None,
                    require_colon_or_eol: bool = True) -> list[SectionSpan]:
    """Find section headers and derive body regions.

    Returns spans sorted by position; bodies are non-overlapping and run
    to the next header (or end of document).
    """
    from .matcher import tokenize
    if tokens is None:
        tokens = tokenize(text)
    headers = []  # (header_begin, header_end_incl_colon, canonical name)
    token_index_by_offset = {t.begin: i for i, t in enumerate(tokens)}
    for start in _line_starts(text):
        line_end = text.find("\n", start)
        if line_end == -1:
            line_end = len(text)
        # first token at or after the line start, skipping leading blanks
        ti = None
        probe = start
        while probe < line_end and ti is None:
            ti = token_index_by_offset.get(probe)
            probe += 1
        if ti is None or tokens[ti].kind is TokenKind.NEWLINE:
            continue
        # anchored longest match over this line's tokens
        line_tokens = []
        j = ti
        while j < len(tokens) and tokens[j].begin < line_end:
            line_tokens.append(tokens[j])
            j += 1
        found = section_trie._matches_from(line_tokens, 0)
        if not found:
            continue
        end_tok, rules = max(found, key=lambda f: f[0])
        h_begin = line_tokens[0].begin
        h_end = line_tokens[end_tok - 1].end
        rest = text[h_end:line_end]
        stripped = rest.lstrip(" \t")
        if stripped.startswith(":"):
            h_end = h_end + (len(rest) - len(stripped)) + 1
        elif require_colon_or_eol and stripped:
            continue
        headers.append((h_begin, h_end, rules[0].name))

    sections = []
    if not headers or headers[0][0] > 0:
        first = headers[0][0] if headers else len(text)
        sections.append(SectionSpan(UNKNOWN, (0, 0), (0, first)))
    for i, (hb, he, name) in enumerate(headers):
        nxt = headers[i + 1][0] if i + 1 < len(headers) else len(text)
        sections.append(SectionSpan(name, (hb, he), (he, nxt)))
    return sections


def section_of(position: int, sections: list[SectionSpan],
               text_length: int) -> str:
    """Canonical section name at a character position.

    Headers belong to their own section.
    """
    if position < 0 or position >= max(text_length, 1):
        raise PositionError(f"position {position} out of document bounds")
    for s in sections:
        begin = s.header_span[0] if s.header_span[1] > s.header_span[0] \
            else s.body_span[0]
        if begin <= position < s.body_span[1]:
            return s.name
    return UNKNOWN
