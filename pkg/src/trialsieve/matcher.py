"""Token-level trie engine shared by all lexical pipeline components.

Every dictionary-driven stage (sections, NER, context triggers, temporal
expressions) compiles its phrases into a :class:`TokenTrie` and scans
sentence tokens with it. Two wildcard edges are supported: ``NUM`` matches
any number token, ``ANY`` matches any single token. Exact edges are always
tried before wildcard edges so overlapping rules resolve deterministically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

# Wildcard edge labels. Control characters so they can never collide with a
# normalized token.
NUM = "\x00NUM"
ANY = "\x00ANY"

_TOKEN_RE = re.compile(r"\d+\.\d+|[A-Za-z0-9]+|\n|[^\s]")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


class TokenKind(Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCT = "punct"
    NEWLINE = "newline"


class OverlapPolicy(Enum):
    LONGEST_LEFTMOST = "longest_leftmost"
    ALL = "all"


@dataclass(frozen=True)
class Token:
    begin: int
    end: int
    norm: str
    surface: str
    kind: TokenKind


@dataclass(frozen=True)
class Match:
    begin: int          # character offset of first matched token
    end: int            # character offset past last matched token
    token_begin: int    # index into the scanned token list
    token_end: int      # exclusive
    rule_ids: tuple
    phrase_len: int


def tokenize(text: str) -> list[Token]:
    """Split text into word/number/punct/newline tokens with char offsets.

    Alphanumeric runs stay one word ("HbA1c"); numbers keep a single
    internal decimal point ("7.2"). Whitespace other than newline is
    dropped; newlines are kept because the segmenter and sectioner need
    line structure.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        if surface == "\n":
            kind = TokenKind.NEWLINE
        elif _NUMBER_RE.fullmatch(surface):
            kind = TokenKind.NUMBER
        elif any(c.isalnum() for c in surface):
            kind = TokenKind.WORD
        else:
            kind = TokenKind.PUNCT
        tokens.append(Token(m.start(), m.end(), surface.lower(), surface, kind))
    return tokens


def phrase_to_keys(phrase: str) -> list[str]:
    """Turn a rule phrase cell into trie edge keys.

    The literal tokens NUM and ANY in a phrase become wildcard edges;
    everything else is tokenized exactly like document text.
    """
    keys = []
    for tok in tokenize(phrase):
        if tok.surface == "NUM":
            keys.append(NUM)
        elif tok.surface == "ANY":
            keys.append(ANY)
        else:
            keys.append(tok.norm)
    return keys


@dataclass
class _Node:
    children: dict = field(default_factory=dict)
    # payload entries: (rule_id, required_surfaces or None)
    payload: list = field(default_factory=list)


class TokenTrie:
    """Immutable-after-build token trie with NUM/ANY wildcard edges."""

    def __init__(self):
        self.root = _Node()
        self._phrase_count = 0

    def insert(self, phrase_keys: Sequence[str], rule_id,
               surfaces: Optional[Sequence[str]] = None) -> None:
        """Insert a phrase; duplicate phrases append their rule ids.

        When `surfaces` is given the match additionally requires the exact
        surface forms (case-sensitive phrases).
        """
        if not phrase_keys:
            raise ValueError("empty phrase")
        node = self.root
        for key in phrase_keys:
            node = node.children.setdefault(key, _Node())
        node.payload.append((rule_id, tuple(surfaces) if surfaces else None))
        self._phrase_count += 1

    def stats(self) -> dict:
        """Node/edge/accepting counts, used by the `trie dump` command."""
        nodes = edges = accepting = 0
        stack = [self.root]
        while stack:
            n = stack.pop()
            nodes += 1
            edges += len(n.children)
            if n.payload:
                accepting += 1
            stack.extend(n.children.values())
        return {"nodes": nodes, "edges": edges, "accepting": accepting,
                "phrases": self._phrase_count}

    def _edges_for(self, node: _Node, tok: Token):
        child = node.children.get(tok.norm)
        if child is not None:
            yield child
        if tok.kind is TokenKind.NUMBER:
            child = node.children.get(NUM)
            if child is not None:
                yield child
        child = node.children.get(ANY)
        if child is not None:
            yield child

    def _matches_from(self, tokens: Sequence[Token], start: int):
        """All (end_token_exclusive, rule_ids) matches starting at `start`.

        DFS with exact edges explored before wildcard edges; rule ids for
        equal spans are merged in that priority order.
        """
        found: dict[int, list] = {}
        stack = [(self.root, start)]
        while stack:
            node, i = stack.pop()
            if node.payload:
                ids = found.setdefault(i, [])
                for rule_id, surfaces in node.payload:
                    if surfaces is not None:
                        actual = tuple(t.surface for t in tokens[start:i])
                        if actual != surfaces:
                            continue
                    if rule_id not in ids:
                        ids.append(rule_id)
            if i < len(tokens):
                # push in reverse so exact edges pop first
                nexts = list(self._edges_for(node, tokens[i]))
                for child in reversed(nexts):
                    stack.append((child, i + 1))
        return [(end, ids) for end, ids in found.items() if ids]

    def scan(self, tokens: Sequence[Token],
             policy: OverlapPolicy = OverlapPolicy.LONGEST_LEFTMOST) -> list[Match]:
        """Scan a token list for dictionary matches.

        LONGEST_LEFTMOST: greedy left-to-right, longest match at each
        position, resume after it. ALL: every match at every start.
        Output sorted by (begin, -phrase_len).
        """
        out = []
        n = len(tokens)
        if policy is OverlapPolicy.ALL:
            for i in range(n):
                for end, ids in self._matches_from(tokens, i):
                    out.append(self._make_match(tokens, i, end, ids))
        else:
            i = 0
            while i < n:
                found = self._matches_from(tokens, i)
                if found:
                    end, ids = max(found, key=lambda f: f[0])
                    out.append(self._make_match(tokens, i, end, ids))
                    i = end
                else:
                    i += 1
        out.sort(key=lambda m: (m.begin, -m.phrase_len))
        return out

    @staticmethod
    def _make_match(tokens, i, end, ids) -> Match:
        return Match(begin=tokens[i].begin, end=tokens[end - 1].end,
                     token_begin=i, token_end=end,
                     rule_ids=tuple(ids), phrase_len=end - i)


def build_trie(entries: Iterable[tuple[str, object, bool]]) -> TokenTrie:
    """Build a trie from (phrase, rule_id, case_sensitive) entries."""
    trie = TokenTrie()
    for phrase, rule_id, case_sensitive in entries:
        keys = phrase_to_keys(phrase)
        if not keys:
            continue
        surfaces = None
        if case_sensitive:
            surfaces = [t.surface for t in tokenize(phrase)]
        trie.insert(keys, rule_id, surfaces)
    return trie
