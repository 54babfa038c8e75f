"""Dictionary NER with exclusion-dictionary suppression."""

from __future__ import annotations

from dataclasses import dataclass, field

from .matcher import OverlapPolicy, Token, TokenTrie


@dataclass
class Mention:
    """A typed concept span with an open attribute map.

    Token indices are relative to the sentence's token list. The four
    context dimensions (negation, certainty, experiencer, temporality)
    are guaranteed present after the context stage.
    """
    concept: str
    begin: int
    end: int
    sentence_index: int
    token_begin: int
    token_end: int
    attributes: dict = field(default_factory=dict)
    source: str = "ner"
    numeric_bearing: bool = False
    rule_rows: tuple = ()
    # filled by the temporal stage
    event_earliest: object = None
    event_latest: object = None
    event_basis: str = ""

    def attribute_values(self) -> set:
        return set(self.attributes.values())

    def snapshot(self) -> dict:
        d = {"concept": self.concept, "begin": self.begin, "end": self.end,
             "sentence_index": self.sentence_index, "source": self.source,
             "attributes": dict(self.attributes),
             "rule_rows": list(self.rule_rows)}
        if self.event_basis:
            d["event"] = {"earliest": str(self.event_earliest),
                          "latest": str(self.event_latest),
                          "basis": self.event_basis}
        return d


def match_concepts(tokens: list[Token], include_trie: TokenTrie,
                   exclude_trie: TokenTrie, sentence_index: int = 0) -> list[Mention]:
    """Longest-leftmost dictionary matching with exclusion veto.

    An include match is suppressed when an exclusion match covers (contains
    or equals) its span and targets the same concept type or ANY.
    """
    includes = include_trie.scan(tokens, OverlapPolicy.LONGEST_LEFTMOST)
    excludes = exclude_trie.scan(tokens, OverlapPolicy.ALL)
    mentions = []
    for m in includes:
        by_concept: dict[str, list] = {}
        for rule in m.rule_ids:
            by_concept.setdefault(rule.concept, []).append(rule)
        for concept, rules in by_concept.items():
            vetoed = any(
                ex.begin <= m.begin and ex.end >= m.end
                and any(r.target in (concept, "ANY") for r in ex.rule_ids)
                for ex in excludes)
            if vetoed:
                continue
            attrs = {}
            numeric = False
            for rule in rules:
                attrs.update(rule.seeds)
                numeric = numeric or rule.numeric
            mentions.append(Mention(
                concept=concept, begin=m.begin, end=m.end,
                sentence_index=sentence_index,
                token_begin=m.token_begin, token_end=m.token_end,
                attributes=attrs, source="ner", numeric_bearing=numeric,
                rule_rows=tuple(r.row for r in rules)))
    return mentions
