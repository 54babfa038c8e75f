"""ConText-style attribute assignment from trigger phrases.

Triggers scope mentions by token distance from the mention's first token,
bounded by the sentence and by the nearest terminate match. Pseudo
triggers consume their span and fire nothing. When two triggers of one
attribute scope the same mention, the nearer wins; ties go to the
later-starting trigger.
"""

from __future__ import annotations

from .matcher import OverlapPolicy, Token, TokenTrie
from .ner import Mention

CONTEXT_DEFAULTS = {
    "negation": "affirm",
    "certainty": "certain",
    "experiencer": "patient",
    "temporality": "present",
}


def apply_context(tokens: list[Token], mentions: list[Mention],
                  context_trie: TokenTrie) -> list[Mention]:
    """Set context attributes on every mention in a sentence, in place."""
    for m in mentions:
        for attr, default in CONTEXT_DEFAULTS.items():
            m.attributes.setdefault(attr, default)
    if not mentions:
        return mentions

    matches = context_trie.scan(tokens, OverlapPolicy.ALL)
    triggers, pseudos, terminates = [], [], []
    for match in matches:
        for rule in match.rule_ids:
            entry = (match, rule)
            if rule.flag == "pseudo":
                pseudos.append(entry)
            elif rule.flag == "terminate":
                terminates.append(entry)
            else:
                triggers.append(entry)

    def neutralized(match, rule):
        # pseudo span covers (contains or equals) the trigger span
        return any(pm.token_begin <= match.token_begin
                   and pm.token_end >= match.token_end
                   for pm, pr in pseudos if pr.attribute == rule.attribute)

    live = [(m, r) for m, r in triggers if not neutralized(m, r)]

    def terminated(attr, lo, hi):
        # any terminate match starting strictly inside (lo, hi)
        return any(lo < tm.token_begin < hi
                   for tm, tr in terminates
                   if tr.attribute in (attr, "ANY"))

    for mention in mentions:
        best: dict[str, tuple] = {}   # attr -> (distance, trigger_start, value)
        f = mention.token_begin
        for match, rule in live:
            ts, te = match.token_begin, match.token_end
            scoped = False
            dist = None
            if rule.direction in ("forward", "both") and f >= te:
                dist = f - te
                scoped = dist + 1 <= rule.window and not terminated(
                    rule.attribute, te - 1, f)
            if not scoped and rule.direction in ("backward", "both") and f < ts:
                dist = ts - f
                scoped = dist <= rule.window and not terminated(
                    rule.attribute, f, ts)
            if not scoped:
                continue
            cur = best.get(rule.attribute)
            cand = (dist, ts, rule.value)
            if cur is None or cand[0] < cur[0] or (cand[0] == cur[0]
                                                   and cand[1] > cur[1]):
                best[rule.attribute] = cand
        for attr, (_, _, value) in best.items():
            mention.attributes[attr] = value
    return mentions
