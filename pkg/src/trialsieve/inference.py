"""The three conclusion tiers: feature, document and patient inference."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Optional

from .matcher import Token, TokenKind
from .ner import Mention
from .ruleset import ANY_SECTION, DocumentRule, FeatureRule, PatientRule

DEFAULT_UNITS = ("%", "mg", "g", "dl", "ml", "mmol", "mgdl", "kg", "units")


@dataclass
class NumericFinding:
    mention: Mention
    value: float
    unit: Optional[str] = None


@dataclass
class DocumentConclusion:
    doc_id: str
    group: str
    type: str
    evidence: list            # of Mention
    priority: int
    event_earliest: Optional[date] = None
    event_latest: Optional[date] = None

    def snapshot(self) -> dict:
        return {"doc_id": self.doc_id, "group": self.group,
                "type": self.type, "priority": self.priority,
                "evidence": [m.snapshot() for m in self.evidence],
                "event": {"earliest": str(self.event_earliest),
                          "latest": str(self.event_latest)}
                if self.event_latest else None}


@dataclass
class CriterionDecision:
    patient_id: str
    criterion: str
    decision: str             # met | not_met
    evidence: list = field(default_factory=list)
    # evidence entries: (doc_id, conclusion type, event interval str)

    def snapshot(self) -> dict:
        return {"patient_id": self.patient_id, "criterion": self.criterion,
                "decision": self.decision, "evidence": list(self.evidence)}


def apply_feature_rules(mention: Mention, section: str,
                        feature_rules_by_evidence: dict) -> list[Mention]:
    """Lift a mention to conclusion mentions per matching feature rules.

    A rule matches when its required attribute values are all present
    among the mention's attribute values and its section constraint
    equals the mention's section (or is ANY). COPYALL duplicates the
    full attribute map; an explicit list sets exactly those attributes.
    """
    out = []
    values = mention.attribute_values()
    for rule in feature_rules_by_evidence.get(mention.concept, ()):
        if rule.section != ANY_SECTION and rule.section != section:
            continue
        if not set(rule.evidence_values) <= values:
            continue
        if rule.conclusion_attrs is None:
            attrs = dict(mention.attributes)
        else:
            attrs = dict(rule.conclusion_attrs)
        out.append(Mention(
            concept=rule.conclusion, begin=mention.begin, end=mention.end,
            sentence_index=mention.sentence_index,
            token_begin=mention.token_begin, token_end=mention.token_end,
            attributes=attrs, source="feature",
            numeric_bearing=mention.numeric_bearing,
            rule_rows=(rule.row,),
            event_earliest=mention.event_earliest,
            event_latest=mention.event_latest,
            event_basis=mention.event_basis))
    return out


def extract_numeric_value(mention: Mention, tokens: list[Token],
                          units: tuple = DEFAULT_UNITS
                          ) -> Optional[NumericFinding]:
    """Nearest number within 6 tokens after the mention, then before."""
    def number_at(indices):
        for i in indices:
            if 0 <= i < len(tokens) and tokens[i].kind is TokenKind.NUMBER:
                return i
        return None
    idx = number_at(range(mention.token_end, mention.token_end + 6))
    if idx is None:
        idx = number_at(range(mention.token_begin - 1,
                              mention.token_begin - 7, -1))
    if idx is None:
        return None
    value = float(tokens[idx].norm)
    unit = None
    if idx + 1 < len(tokens) and tokens[idx + 1].norm in units:
        unit = tokens[idx + 1].surface
    return NumericFinding(mention, value, unit)


def infer_document(doc_id: str, mentions: list[Mention],
                   findings: list[NumericFinding],
                   document_groups: dict) -> list[DocumentConclusion]:
    """Fire at most one rule per conclusion group.

    Non-DEFAULT rules are tried by descending priority (row order breaks
    ties); the first whose evidence type is present, and whose value
    range (if any) is satisfied by some finding on that evidence, fires.
    Otherwise the group's DEFAULT fires with empty evidence.
    """
    by_type: dict[str, list[Mention]] = {}
    for m in mentions:
        by_type.setdefault(m.concept, []).append(m)
    values_by_mention = {id(f.mention): f.value for f in findings}

    out = []
    for group in sorted(document_groups):
        rules = document_groups[group]
        ranked = sorted((r for r in rules if not r.is_default),
                        key=lambda r: (-r.priority, r.row))
        fired = None
        for rule in ranked:
            candidates = by_type.get(rule.evidence, [])
            if rule.value_range is not None:
                candidates = [m for m in candidates
                              if id(m) in values_by_mention
                              and rule.value_range.contains(
                                  values_by_mention[id(m)])]
            if candidates:
                fired = (rule, candidates)
                break
        if fired is None:
            default = next(r for r in rules if r.is_default)
            out.append(DocumentConclusion(doc_id, group, default.conclusion,
                                          [], default.priority))
            continue
        rule, evidence = fired
        earliest = latest = None
        dated = [(m.event_earliest, m.event_latest) for m in evidence
                 if m.event_latest is not None]
        if dated:
            earliest = min(e for e, _ in dated)
            latest = max(l for _, l in dated)
        out.append(DocumentConclusion(doc_id, group, rule.conclusion,
                                      list(evidence), rule.priority,
                                      earliest, latest))
    return out


def infer_patient(patient_id: str, reference_date: Optional[date],
                  conclusions: list[DocumentConclusion],
                  patient_groups: dict) -> list[CriterionDecision]:
    """One decision per configured criterion.

    A conclusion qualifies for a rule when its type is among the rule's
    evidence types and, for window-bearing rules, its event interval ends
    at or after reference_date - window_days. Undated conclusions (and
    patients without a reference date) never satisfy window rules.
    """
    by_type: dict[str, list[DocumentConclusion]] = {}
    for c in conclusions:
        by_type.setdefault(c.type, []).append(c)

    decisions = []
    for criterion in sorted(patient_groups):
        rules = patient_groups[criterion]
        default = next(r for r in rules if r.is_default)
        decision = default.decision
        evidence_trail = []
        for rule in rules:
            if rule.is_default:
                continue
            qualifying = []
            for ev_type in rule.evidence:
                for c in by_type.get(ev_type, []):
                    if rule.window_days is not None:
                        if reference_date is None or c.event_latest is None:
                            continue
                        cutoff = reference_date - timedelta(days=rule.window_days)
                        if c.event_latest < cutoff:
                            continue
                    qualifying.append(c)
            if not qualifying:
                continue
            if rule.aggregation == "COUNT>=":
                distinct = {m.concept for c in qualifying for m in c.evidence}
                if len(distinct) < rule.count_threshold:
                    continue
            decision = rule.decision
            evidence_trail = [
                (c.doc_id, c.type,
                 f"{c.event_earliest}..{c.event_latest}"
                 if c.event_latest else "") for c in qualifying]
            break
        decisions.append(CriterionDecision(patient_id, criterion, decision,
                                           evidence_trail))
    return decisions
