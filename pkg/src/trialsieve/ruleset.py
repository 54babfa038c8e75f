"""Tabular rule files: parsing, validation and compilation.

Every pipeline component is configured by a small delimiter-separated
table (comma or tab, sniffed per file) with positional columns and no
keywords beyond a handful of sentinels (ANY, COPYALL, DEFAULT, NONE).
Blank lines and lines starting with ``#`` are skipped. A phrase cell
wrapped in double quotes matches case-sensitively.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .matcher import TokenTrie, build_trie

COMPONENT_KINDS = (
    "section", "sentence", "ner_include", "ner_exclude",
    "context", "temporal", "feature", "document", "patient",
)

ANY_SECTION = "ANY"
COPYALL = "COPYALL"

# component kind -> (min columns, max columns, human-readable schema)
_SCHEMAS = {
    "section": (2, 2, "(header phrase, section name)"),
    "sentence": (2, 2, "(pattern, action{begin|end|pseudo_end})"),
    "ner_include": (2, 3, "(phrase, concept type[, attribute seeds])"),
    "ner_exclude": (2, 2, "(phrase, suppressed concept type or ANY)"),
    "context": (4, 6, "(trigger, attribute, value, direction[, window[, flag]])"),
    "temporal": (2, 2, "(phrase pattern, interpretation tag)"),
    "feature": (5, 5, "(conclusion, conclusion attrs|COPYALL, evidence,"
                      " evidence attrs|ANY, section|ANY)"),
    "document": (5, 6, "(group, conclusion, evidence|-, priority,"
                       " DEFAULT|-[, value range])"),
    "patient": (6, 6, "(criterion, decision{met|not_met}, evidence|-,"
                      " window days|NONE, ANY|COUNT>=k, DEFAULT|-)"),
}


class RuleError(Exception):
    """Base for rule table problems."""


class ParseError(RuleError):
    pass


class CompileError(RuleError):
    pass


@dataclass(frozen=True)
class RuleRow:
    """One parsed table row; `row_number` is 1-based in the source file."""
    row_number: int
    cells: tuple


@dataclass
class RuleTable:
    component_kind: str
    rows: list  # of RuleRow
    source_path: str
    source_bytes: bytes = b""


def _unquote(cell: str) -> tuple[str, bool]:
    """Strip a case-sensitivity quote wrapper; returns (phrase, sensitive)."""
    cell = cell.strip()
    if len(cell) >= 2 and cell.startswith('"') and cell.endswith('"'):
        return cell[1:-1], True
    return cell, False


def load_rule_table(path, component_kind: str) -> RuleTable:
    """Parse one rule file into a RuleTable, validating column counts."""
    if component_kind not in _SCHEMAS:
        raise ParseError(f"unknown component kind {component_kind!r}")
    path = Path(path)
    data = path.read_bytes()
    text = data.decode("utf-8")
    lo, hi, schema = _SCHEMAS[component_kind]
    content_lines = [(n, l) for n, l in enumerate(text.splitlines(), start=1)
                     if l.strip() and not l.lstrip().startswith("#")]
    # delimiter sniffed once per file from its first content line
    delim = "\t" if content_lines and "\t" in content_lines[0][1] else ","
    rows = []
    for lineno, line in content_lines:
        if component_kind == "sentence":
            # whitespace is significant in sentence patterns
            parts = line.rstrip("\r\n").split(delim)
            cells = [parts[0]] + [c.strip() for c in parts[1:]]
        else:
            cells = [c.strip() for c in line.split(delim)]
        # drop trailing empty cells so optional columns may be omitted
        while len(cells) > lo and cells[-1] == "":
            cells.pop()
        if not lo <= len(cells) <= hi:
            raise ParseError(
                f"{path}:{lineno}: expected {component_kind} schema {schema}, "
                f"got {len(cells)} cells")
        rows.append(RuleRow(lineno, tuple(cells)))
    return RuleTable(component_kind, rows, str(path), data)


# ---------------------------------------------------------------------------
# Typed rules produced by compile()


@dataclass(frozen=True)
class SectionRule:
    header: str
    name: str
    case_sensitive: bool
    row: int


@dataclass(frozen=True)
class SentenceRule:
    pattern: str
    action: str  # begin | end | pseudo_end
    row: int


@dataclass(frozen=True)
class NerRule:
    phrase: str
    concept: str
    seeds: tuple          # attribute (name, value) pairs
    numeric: bool         # NUMERIC seed: mention carries a lab value
    case_sensitive: bool
    row: int


@dataclass(frozen=True)
class ExcludeRule:
    phrase: str
    target: str           # concept it suppresses, or ANY
    case_sensitive: bool
    row: int


@dataclass(frozen=True)
class ContextRule:
    trigger: str
    attribute: str
    value: str
    direction: str        # forward | backward | both
    window: int
    flag: str             # trigger | pseudo | terminate
    row: int


@dataclass(frozen=True)
class TemporalRule:
    pattern: str
    tag: str
    row: int


@dataclass(frozen=True)
class FeatureRule:
    conclusion: str
    conclusion_attrs: Optional[tuple]  # None means COPYALL
    evidence: str
    evidence_values: tuple             # required values; empty means ANY
    section: str                       # section name or ANY
    row: int


@dataclass(frozen=True)
class ValueRange:
    low: Optional[float]
    high: Optional[float]
    low_inclusive: bool = True
    high_inclusive: bool = True

    def contains(self, value: float) -> bool:
        if self.low is not None:
            if value < self.low or (value == self.low and not self.low_inclusive):
                return False
        if self.high is not None:
            if value > self.high or (value == self.high and not self.high_inclusive):
                return False
        return True


@dataclass(frozen=True)
class DocumentRule:
    group: str
    conclusion: str
    evidence: str          # mention type; "-" on DEFAULT rows
    priority: int
    is_default: bool
    value_range: Optional[ValueRange]
    row: int


@dataclass(frozen=True)
class PatientRule:
    criterion: str
    decision: str          # met | not_met
    evidence: tuple        # acceptable document conclusion types
    window_days: Optional[int]
    aggregation: str       # "ANY" or "COUNT>=k"
    count_threshold: int
    is_default: bool
    row: int


def _seed_pairs(cell: str):
    """Parse a seeds cell: semicolon/comma list of value or name=value."""
    pairs, numeric = [], False
    for part in cell.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        if part == "NUMERIC":
            numeric = True
        elif "=" in part:
            k, v = part.split("=", 1)
            pairs.append((k.strip(), v.strip()))
        else:
            pairs.append((part, part))
    return tuple(pairs), numeric


def _attr_values(cell: str) -> tuple:
    if cell.strip() == ANY_SECTION:
        return ()
    return tuple(v.strip() for v in cell.split(",") if v.strip())


def _parse_range(cell: str, where: str) -> ValueRange:
    cell = cell.strip()
    try:
        if ".." in cell:
            lo, hi = cell.split("..", 1)
            return ValueRange(float(lo), float(hi))
        for op, attrs in ((">=", dict(low_inclusive=True)),
                          ("<=", dict(high_inclusive=True)),
                          (">", dict(low_inclusive=False)),
                          ("<", dict(high_inclusive=False))):
            if cell.startswith(op):
                v = float(cell[len(op):])
                if op in (">", ">="):
                    return ValueRange(v, None, **attrs)
                return ValueRange(None, v, **attrs)
    except ValueError:
        pass
    raise CompileError(f"{where}: bad value range {cell!r} "
                       "(use low..high, >x, >=x, <x or <=x)")


_DIRECTIONS = {"forward", "backward", "both"}
_FLAGS = {"trigger", "pseudo", "terminate"}
_ACTIONS = {"begin", "end", "pseudo_end"}


@dataclass
class CompiledRuleset:
    """Immutable compiled form of all rule tables.

    Lexical components get token tries whose payloads are the typed rule
    objects; inference components get indexed rule lists.
    """
    fingerprint: str
    section_trie: TokenTrie = field(default_factory=TokenTrie)
    section_names: set = field(default_factory=set)
    sentence_rules: list = field(default_factory=list)
    ner_trie: TokenTrie = field(default_factory=TokenTrie)
    exclude_trie: TokenTrie = field(default_factory=TokenTrie)
    context_trie: TokenTrie = field(default_factory=TokenTrie)
    temporal_trie: TokenTrie = field(default_factory=TokenTrie)
    feature_rules_by_evidence: dict = field(default_factory=dict)
    document_groups: dict = field(default_factory=dict)   # group -> [DocumentRule]
    patient_groups: dict = field(default_factory=dict)    # criterion -> [PatientRule]
    ner_concepts: set = field(default_factory=set)

    @property
    def criteria(self) -> list:
        return sorted(self.patient_groups)

    def trie_stats(self) -> dict:
        return {
            "section": self.section_trie.stats(),
            "ner_include": self.ner_trie.stats(),
            "ner_exclude": self.exclude_trie.stats(),
            "context": self.context_trie.stats(),
            "temporal": self.temporal_trie.stats(),
        }


def _err(table: RuleTable, row: RuleRow, msg: str) -> CompileError:
    return CompileError(f"{table.source_path}:{row.row_number}: {msg}")


def compile_ruleset(tables: list[RuleTable]) -> CompiledRuleset:
    """Compile parsed tables into tries and rule indexes.

    Cross-references are validated here: feature section names must exist
    in the section table, document-rule evidence must be producible, and
    every document group / patient criterion must carry a DEFAULT row.
    """
    digest = hashlib.sha256()
    for t in sorted(tables, key=lambda t: (t.component_kind, t.source_path)):
        digest.update(t.component_kind.encode())
        digest.update(t.source_bytes)
    rs = CompiledRuleset(fingerprint=digest.hexdigest())
    rs.section_names.add("Unknown")

    by_kind: dict[str, list[RuleTable]] = {}
    for t in tables:
        by_kind.setdefault(t.component_kind, []).append(t)

    section_entries, ner_entries, exclude_entries = [], [], []
    context_entries, temporal_entries = [], []
    feature_rules, document_rules, patient_rules = [], [], []

    for t in by_kind.get("section", []):
        for r in t.rows:
            phrase, cs = _unquote(r.cells[0])
            rule = SectionRule(phrase, r.cells[1], cs, r.row_number)
            rs.section_names.add(rule.name)
            section_entries.append((phrase, rule, cs))

    for t in by_kind.get("sentence", []):
        for r in t.rows:
            if r.cells[1] not in _ACTIONS:
                raise _err(t, r, f"unknown sentence action {r.cells[1]!r}")
            rs.sentence_rules.append(SentenceRule(r.cells[0], r.cells[1],
                                                  r.row_number))

    for t in by_kind.get("ner_include", []):
        for r in t.rows:
            phrase, cs = _unquote(r.cells[0])
            seeds, numeric = _seed_pairs(r.cells[2]) if len(r.cells) > 2 else ((), False)
            rule = NerRule(phrase, r.cells[1], seeds, numeric, cs, r.row_number)
            rs.ner_concepts.add(rule.concept)
            ner_entries.append((phrase, rule, cs))

    for t in by_kind.get("ner_exclude", []):
        for r in t.rows:
            phrase, cs = _unquote(r.cells[0])
            rule = ExcludeRule(phrase, r.cells[1], cs, r.row_number)
            exclude_entries.append((phrase, rule, cs))

    for t in by_kind.get("context", []):
        for r in t.rows:
            phrase, cs = _unquote(r.cells[0])
            direction = r.cells[3]
            if direction not in _DIRECTIONS:
                raise _err(t, r, f"unknown direction {direction!r}")
            window = 8
            if len(r.cells) > 4 and r.cells[4]:
                try:
                    window = int(r.cells[4])
                except ValueError:
                    raise _err(t, r, f"bad window {r.cells[4]!r}") from None
                if window < 1:
                    raise _err(t, r, "window must be >= 1")
            flag = r.cells[5] if len(r.cells) > 5 and r.cells[5] else "trigger"
            if flag not in _FLAGS:
                raise _err(t, r, f"unknown flag {flag!r}")
            rule = ContextRule(phrase, r.cells[1], r.cells[2], direction,
                               window, flag, r.row_number)
            context_entries.append((phrase, rule, cs))

    for t in by_kind.get("temporal", []):
        for r in t.rows:
            phrase, cs = _unquote(r.cells[0])
            rule = TemporalRule(phrase, r.cells[1], r.row_number)
            temporal_entries.append((phrase, rule, cs))

    for t in by_kind.get("feature", []):
        for r in t.rows:
            concl_attrs_cell = r.cells[1].strip()
            concl_attrs = None if concl_attrs_cell == COPYALL \
                else _seed_pairs(concl_attrs_cell)[0]
            if not r.cells[0]:
                raise _err(t, r, "empty conclusion")
            rule = FeatureRule(r.cells[0], concl_attrs, r.cells[2],
                               _attr_values(r.cells[3]), r.cells[4] or ANY_SECTION,
                               r.row_number)
            if rule.section not in rs.section_names and rule.section != ANY_SECTION:
                raise _err(t, r, f"feature rule references unknown section "
                                 f"{rule.section!r}")
            feature_rules.append(rule)

    for t in by_kind.get("document", []):
        for r in t.rows:
            is_default = len(r.cells) > 4 and r.cells[4] == "DEFAULT"
            try:
                priority = int(r.cells[3])
            except ValueError:
                raise _err(t, r, f"bad priority {r.cells[3]!r}") from None
            vrange = None
            if len(r.cells) > 5 and r.cells[5] and r.cells[5] != "-":
                vrange = _parse_range(r.cells[5],
                                      f"{t.source_path}:{r.row_number}")
            rule = DocumentRule(r.cells[0], r.cells[1],
                                r.cells[2], priority, is_default, vrange,
                                r.row_number)
            document_rules.append(rule)
            if not is_default and rule.evidence in ("", "-"):
                raise _err(t, r, "non-DEFAULT document rule needs evidence")

    for t in by_kind.get("patient", []):
        for r in t.rows:
            decision = r.cells[1]
            if decision not in ("met", "not_met"):
                raise _err(t, r, f"unknown decision {decision!r}")
            window = None
            if r.cells[3] not in ("NONE", "", "-"):
                try:
                    window = int(r.cells[3])
                except ValueError:
                    raise _err(t, r, f"bad window_days {r.cells[3]!r}") from None
            agg = r.cells[4] or "ANY"
            threshold = 1
            if agg.startswith("COUNT>="):
                try:
                    threshold = int(agg[len("COUNT>="):])
                except ValueError:
                    raise _err(t, r, f"bad aggregation {agg!r}") from None
                agg = "COUNT>="
            elif agg != "ANY":
                raise _err(t, r, f"unknown aggregation {agg!r}")
            is_default = r.cells[5] == "DEFAULT"
            evidence = tuple(e.strip() for e in r.cells[2].split(",")
                             if e.strip() and e.strip() != "-")
            rule = PatientRule(r.cells[0], decision, evidence, window,
                               agg, threshold, is_default, r.row_number)
            patient_rules.append(rule)

    rs.section_trie = build_trie(section_entries)
    rs.ner_trie = build_trie(ner_entries)
    rs.exclude_trie = build_trie(exclude_entries)
    rs.context_trie = build_trie(context_entries)
    rs.temporal_trie = build_trie(temporal_entries)

    for rule in feature_rules:
        rs.feature_rules_by_evidence.setdefault(rule.evidence, []).append(rule)

    producible = set(rs.ner_concepts)
    producible.update(r.conclusion for r in feature_rules)
    dangling = []
    for rule in document_rules:
        rs.document_groups.setdefault(rule.group, []).append(rule)
        if not rule.is_default and rule.evidence not in producible:
            dangling.append(f"document rule row {rule.row} references "
                            f"unproducible evidence {rule.evidence!r}")
    doc_conclusions = {r.conclusion for r in document_rules}
    for group, rules in rs.document_groups.items():
        if not any(r.is_default for r in rules):
            dangling.append(f"document group {group!r} has no DEFAULT rule")
    for rule in patient_rules:
        rs.patient_groups.setdefault(rule.criterion, []).append(rule)
        for ev in rule.evidence:
            if ev not in doc_conclusions:
                dangling.append(f"patient rule row {rule.row} references "
                                f"unknown document conclusion {ev!r}")
    for criterion, rules in rs.patient_groups.items():
        if not any(r.is_default for r in rules):
            dangling.append(f"criterion {criterion!r} has no DEFAULT rule")
    if dangling:
        raise CompileError("; ".join(dangling))
    return rs


# canonical file names inside a rules directory
TABLE_FILES = {
    "section": "sections.tsv",
    "sentence": "sentences.tsv",
    "ner_include": "ner_include.tsv",
    "ner_exclude": "ner_exclude.tsv",
    "context": "context.tsv",
    "temporal": "temporal.tsv",
    "feature": "features.tsv",
    "document": "documents.tsv",
    "patient": "patients.tsv",
}


def load_rules_dir(rules_dir) -> list[RuleTable]:
    """Load every rule table present in a rules directory."""
    rules_dir = Path(rules_dir)
    tables = []
    for kind, fname in TABLE_FILES.items():
        path = rules_dir / fname
        if path.exists():
            tables.append(load_rule_table(path, kind))
    return tables


def compile_rules_dir(rules_dir) -> CompiledRuleset:
    return compile_ruleset(load_rules_dir(rules_dir))
