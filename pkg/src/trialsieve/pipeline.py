"""Per-document and per-patient orchestration with component traces.

Order is fixed: sectioner -> segmenter -> ner -> context -> temporal ->
feature -> document inference, then a per-patient reduce over document
conclusions. Each stage's annotations can be captured as an immutable
trace layer for the debugging workbench.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import context as context_mod
from . import inference, ner, sectioner, segmenter, temporal
from .corpus import ClinicalDocument, Patient, Store
from .matcher import tokenize
from .ruleset import CompiledRuleset

TRACE_LAYERS = ("sectioner", "segmenter", "ner", "context", "temporal",
                "feature", "document")


class PipelineError(Exception):
    def __init__(self, component: str, doc_id: str, cause: Exception):
        super().__init__(f"{component} failed on {doc_id}: {cause}")
        self.component = component
        self.doc_id = doc_id
        self.cause = cause


@dataclass
class Trace:
    doc_id: str
    fingerprint: str
    layers: list = field(default_factory=list)  # (component, snapshot list)

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "fingerprint": self.fingerprint,
                "layers": [{"component": c, "annotations": a}
                           for c, a in self.layers]}

    def write(self, path) -> None:
        """Line-delimited records: one line per layer."""
        with open(path, "w", encoding="utf-8") as fh:
            for component, annotations in self.layers:
                fh.write(json.dumps({"doc_id": self.doc_id,
                                     "fingerprint": self.fingerprint,
                                     "component": component,
                                     "annotations": annotations},
                                    sort_keys=True) + "\n")


@dataclass
class DocResult:
    doc_id: str
    mentions: list
    conclusions: list
    trace: Trace | None = None


@dataclass
class RunResult:
    decisions: list = field(default_factory=list)
    traces: dict = field(default_factory=dict)      # doc_id -> Trace
    timing: dict = field(default_factory=dict)      # component -> seconds
    errors: list = field(default_factory=list)


def _snapshot_sections(sections) -> list:
    return [{"type": s.name, "begin": s.body_span[0], "end": s.body_span[1],
             "header_begin": s.header_span[0], "header_end": s.header_span[1]}
            for s in sections]


def _snapshot_sentences(sentences) -> list:
    return [{"type": "Sentence", "begin": s.begin, "end": s.end,
             "index": s.index} for s in sentences]


def process_document(doc: ClinicalDocument, ruleset: CompiledRuleset,
                     trace_on: bool = False,
                     history_threshold_days: int =
                     temporal.DEFAULT_HISTORY_THRESHOLD_DAYS,
                     timing: dict | None = None) -> DocResult:
    """Run the full component sequence over one document."""
    trace = Trace(doc.doc_id, ruleset.fingerprint) if trace_on else None
    timing = timing if timing is not None else {}

    def timed(component, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - rewrapped with context
            raise PipelineError(component, doc.doc_id, exc) from exc
        timing[component] = timing.get(component, 0.0) + \
            (time.perf_counter() - t0)
        return result

    text = doc.text
    tokens = timed("tokenize", tokenize, text)
    sections = timed("sectioner", sectioner.detect_sections, text,
                     ruleset.section_trie, tokens)
    if trace:
        trace.layers.append(("sectioner", _snapshot_sections(sections)))
    sentences = timed("segmenter", segmenter.segment, text,
                      ruleset.sentence_rules)
    if trace:
        trace.layers.append(("segmenter", _snapshot_sentences(sentences)))

    all_mentions = []
    sentence_tokens = {}
    for sent in sentences:
        stoks = [t for t in tokens if sent.begin <= t.begin < sent.end]
        sentence_tokens[sent.index] = stoks
        ms = timed("ner", ner.match_concepts, stoks, ruleset.ner_trie,
                   ruleset.exclude_trie, sent.index)
        all_mentions.extend(ms)
    if trace:
        trace.layers.append(("ner", [m.snapshot() for m in all_mentions]))

    for sent in sentences:
        ms = [m for m in all_mentions if m.sentence_index == sent.index]
        timed("context", context_mod.apply_context,
              sentence_tokens[sent.index], ms, ruleset.context_trie)
    if trace:
        trace.layers.append(("context", [m.snapshot() for m in all_mentions]))

    for sent in sentences:
        stoks = sentence_tokens[sent.index]
        exprs = timed("temporal", temporal.find_expressions, stoks,
                      ruleset.temporal_trie, doc.record_date)
        for m in all_mentions:
            if m.sentence_index != sent.index:
                continue
            resolved = temporal.resolve_event_date(m, exprs, doc.record_date)
            m.event_earliest = resolved.earliest
            m.event_latest = resolved.latest
            m.event_basis = resolved.basis
            if doc.record_date is not None and resolved.basis == "expression":
                cls = temporal.classify_temporality(
                    resolved, doc.record_date, history_threshold_days)
                if cls is not None:
                    m.attributes["temporality"] = cls
    if trace:
        trace.layers.append(("temporal", [m.snapshot() for m in all_mentions]))

    concluded = []
    for m in all_mentions:
        section = sectioner.section_of(m.begin, sections, max(len(text), 1))
        concluded.extend(timed("feature", inference.apply_feature_rules,
                               m, section, ruleset.feature_rules_by_evidence))
    if trace:
        trace.layers.append(("feature", [m.snapshot() for m in concluded]))

    mentions = all_mentions + concluded
    findings = []
    for m in mentions:
        if m.numeric_bearing:
            f = inference.extract_numeric_value(
                m, sentence_tokens.get(m.sentence_index, []))
            if f is not None:
                findings.append(f)
    conclusions = timed("document", inference.infer_document, doc.doc_id,
                        mentions, findings, ruleset.document_groups)
    if trace:
        trace.layers.append(("document",
                             [c.snapshot() for c in conclusions]))
    return DocResult(doc.doc_id, mentions, conclusions, trace)


def process_patient(patient: Patient, ruleset: CompiledRuleset,
                    trace_on: bool = False,
                    history_threshold_days: int =
                    temporal.DEFAULT_HISTORY_THRESHOLD_DAYS) -> RunResult:
    """Process all of a patient's documents, then patient inference."""
    result = RunResult()
    conclusions = []
    for doc in patient.documents:
        dr = process_document(doc, ruleset, trace_on,
                              history_threshold_days, result.timing)
        conclusions.extend(dr.conclusions)
        if dr.trace:
            result.traces[doc.doc_id] = dr.trace
    t0 = time.perf_counter()
    result.decisions = inference.infer_patient(
        patient.patient_id, patient.reference_date, conclusions,
        ruleset.patient_groups)
    result.timing["patient"] = result.timing.get("patient", 0.0) + \
        (time.perf_counter() - t0)
    return result


def run_corpus(store: Store, ruleset: CompiledRuleset, out_dir,
               parallelism: int = 1, trace_on: bool = False,
               history_threshold_days: int =
               temporal.DEFAULT_HISTORY_THRESHOLD_DAYS) -> RunResult:
    """Run every stored patient; deterministic for any worker count.

    Predictions are written per patient into out_dir; per-patient failures
    are recorded and the run continues.
    """
    from .metrics import write_predictions

    patient_ids = store.patient_ids()
    aggregate = RunResult()

    def work(pid):
        try:
            return pid, process_patient(store.get_patient(pid), ruleset,
                                        trace_on, history_threshold_days)
        except PipelineError as exc:
            return pid, exc

    if parallelism <= 1:
        outcomes = [work(pid) for pid in patient_ids]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(work, patient_ids))

    for pid, outcome in sorted(outcomes, key=lambda o: o[0]):
        if isinstance(outcome, Exception):
            aggregate.errors.append(f"{pid}: {outcome}")
            continue
        aggregate.decisions.extend(outcome.decisions)
        aggregate.traces.update(outcome.traces)
        for k, v in outcome.timing.items():
            aggregate.timing[k] = aggregate.timing.get(k, 0.0) + v

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_predictions(aggregate.decisions, out_dir / "predictions",
                      ruleset.criteria)
    if trace_on:
        trace_dir = out_dir / "traces"
        trace_dir.mkdir(exist_ok=True)
        for doc_id, trace in sorted(aggregate.traces.items()):
            trace.write(trace_dir / f"{doc_id}.jsonl")
    return aggregate
