"""HTTP API consumed by the workbench.

Single-user serving layer over a store and a rules directory. Every
payload carries the current ruleset fingerprint so a stale client view
is detectable. Recompiles are serialized; a run arriving while a
recompile is in flight gets 503 with a Retry-After hint.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from . import metrics, pipeline
from .config import Config
from .corpus import CorpusError, Store
from .ruleset import RuleError, TABLE_FILES, compile_rules_dir


class RuleTablePayload(BaseModel):
    content: str


class EngineState:
    def __init__(self, cfg: Config):
        self.cfg = cfg
        self.store = Store(cfg.store_path)
        self.rules_dir = Path(cfg.rules_dir)
        self.ruleset = compile_rules_dir(self.rules_dir)
        self._compile_lock = threading.Lock()
        self.recompiling = False

    def recompile(self) -> dict:
        with self._compile_lock:
            self.recompiling = True
            try:
                self.ruleset = compile_rules_dir(self.rules_dir)
            finally:
                self.recompiling = False
        return {"fingerprint": self.ruleset.fingerprint}


def create_app(cfg: Config) -> FastAPI:
    state = EngineState(cfg)
    app = FastAPI(title="trialsieve")
    app.state.engine = state

    def versioned(payload: dict) -> dict:
        payload["fingerprint"] = state.ruleset.fingerprint
        return payload

    @app.get("/api/patients")
    def patients():
        out = []
        for pid in state.store.patient_ids():
            p = state.store.get_patient(pid)
            out.append({"patient_id": pid,
                        "reference_date": str(p.reference_date)
                        if p.reference_date else None,
                        "doc_ids": [d.doc_id for d in p.documents]})
        return versioned({"patients": out})

    @app.get("/api/documents/{doc_id}")
    def document(doc_id: str):
        try:
            doc = state.store.get_document(doc_id)
        except CorpusError as exc:
            raise HTTPException(404, str(exc)) from None
        return versioned({"doc_id": doc.doc_id, "patient_id": doc.patient_id,
                          "seq": doc.seq, "text": doc.text,
                          "record_date": str(doc.record_date)
                          if doc.record_date else None})

    @app.post("/api/run/{doc_id}")
    def run_document(doc_id: str, response: Response):
        if state.recompiling:
            response.headers["Retry-After"] = "1"
            raise HTTPException(503, "recompile in flight, retry")
        try:
            doc = state.store.get_document(doc_id)
        except CorpusError as exc:
            raise HTTPException(404, str(exc)) from None
        result = pipeline.process_document(
            doc, state.ruleset, trace_on=True,
            history_threshold_days=cfg.history_threshold_days)
        patient = state.store.get_patient(doc.patient_id)
        run = pipeline.process_patient(
            patient, state.ruleset,
            history_threshold_days=cfg.history_threshold_days)
        return versioned({"trace": result.trace.to_dict(),
                          "decisions": [d.snapshot()
                                        for d in run.decisions]})

    @app.get("/api/trace/{doc_id}")
    def trace(doc_id: str):
        try:
            doc = state.store.get_document(doc_id)
        except CorpusError as exc:
            raise HTTPException(404, str(exc)) from None
        result = pipeline.process_document(
            doc, state.ruleset, trace_on=True,
            history_threshold_days=cfg.history_threshold_days)
        return versioned({"trace": result.trace.to_dict()})

    @app.get("/api/rules")
    def rules():
        tables = {}
        for kind, fname in TABLE_FILES.items():
            path = state.rules_dir / fname
            if path.exists():
                tables[kind] = path.read_text(encoding="utf-8")
        return versioned({"tables": tables})

    @app.put("/api/rules/{component_kind}")
    def put_rules(component_kind: str, payload: RuleTablePayload):
        if component_kind not in TABLE_FILES:
            raise HTTPException(404, f"unknown component {component_kind!r}")
        path = state.rules_dir / TABLE_FILES[component_kind]
        path.write_text(payload.content, encoding="utf-8")
        return versioned({"written": str(path)})

    @app.post("/api/recompile")
    def recompile():
        try:
            return versioned(state.recompile())
        except RuleError as exc:
            # previous compiled ruleset stays active
            raise HTTPException(422, str(exc)) from None

    @app.get("/api/decisions/{patient_id}")
    def decisions(patient_id: str):
        try:
            patient = state.store.get_patient(patient_id)
        except CorpusError as exc:
            raise HTTPException(404, str(exc)) from None
        run = pipeline.process_patient(
            patient, state.ruleset,
            history_threshold_days=cfg.history_threshold_days)
        return versioned({"decisions": [d.snapshot() for d in run.decisions]})

    @app.get("/api/eval")
    def eval_endpoint(gold_dir: str = ""):
        gold_path = Path(gold_dir) if gold_dir \
            else Path(cfg.output_dir) / "gold"
        if not gold_path.exists():
            raise HTTPException(404, f"gold directory {gold_path} not found")
        result = pipeline.run_corpus(
            state.store, state.ruleset, cfg.output_dir, cfg.parallelism,
            history_threshold_days=cfg.history_threshold_days)
        preds = {}
        by_patient = {}
        for d in result.decisions:
            by_patient.setdefault(d.patient_id, {})[d.criterion] = d.decision
        for pid, labels in by_patient.items():
            preds[pid] = metrics.GoldLabelSet(pid, labels)
        gold = metrics.read_labels_dir(gold_path, state.ruleset.criteria)
        report = metrics.evaluate(gold, preds, state.ruleset.criteria)
        return versioned({"report": report.to_dict()})

    return app
