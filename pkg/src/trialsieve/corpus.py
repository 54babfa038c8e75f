"""Corpus ingestion: patient files -> EMR-like document store.

One plain-text file per patient (filename stem = patient id); records
inside a file are separated by lines of four or more asterisks. Each
record's date is extracted from its header and the per-patient reference
date is the latest record date.
"""

from __future__ import annotations

import logging
import re
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

log = logging.getLogger(__name__)

DEFAULT_SEPARATOR_PATTERN = r"\*{4,}\s*"

# ordered; first match wins
DEFAULT_DATE_PATTERNS = (
    r"^Record date:\s*(\d{4})-(\d{1,2})-(\d{1,2})",
    r"(\d{4})-(\d{1,2})-(\d{1,2})",
    r"(\d{1,2})/(\d{1,2})/(\d{4})",
)


class CorpusError(Exception):
    pass


class EmptyInputError(CorpusError):
    pass


class MissingReferenceDateError(CorpusError):
    pass


@dataclass
class ClinicalDocument:
    doc_id: str
    patient_id: str
    seq: int
    text: str
    record_date: Optional[date] = None


@dataclass
class Patient:
    patient_id: str
    documents: list = field(default_factory=list)
    reference_date: Optional[date] = None


@dataclass
class IngestSummary:
    patients: int = 0
    documents: int = 0
    warnings: list = field(default_factory=list)


def split_records(file_text: str,
                  separator_pattern: str = DEFAULT_SEPARATOR_PATTERN
                  ) -> list[tuple[int, str]]:
    """Split a concatenated patient file into (seq, record_text) pairs.

    Separator lines belong to no record; a file without separators is one
    record. A file containing no record content raises EmptyInputError.
    """
    if not file_text:
        raise EmptyInputError("empty patient file")
    sep = re.compile(separator_pattern)
    groups: list[list[str]] = [[]]
    for line in file_text.split("\n"):
        if sep.fullmatch(line):
            if groups[-1]:
                groups.append([])
        else:
            groups[-1].append(line)
    records = []
    for group in groups:
        text = "\n".join(group)
        if text.strip():
            records.append((len(records), text))
    if not records:
        raise EmptyInputError("patient file contains only separator lines")
    return records


def extract_record_date(record_text: str,
                        date_patterns=DEFAULT_DATE_PATTERNS) -> Optional[date]:
    """First date matched by the configured patterns; None if no match.

    A syntactically matched but invalid calendar date yields None with a
    logged warning.
    """
    for i, pattern in enumerate(date_patterns):
        m = re.search(pattern, record_text, re.MULTILINE)
        if not m:
            continue
        g = m.groups()
        if pattern.endswith(r"(\d{4})"):
            y, mo, d = int(g[2]), int(g[0]), int(g[1])
        else:
            y, mo, d = int(g[0]), int(g[1]), int(g[2])
        try:
            return date(y, mo, d)
        except ValueError:
            log.warning("invalid calendar date %r in record", m.group())
            return None
    return None


def infer_reference_date(patient: Patient) -> date:
    """Latest record date over the patient's documents."""
    dates = [d.record_date for d in patient.documents if d.record_date]
    if not dates:
        raise MissingReferenceDateError(
            f"patient {patient.patient_id} has no dated record")
    return max(dates)


class Store:
    """Embedded relational store for patients and documents.

    Single-writer during ingestion; safe for concurrent readers afterwards
    (a lock serializes cursor use on the shared connection).
    """

    def __init__(self, path=":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock:
            self._conn.executescript("""
                CREATE TABLE IF NOT EXISTS patients(
                    patient_id TEXT PRIMARY KEY,
                    reference_date TEXT);
                CREATE TABLE IF NOT EXISTS documents(
                    doc_id TEXT PRIMARY KEY,
                    patient_id TEXT NOT NULL,
                    seq INTEGER NOT NULL,
                    record_date TEXT,
                    text TEXT NOT NULL);
            """)
            self._conn.commit()

    def close(self):
        self._conn.close()

    def put_patient(self, patient: Patient) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO patients VALUES (?, ?)",
                (patient.patient_id,
                 patient.reference_date.isoformat()
                 if patient.reference_date else None))
            self._conn.execute("DELETE FROM documents WHERE patient_id = ?",
                               (patient.patient_id,))
            for doc in patient.documents:
                self._conn.execute(
                    "INSERT OR REPLACE INTO documents VALUES (?, ?, ?, ?, ?)",
                    (doc.doc_id, doc.patient_id, doc.seq,
                     doc.record_date.isoformat() if doc.record_date else None,
                     doc.text))
            self._conn.commit()

    def patient_ids(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT patient_id FROM patients ORDER BY patient_id").fetchall()
        return [r[0] for r in rows]

    def get_patient(self, patient_id: str) -> Patient:
        with self._lock:
            prow = self._conn.execute(
                "SELECT reference_date FROM patients WHERE patient_id = ?",
                (patient_id,)).fetchone()
            if prow is None:
                raise CorpusError(f"unknown patient {patient_id!r}")
            rows = self._conn.execute(
                "SELECT doc_id, seq, record_date, text FROM documents "
                "WHERE patient_id = ? ORDER BY seq", (patient_id,)).fetchall()
        docs = [ClinicalDocument(r[0], patient_id, r[1],
                                 r[3], date.fromisoformat(r[2]) if r[2] else None)
                for r in rows]
        ref = date.fromisoformat(prow[0]) if prow[0] else None
        return Patient(patient_id, docs, ref)

    def get_document(self, doc_id: str) -> ClinicalDocument:
        with self._lock:
            row = self._conn.execute(
                "SELECT patient_id, seq, record_date, text FROM documents "
                "WHERE doc_id = ?", (doc_id,)).fetchone()
        if row is None:
            raise CorpusError(f"unknown document {doc_id!r}")
        return ClinicalDocument(doc_id, row[0], row[1], row[3],
                                date.fromisoformat(row[2]) if row[2] else None)

    def counts(self) -> tuple[int, int]:
        with self._lock:
            p = self._conn.execute("SELECT COUNT(*) FROM patients").fetchone()[0]
            d = self._conn.execute("SELECT COUNT(*) FROM documents").fetchone()[0]
        return p, d

    def max_record_dates(self) -> dict:
        """patient_id -> max stored record_date (store-level query)."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT patient_id, MAX(record_date) FROM documents "
                "GROUP BY patient_id").fetchall()
        return {r[0]: r[1] for r in rows}

    def reference_dates(self) -> dict:
        with self._lock:
            rows = self._conn.execute(
                "SELECT patient_id, reference_date FROM patients").fetchall()
        return {r[0]: r[1] for r in rows}

    def export_documents_tsv(self, path) -> None:
        """One row per document: doc_id, patient_id, seq, record_date, bytes."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT doc_id, patient_id, seq, record_date, text "
                "FROM documents ORDER BY patient_id, seq").fetchall()
        with open(path, "w", encoding="utf-8") as fh:
            for doc_id, pid, seq, rdate, text in rows:
                fh.write(f"{doc_id}\t{pid}\t{seq}\t{rdate or ''}\t"
                         f"{len(text.encode('utf-8'))}\n")


def build_patient(patient_id: str, file_text: str,
                  separator_pattern: str = DEFAULT_SEPARATOR_PATTERN,
                  date_patterns=DEFAULT_DATE_PATTERNS) -> Patient:
    records = split_records(file_text, separator_pattern)
    docs = [ClinicalDocument(f"{patient_id}-{seq}", patient_id, seq, text,
                             extract_record_date(text, date_patterns))
            for seq, text in records]
    patient = Patient(patient_id, docs)
    try:
        patient.reference_date = infer_reference_date(patient)
    except MissingReferenceDateError:
        patient.reference_date = None
    return patient


def ingest(directory, store: Store,
           separator_pattern: str = DEFAULT_SEPARATOR_PATTERN,
           date_patterns=DEFAULT_DATE_PATTERNS) -> IngestSummary:
    """Load every patient file in a directory into the store.

    Idempotent: re-ingesting the same directory leaves identical contents.
    Unreadable or empty files produce a warning and are skipped.
    """
    directory = Path(directory)
    summary = IngestSummary()
    for path in sorted(directory.iterdir()):
        if not path.is_file() or path.name.startswith("."):
            continue
        if path.suffix.lower() == ".xml":
            continue
        try:
            text = path.read_text(encoding="utf-8")
            patient = build_patient(path.stem, text,
                                    separator_pattern, date_patterns)
        except (OSError, UnicodeDecodeError, EmptyInputError) as exc:
            summary.warnings.append(f"{path.name}: {exc}")
            continue
        if patient.reference_date is None:
            summary.warnings.append(
                f"{path.name}: no record date found; patient "
                f"{patient.patient_id} has no reference date")
        store.put_patient(patient)
        summary.patients += 1
        summary.documents += len(patient.documents)
    return summary
