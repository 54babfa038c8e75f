"""Record splitting, date extraction and store tests."""

import re
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trialsieve.corpus import (DEFAULT_SEPARATOR_PATTERN, CorpusError,
                               EmptyInputError, MissingReferenceDateError,
                               Patient, Store, build_patient,
                               extract_record_date, infer_reference_date,
                               ingest, split_records)


def test_split_on_asterisk_lines():
    text = "first record\n****\nsecond record"
    assert split_records(text) == [(0, "first record"), (1, "second record")]


def test_separator_needs_four_asterisks():
    text = "a\n***\nb\n*****   \nc"
    recs = split_records(text)
    assert len(recs) == 2
    assert recs[0][1] == "a\n***\nb"


def test_file_without_separator_is_one_record():
    assert split_records("only one record") == [(0, "only one record")]


def test_consecutive_separators_collapse():
    text = "a\n****\n****\nb"
    assert [r[1] for r in split_records(text)] == ["a", "b"]


def test_whitespace_only_record_dropped():
    text = "a\n****\n   \n****\nb"
    assert [r[1] for r in split_records(text)] == ["a", "b"]


def test_empty_inputs_rejected():
    with pytest.raises(EmptyInputError):
        split_records("")
    with pytest.raises(EmptyInputError):
        split_records("****\n****")


_sep = re.compile(DEFAULT_SEPARATOR_PATTERN)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.sampled_from(
    ["note line", "****", "**** ", "", "  ", "2091-06-15 visit", "***"]),
    min_size=1, max_size=15))
def test_split_preserves_content_lines(lines):
    text = "\n".join(lines)
    expect = [l for l in lines if l.strip() and not _sep.fullmatch(l)]
    try:
        records = split_records(text)
    except EmptyInputError:
        assert expect == []
        return
    got = [l for _, r in records for l in r.split("\n") if l.strip()]
    assert got == expect
    assert [seq for seq, _ in records] == list(range(len(records)))


def test_record_date_header_form():
    assert extract_record_date("Record date: 2091-06-15\nbody") == \
        date(2091, 6, 15)


def test_record_date_bare_iso():
    assert extract_record_date("seen 2091-6-5 in clinic") == date(2091, 6, 5)


def test_record_date_slash_form_is_mdy():
    assert extract_record_date("visit on 6/5/2091") == date(2091, 6, 5)


def test_record_date_pattern_priority():
    # the header form wins even when a slash date appears earlier
    text = "emitted 1/2/2090\nRecord date: 2091-06-15\n"
    assert extract_record_date(text) == date(2091, 6, 15)


def test_record_date_absent():
    assert extract_record_date("no dates here") is None


def test_record_date_invalid_calendar(caplog):
    assert extract_record_date("Record date: 2091-02-30") is None


def test_build_patient_reference_is_latest():
    text = ("Record date: 2090-01-01\nold\n****\n"
            "Record date: 2091-06-15\nnew\n")
    p = build_patient("P1", text)
    assert [d.doc_id for d in p.documents] == ["P1-0", "P1-1"]
    assert p.reference_date == date(2091, 6, 15)


def test_build_patient_without_dates():
    p = build_patient("P1", "undated note")
    assert p.reference_date is None
    with pytest.raises(MissingReferenceDateError):
        infer_reference_date(p)


def test_store_roundtrip(tmp_path):
    store = Store(tmp_path / "s.db")
    p = build_patient("P1", "Record date: 2091-06-15\nhello")
    store.put_patient(p)
    assert store.patient_ids() == ["P1"]
    got = store.get_patient("P1")
    assert got.reference_date == date(2091, 6, 15)
    doc = store.get_document("P1-0")
    assert doc.text == p.documents[0].text
    with pytest.raises(CorpusError):
        store.get_patient("nope")
    with pytest.raises(CorpusError):
        store.get_document("nope")


def test_store_replace_removes_stale_documents():
    store = Store()
    store.put_patient(build_patient("P1", "a\n****\nb"))
    store.put_patient(build_patient("P1", "only one"))
    assert store.counts() == (1, 1)


def test_reference_date_equals_store_max(demo_store):
    assert demo_store.max_record_dates() == demo_store.reference_dates()


def test_ingest_counts_and_skips(tmp_path):
    src = tmp_path / "corpus"
    src.mkdir()
    (src / "P1.txt").write_text("Record date: 2091-01-02\nnote")
    (src / "P2.txt").write_text("a\n****\nb")
    (src / "empty.txt").write_text("")
    (src / "gold.xml").write_text("<LABELS/>")
    (src / ".hidden").write_text("x")
    store = Store()
    summary = ingest(src, store)
    assert (summary.patients, summary.documents) == (2, 3)
    assert any("empty.txt" in w for w in summary.warnings)
    assert any("P2" in w for w in summary.warnings)  # no record date


def test_ingest_is_idempotent(tmp_path, demo_dir):
    store = Store()
    s1 = ingest(demo_dir / "corpus", store)
    export1 = tmp_path / "a.tsv"
    store.export_documents_tsv(export1)
    s2 = ingest(demo_dir / "corpus", store)
    export2 = tmp_path / "b.tsv"
    store.export_documents_tsv(export2)
    assert (s1.patients, s1.documents) == (s2.patients, s2.documents)
    assert store.counts() == (s1.patients, s1.documents)
    assert export1.read_bytes() == export2.read_bytes()


def test_export_documents_tsv_format(tmp_path):
    store = Store()
    store.put_patient(build_patient("P1", "Record date: 2091-01-02\nnote"))
    out = tmp_path / "docs.tsv"
    store.export_documents_tsv(out)
    doc_id, pid, seq, rdate, nbytes = out.read_text().strip().split("\t")
    assert (doc_id, pid, seq, rdate) == ("P1-0", "P1", "0", "2091-01-02")
    assert int(nbytes) == len("Record date: 2091-01-02\nnote".encode())
