"""Seeded synthetic demo assets: rule tables and a 20-patient corpus.

The generator composes patient notes from templates the demo ruleset
understands and emits matching gold labels, so an end-to-end run over the
generated corpus should score a perfect micro-F1. Two scenarios from real
error analysis are always present: coronary-artery-disease medications
split across two notes (patient P00) and a recent-MI window case (P01).
"""

from __future__ import annotations

import random
import shutil
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

from .metrics import MET, NOT_MET, GoldLabelSet, write_labels

CRITERIA = ["Abdominal", "Advanced-cad", "Alcohol-abuse", "Asp-for-mi",
            "Creatinine", "Dietsupp-2mos", "Drug-abuse", "English",
            "Hba1c", "Keto-1yr", "Major-diabetes", "Makes-decisions",
            "Mi-6mos"]

SECTION_ORDER = ["HISTORY OF PRESENT ILLNESS", "FINDINGS", "LABS",
                 "MEDICATIONS", "SOCIAL HISTORY", "IMPRESSION"]

_FILLERS = [
    "Patient seen in clinic for routine follow up.",
    "Vital signs were stable.",
    "Plan reviewed with the patient.",
    "Will continue current management.",
]


def copy_demo_rules(dest) -> Path:
    """Materialize the bundled demo rule tables into a directory."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    pkg_dir = resources.files("trialsieve") / "demo_rules"
    for entry in pkg_dir.iterdir():
        if entry.name.endswith(".tsv"):
            shutil.copyfile(str(entry), dest / entry.name)
    return dest


@dataclass
class _Placement:
    record: int          # 0 = oldest, 1 = middle, 2 = latest
    section: str
    sentence: str


def _scenarios(rng: random.Random):
    """Choose one scenario per criterion; returns (placements, labels,
    cad evidence types contributed)."""
    placements: list[_Placement] = []
    labels: dict[str, str] = {}
    cad_types: set[str] = set()

    # Mi-6mos drives the MI evidence reused by Advanced-cad.
    mi_mode = rng.choice(["none", "recent", "old", "negated"])
    if mi_mode == "recent":
        placements.append(_Placement(1, "FINDINGS",
                                     "He had a myocardial infarction."))
        labels["Mi-6mos"] = MET
        cad_types.add("MI")
    elif mi_mode == "old":
        placements.append(_Placement(0, "FINDINGS",
                                     "He had a myocardial infarction."))
        labels["Mi-6mos"] = NOT_MET
        cad_types.add("MI")
    elif mi_mode == "negated":
        placements.append(_Placement(2, "FINDINGS",
                                     "No evidence of myocardial infarction."))
        labels["Mi-6mos"] = NOT_MET
    else:
        labels["Mi-6mos"] = NOT_MET

    cad_mode = rng.choice(["none", "one_med", "cross_doc_meds",
                           "angina_ischemia"])
    if cad_mode == "one_med":
        placements.append(_Placement(2, "MEDICATIONS",
                                     "Continues nitroglycerin daily."))
        cad_types.add("Nitroglycerin")
    elif cad_mode == "cross_doc_meds":
        placements.append(_Placement(0, "MEDICATIONS",
                                     "Started nitroglycerin for chest pain."))
        placements.append(_Placement(1, "MEDICATIONS",
                                     "Continues labetalol daily."))
        cad_types.update(("Nitroglycerin", "Labetalol"))
    elif cad_mode == "angina_ischemia":
        placements.append(_Placement(2, "FINDINGS",
                                     "Angina and ischemia were noted."))
        cad_types.update(("Angina", "Ischemia"))
    labels["Advanced-cad"] = MET if len(cad_types) >= 2 else NOT_MET

    def simple(criterion, met_placement, notmet_placement=None,
               met_label=MET):
        mode = rng.choice(["met", "not_met"])
        if mode == "met":
            placements.append(met_placement)
            labels[criterion] = met_label
        else:
            if notmet_placement is not None and rng.random() < 0.5:
                placements.append(notmet_placement)
            labels[criterion] = NOT_MET if met_label == MET else MET

    simple("Abdominal",
           _Placement(1, "HISTORY OF PRESENT ILLNESS",
                      "He underwent abdominal surgery."),
           _Placement(1, "HISTORY OF PRESENT ILLNESS",
                      "No abdominal surgery."))
    simple("Alcohol-abuse",
           _Placement(2, "SOCIAL HISTORY", "Long history of alcohol abuse."),
           _Placement(2, "SOCIAL HISTORY", "Denies alcohol abuse."))
    simple("Asp-for-mi",
           _Placement(2, "MEDICATIONS", "Aspirin 81 mg daily."),
           _Placement(2, "MEDICATIONS", "Aspirin discontinued."))
    simple("Creatinine",
           _Placement(2, "LABS", "Creatinine was 2.1 on recent labs."),
           _Placement(2, "LABS", "Creatinine was 0.9 on recent labs."))
    simple("Drug-abuse",
           _Placement(2, "SOCIAL HISTORY", "Admits cocaine use."),
           _Placement(2, "SOCIAL HISTORY", "Denies cocaine use."))
    simple("Hba1c",
           _Placement(2, "LABS", "HbA1c was 7.2 this visit."),
           _Placement(2, "LABS", "HbA1c was 10.4 this visit."))
    simple("Major-diabetes",
           _Placement(1, "HISTORY OF PRESENT ILLNESS",
                      "Diabetic nephropathy was confirmed."))

    # English and Makes-decisions default to met.
    simple("English",
           _Placement(1, "SOCIAL HISTORY", "Primary language is Spanish."),
           _Placement(1, "SOCIAL HISTORY", "Speaks English fluently."),
           met_label=NOT_MET)
    simple("Makes-decisions",
           _Placement(2, "HISTORY OF PRESENT ILLNESS",
                      "Patient is unable to make decisions."),
           met_label=NOT_MET)

    # window-bearing criteria: record placement decides the label
    supp = rng.choice(["recent", "stale", "none"])
    if supp == "recent":
        placements.append(_Placement(2, "MEDICATIONS",
                                     "Takes fish oil daily."))
        labels["Dietsupp-2mos"] = MET
    elif supp == "stale":
        placements.append(_Placement(0, "MEDICATIONS",
                                     "Takes fish oil daily."))
        labels["Dietsupp-2mos"] = NOT_MET
    else:
        labels["Dietsupp-2mos"] = NOT_MET

    keto = rng.choice(["recent", "stale", "negated", "none"])
    if keto == "recent":
        placements.append(_Placement(1, "HISTORY OF PRESENT ILLNESS",
                                     "Admitted for diabetic ketoacidosis."))
        labels["Keto-1yr"] = MET
    elif keto == "stale":
        placements.append(_Placement(0, "HISTORY OF PRESENT ILLNESS",
                                     "Admitted for diabetic ketoacidosis."))
        labels["Keto-1yr"] = NOT_MET
    elif keto == "negated":
        placements.append(_Placement(2, "HISTORY OF PRESENT ILLNESS",
                                     "No evidence of ketoacidosis."))
        labels["Keto-1yr"] = NOT_MET
    else:
        labels["Keto-1yr"] = NOT_MET

    return placements, labels


def _cad_label(placements) -> str:
    """Recompute the Advanced-cad label from the final sentence set."""
    types = set()
    for p in placements:
        s = p.sentence.lower()
        if "myocardial infarction" in s and not s.startswith("no evidence"):
            types.add("MI")
        if "nitroglycerin" in s:
            types.add("Nitroglycerin")
        if "labetalol" in s:
            types.add("Labetalol")
        if "angina" in s:
            types.add("Angina")
        if "ischemia" in s:
            types.add("Ischemia")
    return MET if len(types) >= 2 else NOT_MET


def _render_record(record_date: date, by_section: dict,
                   rng: random.Random) -> str:
    lines = [f"Record date: {record_date.isoformat()}", ""]
    wrote_any = False
    for section in SECTION_ORDER:
        sentences = by_section.get(section, [])
        if section == "HISTORY OF PRESENT ILLNESS" and not sentences:
            sentences = [rng.choice(_FILLERS)]
        if not sentences:
            continue
        lines.append(f"{section}:")
        lines.extend(sentences)
        lines.append("")
        wrote_any = True
    assert wrote_any
    return "\n".join(lines).rstrip("\n") + "\n"


def generate_corpus(dest, n_patients: int = 20, seed: int = 7,
                    reference: date = date(2091, 6, 15)):
    """Write corpus/<pid>.txt and gold/<pid>.xml under dest.

    Deterministic for a given seed. Returns the per-patient gold labels.
    """
    dest = Path(dest)
    corpus_dir = dest / "corpus"
    gold_dir = dest / "gold"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    gold_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    gold = {}
    for i in range(n_patients):
        pid = f"P{i:02d}"
        ref = reference - timedelta(days=rng.randrange(0, 120))
        record_dates = [ref - timedelta(days=400), ref - timedelta(days=100),
                        ref]
        placements, labels = _scenarios(rng)
        if i == 0:
            # mandatory fixture: CAD meds split across two notes
            placements = [p for p in placements
                          if "nitroglycerin" not in p.sentence.lower()
                          and "labetalol" not in p.sentence.lower()]
            placements.append(_Placement(
                0, "MEDICATIONS", "Started nitroglycerin for chest pain."))
            placements.append(_Placement(
                1, "MEDICATIONS", "Continues labetalol daily."))
            labels["Advanced-cad"] = _cad_label(placements)
        if i == 1:
            # mandatory fixture: MI inside the 183-day reference window
            placements = [p for p in placements
                          if "myocardial" not in p.sentence.lower()]
            placements.append(_Placement(1, "FINDINGS",
                                         "He had a myocardial infarction."))
            labels["Mi-6mos"] = MET
            labels["Advanced-cad"] = _cad_label(placements)

        sections_per_record = [{}, {}, {}]
        for p in placements:
            sections_per_record[p.record].setdefault(
                p.section, []).append(p.sentence)
        records = [_render_record(record_dates[k], sections_per_record[k],
                                  rng) for k in range(3)]
        (corpus_dir / f"{pid}.txt").write_text(
            "\n****\n".join(records), encoding="utf-8")
        labelset = GoldLabelSet(pid, labels)
        write_labels(labelset, gold_dir / f"{pid}.xml", CRITERIA)
        gold[pid] = labelset
    return gold


def init_demo(dest, n_patients: int = 20, seed: int = 7) -> dict:
    """Set up rules/, corpus/ and gold/ under dest; returns gold labels."""
    dest = Path(dest)
    copy_demo_rules(dest / "rules")
    return generate_corpus(dest, n_patients=n_patients, seed=seed)
