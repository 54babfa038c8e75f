"""Evaluation: confusion counts, per-criterion metrics, micro/macro rows,
and the gold/prediction XML label format.

"met" is the positive class. AUC from hard predictions is balanced
accuracy, (recall_met + specificity) / 2, which is the only convention
self-consistent with every published row we validate against.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

MET = "met"
NOT_MET = "not_met"

METRIC_FIELDS = ("prec_met", "rec_met", "specificity", "f1_met",
                 "prec_notmet", "rec_notmet", "f1_notmet",
                 "overall_f1", "auc")


class EvalError(Exception):
    pass


class SchemaError(EvalError):
    pass


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def add(self, gold: str, pred: str) -> None:
        if gold == MET:
            if pred == MET:
                self.tp += 1
            else:
                self.fn += 1
        else:
            if pred == MET:
                self.fp += 1
            else:
                self.tn += 1


@dataclass
class GoldLabelSet:
    patient_id: str
    labels: dict = field(default_factory=dict)  # criterion -> met | not_met


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def f1(precision: float, recall: float) -> float:
    return _ratio(2 * precision * recall, precision + recall) \
        if precision + recall else 0.0


def score_counts(c: ConfusionCounts) -> dict:
    """The full per-criterion metric row from one confusion matrix."""
    prec_met = _ratio(c.tp, c.tp + c.fp)
    rec_met = _ratio(c.tp, c.tp + c.fn)
    specificity = _ratio(c.tn, c.tn + c.fp)
    prec_notmet = _ratio(c.tn, c.tn + c.fn)
    rec_notmet = specificity
    f1_met = f1(prec_met, rec_met)
    f1_notmet = f1(prec_notmet, rec_notmet)
    return {
        "prec_met": prec_met, "rec_met": rec_met,
        "specificity": specificity, "f1_met": f1_met,
        "prec_notmet": prec_notmet, "rec_notmet": rec_notmet,
        "f1_notmet": f1_notmet,
        "overall_f1": (f1_met + f1_notmet) / 2,
        "auc": (rec_met + specificity) / 2,
    }


def score_criterion(counts: ConfusionCounts) -> dict:
    if counts.total == 0:
        raise EvalError("no scored patients")
    return score_counts(counts)


def aggregate(per_criterion: dict) -> dict:
    """Overall rows: micro from summed counts, macro as unweighted means
    of the per-criterion metric values."""
    if not per_criterion:
        raise EvalError("no criteria scored")
    summed = ConfusionCounts()
    for c in per_criterion.values():
        summed.tp += c.tp
        summed.fp += c.fp
        summed.fn += c.fn
        summed.tn += c.tn
    micro = score_counts(summed)
    rows = [score_counts(c) for c in per_criterion.values()]
    macro = {k: sum(r[k] for r in rows) / len(rows) for k in METRIC_FIELDS}
    return {"micro": micro, "macro": macro}


@dataclass
class MetricReport:
    per_criterion: dict            # criterion -> metric dict
    micro: dict
    macro: dict
    counts: dict                   # criterion -> ConfusionCounts

    def rows(self):
        for crit in sorted(self.per_criterion):
            yield crit, self.per_criterion[crit]
        yield "Overall (micro)", self.micro
        yield "Overall (macro)", self.macro

    def format_table(self) -> str:
        head = "\t".join(("criterion",) + METRIC_FIELDS)
        lines = [head]
        for name, row in self.rows():
            lines.append("\t".join([name] + [f"{row[k]:.4f}"
                                             for k in METRIC_FIELDS]))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"per_criterion": self.per_criterion,
                "micro": self.micro, "macro": self.macro}


def evaluate(gold: dict, predictions: dict, criteria: list) -> MetricReport:
    """Score per-patient label maps; both dicts map patient_id -> labels."""
    missing = sorted(set(gold) ^ set(predictions))
    if missing:
        raise EvalError("patient sets differ between gold and predictions: "
                        + ", ".join(missing))
    counts = {c: ConfusionCounts() for c in criteria}
    for pid in gold:
        for crit in criteria:
            counts[crit].add(gold[pid].labels[crit],
                             predictions[pid].labels[crit])
    per = {c: score_criterion(counts[c]) for c in criteria}
    overall = aggregate(counts)
    return MetricReport(per, overall["micro"], overall["macro"], counts)


# ---------------------------------------------------------------------------
# Label XML: <LABELS><MI-6MOS met="met"/>...</LABELS>, element names are
# upper-cased criterion ids, met attribute is "met" or "not met".


def _element_name(criterion: str) -> str:
    return criterion.upper()


def write_labels(labels: GoldLabelSet, path, criteria: list) -> None:
    root = ET.Element("LABELS")
    for crit in criteria:
        value = labels.labels[crit]
        ET.SubElement(root, _element_name(crit),
                      met="met" if value == MET else "not met")
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="unicode")


def read_labels(path, criteria: list) -> GoldLabelSet:
    """Parse one label file; every configured criterion must appear once."""
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise SchemaError(f"{path}: not well-formed XML: {exc}") from None
    by_name = {_element_name(c): c for c in criteria}
    labels = {}
    for el in root:
        crit = by_name.get(el.tag)
        if crit is None:
            raise SchemaError(f"{path}: unknown criterion element {el.tag!r}")
        value = el.get("met")
        if value == "met":
            labels[crit] = MET
        elif value == "not met":
            labels[crit] = NOT_MET
        else:
            raise SchemaError(f"{path}: bad met value {value!r} on {el.tag}")
    for crit in criteria:
        if crit not in labels:
            raise SchemaError(f"{path}: missing criterion {crit!r}")
    return GoldLabelSet(path.stem, labels)


def read_labels_dir(directory, criteria: list) -> dict:
    out = {}
    for path in sorted(Path(directory).glob("*.xml")):
        out[path.stem] = read_labels(path, criteria)
    return out


def write_predictions(decisions: list, out_dir, criteria: list) -> list:
    """Write per-patient prediction XML files from CriterionDecisions."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_patient: dict[str, dict] = {}
    for d in decisions:
        by_patient.setdefault(d.patient_id, {})[d.criterion] = d.decision
    written = []
    for pid in sorted(by_patient):
        labels = GoldLabelSet(pid, by_patient[pid])
        path = out_dir / f"{pid}.xml"
        write_labels(labels, path, criteria)
        written.append(path)
    return written
