"""Confusion counts and accuracy / recall / precision / F1 with the
vulnerable class (label 1) as positive."""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

from evmcfg.errors import EmptyInput, LengthMismatch


class Flag(str, enum.Enum):
    PRECISION_UNDEFINED = "PrecisionUndefined"
    RECALL_UNDEFINED = "RecallUndefined"
    F1_UNDEFINED = "F1Undefined"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    accuracy: float
    recall: float
    precision: float
    f1: float
    flags: frozenset[Flag] = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        c = self.counts
        return {
            "tp": c.tp,
            "fn": c.fn,
            "fp": c.fp,
            "tn": c.tn,
            "accuracy": self.accuracy,
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
            "flags": sorted(f.value for f in self.flags),
        }


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionCounts:
    if len(predictions) != len(labels):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(labels)} labels")
    if not labels:
        raise EmptyInput("no predictions to score")
    tp = fn = fp = tn = 0
    for pred, true in zip(predictions, labels):
        if pred not in (0, 1) or true not in (0, 1):
            raise ValueError(f"predictions and labels must be 0/1, got {pred!r}/{true!r}")
        if true:
            if pred:
                tp += 1
            else:
                fn += 1
        elif pred:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fn, fp, tn)


def metrics(c: ConfusionCounts) -> MetricsReport:
    """Zero denominators report 0 and raise the matching flag."""
    if c.total == 0:
        raise EmptyInput("confusion counts are all zero")
    flags = set()
    accuracy = (c.tp + c.tn) / c.total
    if c.tp + c.fn:
        recall = c.tp / (c.tp + c.fn)
    else:
        recall = 0.0
        flags.add(Flag.RECALL_UNDEFINED)
    if c.tp + c.fp:
        precision = c.tp / (c.tp + c.fp)
    else:
        precision = 0.0
        flags.add(Flag.PRECISION_UNDEFINED)
    if flags or precision + recall == 0:
        f1 = 0.0
        flags.add(Flag.F1_UNDEFINED)
    else:
        f1 = 2 * (precision * recall) / (precision + recall)
    return MetricsReport(c, accuracy, recall, precision, f1, frozenset(flags))
