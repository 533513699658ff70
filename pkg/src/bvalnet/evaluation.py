"""Thresholding, confusion matrices and the P0/P1/Sn/Sp report."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .mlp import DEFAULT_MAGNITUDE_SCALE

TP, TN, FP, FN = "TP", "TN", "FP", "FN"


@dataclass(frozen=True)
class ThresholdPolicy:
    """Output ``>= tau`` (in normalized units) predicts an earthquake."""

    tau: float

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValidationError(f"tau must lie in (0, 1), got {self.tau!r}")

    @classmethod
    def for_cutoff(cls, cutoff: float, magnitude_scale: float = DEFAULT_MAGNITUDE_SCALE) -> ThresholdPolicy:
        """Positive when the denormalized predicted magnitude reaches ``cutoff``."""
        return cls(cutoff / magnitude_scale)


def classify(output: float, y: float, policy: ThresholdPolicy) -> str:
    predicted = output >= policy.tau
    actual = y > 0
    if predicted:
        return TP if actual else FP
    return FN if actual else TN


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValidationError(f"{name.upper()} must be a non-negative integer, got {value!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> ConfusionMatrix:
        counts = {TP: 0, TN: 0, FP: 0, FN: 0}
        for label in labels:
            counts[label] += 1
        return cls(counts[TP], counts[TN], counts[FP], counts[FN])

    @classmethod
    def from_outputs(cls, outputs, targets, policy: ThresholdPolicy) -> ConfusionMatrix:
        outputs = np.asarray(outputs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if outputs.shape != targets.shape:
            raise ValidationError(f"{outputs.size} outputs but {targets.size} targets")
        return cls.from_labels(classify(o, y, policy) for o, y in zip(outputs, targets))

    @classmethod
    def parse(cls, text: str) -> ConfusionMatrix:
        """Parse ``"TP,TN,FP,FN"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValidationError(f"expected TP,TN,FP,FN, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError:
            raise ValidationError(f"counts must be integers, got {text!r}") from None


@dataclass(frozen=True)
class MetricsReport:
    p0: float  # negative predictive value
    p1: float  # precision
    sn: float  # sensitivity
    sp: float  # specificity

    @property
    def average(self) -> float:
        """Mean of the four ratios, in percent."""
        return 100.0 * (self.p0 + self.p1 + self.sn + self.sp) / 4.0


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Ratios derived from a confusion matrix; an empty denominator gives 0."""
    if cm.total == 0:
        raise ValidationError("cannot compute metrics of an empty evaluation")
    return MetricsReport(
        p0=_ratio(cm.tn, cm.tn + cm.fn),
        p1=_ratio(cm.tp, cm.tp + cm.fp),
        sn=_ratio(cm.tp, cm.tp + cm.fn),
        sp=_ratio(cm.tn, cm.tn + cm.fp),
    )


def _rows(report: MetricsReport, cm: ConfusionMatrix):
    yield "TP", str(cm.tp), ""
    yield "TN", str(cm.tn), ""
    yield "FP", str(cm.fp), ""
    yield "FN", str(cm.fn), ""
    for name, value in (("P0", report.p0), ("P1", report.p1), ("Sn", report.sn), ("Sp", report.sp)):
        yield name, f"{value:.7f}", f"{100 * value:.2f}"
    yield "Average", "", f"{report.average:.2f}"


def render_report(report: MetricsReport, cm: ConfusionMatrix, title: str | None = None) -> str:
    lines = [title] if title else []
    lines.append(f"{'Parameter':<10}{'Value':<12}{'Percent':>8}")
    for name, value, percent in _rows(report, cm):
        lines.append(f"{name:<10}{value:<12}{percent:>8}".rstrip())
    return "\n".join(lines) + "\n"


def render_csv(report: MetricsReport, cm: ConfusionMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("metric", "value", "percent"))
    writer.writerows(_rows(report, cm))
    return buf.getvalue()


def threshold_grid(outputs, targets, taus: Iterable[float]) -> list[tuple[float, ConfusionMatrix, MetricsReport]]:
    """Confusion matrix and metrics at each threshold in ``taus``."""
    rows = []
    for tau in taus:
        cm = ConfusionMatrix.from_outputs(outputs, targets, ThresholdPolicy(tau))
        rows.append((tau, cm, metrics(cm)))
    return rows
