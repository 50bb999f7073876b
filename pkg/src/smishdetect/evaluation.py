"""Confusion matrices, rate metrics and the normalization ablation.

Smish is the positive class throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bayes import SmoothingConfig, classify_many, train
from .corpus import Label, split_corpus
from .errors import FingerprintMismatchError, SmishError
from .pipeline import PipelineConfig


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_labels(cls, truth, predicted):
        tp = fp = tn = fn = 0
        for t, p in zip(truth, predicted, strict=True):
            if t is Label.SMISH:
                if p is Label.SMISH:
                    tp += 1
                else:
                    fn += 1
            elif p is Label.SMISH:
                fp += 1
            else:
                tn += 1
        return cls(tp, fp, tn, fn)


@dataclass(frozen=True)
class MetricsReport:
    tpr: float
    fpr: float
    tnr: float
    fnr: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    # names of metrics whose denominator was zero (reported as 0.0)
    undefined: frozenset = field(default_factory=frozenset)

    def as_dict(self):
        return {
            "accuracy": self.accuracy,
            "tpr": self.tpr,
            "tnr": self.tnr,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def _ratio(num, den, name, undefined):
    if den == 0:
        undefined.add(name)
        return 0.0
    return num / den


def metrics(cm):
    undefined = set()
    tpr = _ratio(cm.tp, cm.tp + cm.fn, "tpr", undefined)
    fnr = _ratio(cm.fn, cm.fn + cm.tp, "fnr", undefined)
    tnr = _ratio(cm.tn, cm.tn + cm.fp, "tnr", undefined)
    fpr = _ratio(cm.fp, cm.tn + cm.fp, "fpr", undefined)
    accuracy = _ratio(cm.tp + cm.tn, cm.total, "accuracy", undefined)
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", undefined)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", undefined)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", undefined)
    return MetricsReport(tpr, fpr, tnr, fnr, accuracy, precision, recall, f1, frozenset(undefined))


def predict(model, corpus, config):
    if config.fingerprint != model.pipeline_fingerprint:
        raise FingerprintMismatchError("pipeline config does not match the model")
    return [r.decision for r in classify_many(model, corpus.texts, config)]


def evaluate(model, test, config):
    if not len(test):
        raise SmishError("test corpus is empty")
    return ConfusionMatrix.from_labels(test.labels, predict(model, test, config))


@dataclass(frozen=True)
class ArmResult:
    matrix: ConfusionMatrix
    report: MetricsReport
    fingerprint: str


@dataclass(frozen=True)
class AblationReport:
    with_normalization: ArmResult
    without_normalization: ArmResult
    split: dict
    test_indices: tuple

    def as_dict(self):
        out = {f"split.{k}": v for k, v in self.split.items()}
        for arm, res in (("without", self.without_normalization), ("with", self.with_normalization)):
            for k, v in res.report.as_dict().items():
                out[f"{arm}.{k}"] = v
            for k in ("tp", "fp", "tn", "fn"):
                out[f"{arm}.{k}"] = getattr(res.matrix, k)
        return out


def run_ablation(corpus, ratio=0.9, seed=42, dictionary=None, stopwords=None,
                 smoothing=None, train_counts=None):
    """Train and evaluate with and without normalization on one split."""
    split = split_corpus(corpus, ratio, seed, stratified=True, train_counts=train_counts)
    base = PipelineConfig()
    if dictionary is not None:
        base = base.replace(dictionary=dictionary)
    if stopwords is not None:
        base = base.replace(stopwords=stopwords)
    smoothing = smoothing or SmoothingConfig()

    arms = {}
    for name, enabled in (("with", True), ("without", False)):
        config = base.replace(enable_normalization=enabled)
        model = train(split.train, config, smoothing)
        cm = evaluate(model, split.test, config)
        arms[name] = ArmResult(cm, metrics(cm), config.fingerprint)

    return AblationReport(
        with_normalization=arms["with"],
        without_normalization=arms["without"],
        split=split.describe(),
        test_indices=split.test_indices,
    )


# Reported comparison rows, quoted for context only; no method to recompute.
QUOTED_BASELINES = (
    ("Baseline 1 (quoted)", {"accuracy": 0.856, "tpr": 0.913, "tnr": 0.842}),
    ("Baseline 2 (quoted)", {"accuracy": 0.874, "tpr": 0.930, "tnr": 0.856}),
)

_ROWS = (
    ("Accuracy", "accuracy"),
    ("True Positive Rate (TPR)", "tpr"),
    ("True Negative Rate (TNR)", "tnr"),
    ("False Positive Rate (FPR)", "fpr"),
    ("False Negative Rate (FNR)", "fnr"),
    ("Precision", "precision"),
    ("Recall", "recall"),
    ("F1-score", "f1"),
)


def _pct(v):
    return f"{100 * v:.2f}%"


def format_metrics(cm, report, fmt="text"):
    if fmt == "kv":
        lines = [f"{k}={getattr(cm, k)}" for k in ("tp", "fp", "tn", "fn")]
        lines += [f"{k}={v!r}" for k, v in report.as_dict().items()]
        if report.undefined:
            lines.append(f"undefined={','.join(sorted(report.undefined))}")
        return "\n".join(lines) + "\n"
    width = max(len(r[0]) for r in _ROWS) + 2
    lines = [f"TP={cm.tp} FP={cm.fp} TN={cm.tn} FN={cm.fn} (n={cm.total})"]
    for title, key in _ROWS:
        flag = "  (undefined)" if key in report.undefined else ""
        lines.append(f"{title:<{width}}{_pct(getattr(report, key)):>10}{flag}")
    return "\n".join(lines) + "\n"


def format_ablation(ablation, fmt="text"):
    if fmt == "kv":
        return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n"
                       for k, v in ablation.as_dict().items())
    s = ablation.split
    width = max(len(r[0]) for r in _ROWS) + 2
    lines = [
        f"split: seed={s['seed']} ratio={s['ratio']} "
        f"train={s['train_ham']} ham/{s['train_smish']} smish "
        f"test={s['test_ham']} ham/{s['test_smish']} smish",
        f"{'Metric':<{width}}{'Without Normalization':>24}{'With Normalization':>22}",
    ]
    wo, w = ablation.without_normalization.report, ablation.with_normalization.report
    for title, key in _ROWS:
        lines.append(f"{title:<{width}}{_pct(getattr(wo, key)):>24}{_pct(getattr(w, key)):>22}")
    for arm, res in (("without", ablation.without_normalization), ("with", ablation.with_normalization)):
        m = res.matrix
        lines.append(f"{arm} normalization: TP={m.tp} FP={m.fp} TN={m.tn} FN={m.fn}")
    lines.append("")
    lines.append("Quoted reference rows (not recomputed):")
    for name, vals in QUOTED_BASELINES:
        lines.append(
            f"  {name:<22} accuracy={_pct(vals['accuracy'])} "
            f"TPR={_pct(vals['tpr'])} TNR={_pct(vals['tnr'])}"
        )
    return "\n".join(lines) + "\n"
