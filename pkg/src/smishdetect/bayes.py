"""Document-frequency Naive Bayes: training, scoring and model files.

A term's class likelihood is the fraction of that class's training
messages containing it. A message is scored by summing the log
likelihoods of its distinct terms in each class and the larger sum wins;
a tie goes to ham. Sums that differ only by rounding are re-ordered with
exact rational arithmetic, so ties are real ties.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _kernels
from .corpus import Label
from .errors import (
    FingerprintMismatchError,
    ModelChecksumError,
    ModelFormatError,
    ModelTruncatedError,
    ModelVersionError,
    SmishError,
)
from .pipeline import preprocess_many


class SmoothingMode(enum.Enum):
    FLOOR = "floor"
    LAPLACE = "laplace"
    NONE = "none"


class UnknownTokenPolicy(enum.Enum):
    IGNORE = "ignore"
    TREAT_AS_UNSEEN = "unseen"


@dataclass(frozen=True)
class SmoothingConfig:
    mode: SmoothingMode = SmoothingMode.FLOOR
    epsilon: float = 1e-6
    alpha: float = 1.0
    use_priors: bool = False
    unknown: UnknownTokenPolicy = UnknownTokenPolicy.IGNORE

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class ClassConditionalTable:
    """Per-term document counts for one class; zero counts are not stored."""

    counts: Mapping[str, int]
    total_docs: int

    def __post_init__(self):
        if self.total_docs <= 0:
            raise ValueError("total_docs must be positive")
        counts = {}
        for term, c in self.counts.items():
            if not 0 < c <= self.total_docs:
                raise ValueError(f"count {c} for {term!r} outside (0, {self.total_docs}]")
            counts[term] = int(c)
        object.__setattr__(self, "counts", MappingProxyType(counts))

    def doc_count(self, term):
        return self.counts.get(term, 0)

    def probability(self, term):
        """Unsmoothed document frequency ratio."""
        return self.doc_count(term) / self.total_docs

    @property
    def probabilities(self):
        return {t: c / self.total_docs for t, c in self.counts.items()}


def term_probability(table, term, smoothing):
    count = table.doc_count(term)
    if smoothing.mode is SmoothingMode.LAPLACE:
        return (count + smoothing.alpha) / (table.total_docs + 2 * smoothing.alpha)
    if count:
        return count / table.total_docs
    if smoothing.mode is SmoothingMode.FLOOR:
        return smoothing.epsilon
    return 0.0


def _log(p):
    return math.log(p) if p > 0 else -math.inf


@dataclass(frozen=True)
class TrainedModel:
    ham_table: ClassConditionalTable
    smish_table: ClassConditionalTable
    smoothing: SmoothingConfig
    pipeline_fingerprint: str
    # stage flags and resource versions, so a loaded model can rebuild its config
    pipeline: Mapping[str, str] = field(default_factory=dict)

    @property
    def prior_ham(self):
        return self.ham_table.total_docs / (self.ham_table.total_docs + self.smish_table.total_docs)

    @property
    def prior_smish(self):
        return self.smish_table.total_docs / (self.ham_table.total_docs + self.smish_table.total_docs)

    @cached_property
    def vocabulary(self):
        return sorted(set(self.ham_table.counts) | set(self.smish_table.counts))

    @cached_property
    def _index(self):
        return {t: i for i, t in enumerate(self.vocabulary)}

    @cached_property
    def _log_tables(self):
        # the extra final slot is the zero-count entry used for unknown terms
        terms = self.vocabulary
        log_ham = np.empty(len(terms) + 1)
        log_smish = np.empty(len(terms) + 1)
        for i, t in enumerate(terms):
            log_ham[i] = _log(term_probability(self.ham_table, t, self.smoothing))
            log_smish[i] = _log(term_probability(self.smish_table, t, self.smoothing))
        log_ham[-1] = _log(term_probability(self.ham_table, None, self.smoothing))
        log_smish[-1] = _log(term_probability(self.smish_table, None, self.smoothing))
        return log_ham, log_smish

    def term_ids(self, tokens):
        """Distinct term ids in first-seen order, per the unknown-token policy."""
        unseen = len(self.vocabulary)
        keep_unknown = self.smoothing.unknown is UnknownTokenPolicy.TREAT_AS_UNSEEN
        ids = []
        for tok in dict.fromkeys(tokens):
            i = self._index.get(tok)
            if i is not None:
                ids.append(i)
            elif keep_unknown:
                ids.append(unseen)
        return ids


@dataclass(frozen=True)
class ClassificationResult:
    decision: Label
    log_score_ham: float
    log_score_smish: float
    tokens_used: int


def decide(log_ham, log_smish):
    return Label.SMISH if log_smish > log_ham else Label.HAM


def _encode(texts_tokens, index):
    rows = []
    for tokens in texts_tokens:
        rows.append([index[t] for t in dict.fromkeys(tokens)])
    return _kernels.to_csr(rows)


def fit_tables(token_lists, labels):
    """Document-frequency tables from already-preprocessed messages.

    ``labels`` are Label values aligned with ``token_lists``.
    """
    n_ham = sum(lab is Label.HAM for lab in labels)
    n_smish = len(labels) - n_ham
    if n_ham == 0 or n_smish == 0:
        raise SmishError("training corpus needs at least one message of each class")
    vocab = sorted({t for toks in token_lists for t in toks})
    if not vocab:
        raise SmishError("every training message normalized to zero tokens")
    index = {t: i for i, t in enumerate(vocab)}
    indptr, indices = _encode(token_lists, index)
    y = np.fromiter((lab is Label.SMISH for lab in labels), dtype=np.int64, count=len(labels))
    counts = _kernels.doc_frequencies(indptr, indices, y, len(vocab))
    ham = {vocab[i]: int(c) for i, c in enumerate(counts[0]) if c}
    smish = {vocab[i]: int(c) for i, c in enumerate(counts[1]) if c}
    return ClassConditionalTable(ham, n_ham), ClassConditionalTable(smish, n_smish)


def _pipeline_settings(config):
    return {
        "normalize": str(int(config.enable_normalization)),
        "stopwords": str(int(config.enable_stopword_removal)),
        "stem": str(int(config.enable_stemming)),
        "dictionary_version": config.dictionary.source_version,
        "stoplist_version": config.stopwords.version,
    }


def train(corpus, config, smoothing=None):
    """Preprocess ``corpus`` with ``config`` and fit a TrainedModel."""
    smoothing = smoothing or SmoothingConfig()
    msgs = preprocess_many(corpus.texts, config)
    ham, smish = fit_tables([m.tokens for m in msgs], corpus.labels)
    return TrainedModel(ham, smish, smoothing, config.fingerprint, _pipeline_settings(config))


def _check_fingerprint(model, fingerprint):
    if fingerprint != model.pipeline_fingerprint:
        raise FingerprintMismatchError(
            "message was preprocessed with a different pipeline than the model "
            f"({fingerprint[:12]} != {model.pipeline_fingerprint[:12]})"
        )


# scores this close are compared again in exact arithmetic
NEAR_TIE_RTOL = 1e-9


def _exact_probability(table, term, smoothing):
    count = table.doc_count(term)
    if smoothing.mode is SmoothingMode.LAPLACE:
        alpha = Fraction(smoothing.alpha)
        return (count + alpha) / (table.total_docs + 2 * alpha)
    if count:
        return Fraction(count, table.total_docs)
    if smoothing.mode is SmoothingMode.FLOOR:
        return Fraction(smoothing.epsilon)
    return Fraction(0)


def _exact_order(model, ids):
    """sign(P(smish) - P(ham)) for one message, computed with rationals."""
    unseen = len(model.vocabulary)
    ph = pss = Fraction(1)
    if model.smoothing.use_priors:
        total = model.ham_table.total_docs + model.smish_table.total_docs
        ph = Fraction(model.ham_table.total_docs, total)
        pss = Fraction(model.smish_table.total_docs, total)
    for i in ids:
        term = None if i == unseen else model.vocabulary[i]
        ph *= _exact_probability(model.ham_table, term, model.smoothing)
        pss *= _exact_probability(model.smish_table, term, model.smoothing)
    return (pss > ph) - (pss < ph)


def _settle_near_ties(model, scores, rows):
    """Make the float scores agree with the exact ordering on near-ties.

    Rounding in the log sums cannot separate products that are equal (or
    nearly so); for those rows the order is recomputed exactly and the
    reported pair is moved, by at most the tie tolerance, to match it.
    """
    h, s = scores[:, 0], scores[:, 1]
    with np.errstate(invalid="ignore"):
        scale = np.maximum(1.0, np.maximum(np.abs(h), np.abs(s)))
        near = np.isfinite(h) & np.isfinite(s) & (np.abs(s - h) <= NEAR_TIE_RTOL * scale)
    for r in np.flatnonzero(near):
        order = _exact_order(model, rows[r])
        mid = 0.5 * (h[r] + s[r])
        if order == 0:
            h[r] = s[r] = mid
        elif order > 0 and not s[r] > h[r]:
            h[r], s[r] = mid, np.nextafter(mid, np.inf)
        elif order < 0 and not h[r] > s[r]:
            h[r], s[r] = np.nextafter(mid, np.inf), mid
    return scores


def score_many(model, messages):
    """Log scores (ham, smish) per message, shape (n, 2), and terms used."""
    rows = []
    for msg in messages:
        _check_fingerprint(model, msg.fingerprint)
        rows.append(model.term_ids(msg.tokens))
    indptr, indices = _kernels.to_csr(rows)
    log_ham, log_smish = model._log_tables
    scores = _kernels.score_rows(indptr, indices, log_ham, log_smish)
    if model.smoothing.use_priors:
        scores = scores + np.array([math.log(model.prior_ham), math.log(model.prior_smish)])
    scores = _settle_near_ties(model, scores, rows)
    return scores, np.diff(indptr)


def score(model, msg):
    scores, _ = score_many(model, [msg])
    return float(scores[0, 0]), float(scores[0, 1])


def classify_many(model, texts, config):
    msgs = preprocess_many(texts, config)
    scores, used = score_many(model, msgs)
    return [
        ClassificationResult(decide(h, s), float(h), float(s), int(u))
        for (h, s), u in zip(scores, used)
    ]


def classify(model, raw_text, config):
    return classify_many(model, [raw_text], config)[0]


def classify_message(model, msg):
    scores, used = score_many(model, [msg])
    h, s = float(scores[0, 0]), float(scores[0, 1])
    return ClassificationResult(decide(h, s), h, s, int(used[0]))


# -- model files -----------------------------------------------------------

MAGIC = "smishdetect-model"
FORMAT_VERSION = 1


def dumps_model(model):
    sm = model.smoothing
    header = [
        f"fingerprint={model.pipeline_fingerprint}",
        f"smoothing.mode={sm.mode.value}",
        f"smoothing.epsilon={sm.epsilon!r}",
        f"smoothing.alpha={sm.alpha!r}",
        f"smoothing.use_priors={int(sm.use_priors)}",
        f"smoothing.unknown={sm.unknown.value}",
    ]
    header += [f"pipeline.{k}={v}" for k, v in sorted(model.pipeline.items())]
    header += [
        f"ham_docs={model.ham_table.total_docs}",
        f"smish_docs={model.smish_table.total_docs}",
        f"terms={len(model.vocabulary)}",
    ]
    records = [
        f"{t}\t{model.ham_table.doc_count(t)}\t{model.smish_table.doc_count(t)}"
        for t in model.vocabulary
    ]
    payload = ("\n".join(header) + "\n--\n" + "".join(r + "\n" for r in records)).encode("utf-8")
    digest = hashlib.sha256(payload).hexdigest()
    head = f"{MAGIC} v{FORMAT_VERSION}\nsha256={digest} length={len(payload)}\n".encode("ascii")
    return head + payload


def save_model(model, path):
    Path(path).write_bytes(dumps_model(model))


def loads_model(data):
    first, sep, rest = data.partition(b"\n")
    if not sep:
        raise ModelTruncatedError("model file truncated (no header)")
    try:
        magic, version = first.decode("ascii").rsplit(" ", 1)
    except (UnicodeDecodeError, ValueError) as exc:
        raise ModelFormatError("not a smishdetect model file") from exc
    if magic != MAGIC:
        raise ModelFormatError("not a smishdetect model file")
    if version != f"v{FORMAT_VERSION}":
        raise ModelVersionError(f"unsupported model version {version!r}, expected v{FORMAT_VERSION}")

    second, sep, payload = rest.partition(b"\n")
    if not sep:
        raise ModelTruncatedError("model file truncated (no checksum line)")
    try:
        fields = dict(kv.split("=", 1) for kv in second.decode("ascii").split())
        digest, length = fields["sha256"], int(fields["length"])
    except (UnicodeDecodeError, ValueError, KeyError) as exc:
        raise ModelFormatError("malformed checksum line") from exc
    if len(payload) < length:
        raise ModelTruncatedError(f"model file truncated ({len(payload)} of {length} bytes)")
    if len(payload) > length or hashlib.sha256(payload).hexdigest() != digest:
        raise ModelChecksumError("model checksum mismatch")

    try:
        return _parse_payload(payload.decode("utf-8"))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"malformed model payload: {exc}") from exc


def _parse_payload(text):
    head, _, body = text.partition("\n--\n")
    meta = dict(line.split("=", 1) for line in head.splitlines())
    smoothing = SmoothingConfig(
        mode=SmoothingMode(meta["smoothing.mode"]),
        epsilon=float(meta["smoothing.epsilon"]),
        alpha=float(meta["smoothing.alpha"]),
        use_priors=bool(int(meta["smoothing.use_priors"])),
        unknown=UnknownTokenPolicy(meta["smoothing.unknown"]),
    )
    pipeline = {k[len("pipeline."):]: v for k, v in meta.items() if k.startswith("pipeline.")}
    ham, smish = {}, {}
    for line in body.splitlines():
        term, h, s = line.split("\t")
        if int(h):
            ham[term] = int(h)
        if int(s):
            smish[term] = int(s)
    if len(set(ham) | set(smish)) != int(meta["terms"]):
        raise ValueError("term count does not match header")
    return TrainedModel(
        ClassConditionalTable(ham, int(meta["ham_docs"])),
        ClassConditionalTable(smish, int(meta["smish_docs"])),
        smoothing,
        meta["fingerprint"],
        pipeline,
    )


def load_model(path):
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise ModelFormatError(f"model not found: {path}") from exc
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    return loads_model(data)
