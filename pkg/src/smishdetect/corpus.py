"""Labeled SMS corpora: loading, deterministic splits, descriptive stats."""

from __future__ import annotations

import csv
import enum
import io
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError


class Label(enum.Enum):
    HAM = "ham"
    SMISH = "smish"


DEFAULT_ALIASES = {"ham": Label.HAM, "smish": Label.SMISH, "spam": Label.SMISH}


@dataclass(frozen=True)
class LabeledMessage:
    text: str
    label: Label

    def __post_init__(self):
        if not self.text.strip():
            raise CorpusError("message text is empty")


@dataclass(frozen=True)
class Corpus:
    messages: tuple[LabeledMessage, ...]

    def __init__(self, messages=()):
        object.__setattr__(self, "messages", tuple(messages))

    @property
    def ham_count(self):
        return sum(m.label is Label.HAM for m in self.messages)

    @property
    def smish_count(self):
        return len(self.messages) - self.ham_count

    def __len__(self):
        return len(self.messages)

    def __iter__(self):
        return iter(self.messages)

    @property
    def texts(self):
        return [m.text for m in self.messages]

    @property
    def labels(self):
        return [m.label for m in self.messages]

    def subset(self, indices):
        return Corpus(self.messages[i] for i in indices)

    def __add__(self, other):
        return Corpus(self.messages + other.messages)


@dataclass(frozen=True)
class DatasetSplit:
    train: Corpus
    test: Corpus
    ratio: float
    seed: int
    stratified: bool
    # positions into the source corpus; identity lists for reproducibility checks
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]

    def describe(self):
        return {
            "seed": self.seed,
            "ratio": self.ratio,
            "stratified": self.stratified,
            "train_ham": self.train.ham_count,
            "train_smish": self.train.smish_count,
            "test_ham": self.test.ham_count,
            "test_smish": self.test.smish_count,
        }


@dataclass(frozen=True)
class ClassStats:
    message_count: int
    avg_chars: float
    avg_words: float
    url_presence_rate: float
    currency_symbol_rate: float


def _resolve_label(token, aliases, where):
    label = aliases.get(token.strip().lower())
    if label is None:
        raise CorpusError(f"{where}: unknown label {token.strip()!r}")
    return label


def parse_corpus(text, fmt="tsv", aliases=None, source="<string>"):
    aliases = {k.lower(): v for k, v in (aliases or DEFAULT_ALIASES).items()}
    fmt = fmt.lower()
    messages = []
    if fmt == "tsv":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            if "\t" not in line:
                raise CorpusError(f"{source}:{lineno}: malformed record (no tab)")
            label_tok, body = line.split("\t", 1)
            messages.append(_make(body, _resolve_label(label_tok, aliases, f"{source}:{lineno}"),
                                  f"{source}:{lineno}"))
    elif fmt == "csv":
        reader = csv.reader(io.StringIO(text, newline=""))
        for row in reader:
            lineno = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            # tolerate trailing empty columns (common in spreadsheet exports)
            while len(row) > 2 and not row[-1].strip():
                row.pop()
            if len(row) != 2:
                raise CorpusError(f"{source}:{lineno}: malformed record (expected 2 fields)")
            messages.append(_make(row[1], _resolve_label(row[0], aliases, f"{source}:{lineno}"),
                                  f"{source}:{lineno}"))
    else:
        raise CorpusError(f"unknown corpus format {fmt!r}")
    if not messages:
        raise CorpusError(f"{source}: empty corpus")
    return Corpus(messages)


def _make(body, label, where):
    if not body.strip():
        raise CorpusError(f"{where}: malformed record (empty text)")
    return LabeledMessage(body, label)


def load_corpus(path, fmt=None, aliases=None):
    """Load a ``label<TAB>text`` (TSV) or two-column CSV corpus.

    ``fmt`` defaults from the file extension (``.csv`` -> CSV, else TSV).
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "tsv"
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    return parse_corpus(text, fmt, aliases, source=str(path))


def _train_size(ratio, n):
    # guard against 0.7 * 10 == 7.000000000000001 rounding up to 8
    return min(n, math.ceil(ratio * n - 1e-9))


def split_corpus(corpus, ratio=0.9, seed=42, stratified=True, train_counts=None):
    """Deterministic train/test split.

    Each class (or the whole corpus, if not stratified) is shuffled with a
    seeded Fisher-Yates shuffle and the first ``ceil(ratio * n)`` messages
    go to training. ``train_counts`` maps Label -> exact training size and
    overrides the ratio rule, e.g. to reproduce a published split.
    Messages keep their source order inside each arm.
    """
    if not 0.0 < ratio < 1.0:
        raise CorpusError(f"ratio must be in (0, 1), got {ratio}")
    rng = random.Random(seed)
    train_idx = []
    if stratified:
        for label in Label:
            members = [i for i, m in enumerate(corpus.messages) if m.label is label]
            if not members:
                raise CorpusError(f"class {label.value} is empty; cannot stratify")
            rng.shuffle(members)
            if train_counts and label in train_counts:
                k = train_counts[label]
                if not 0 <= k <= len(members):
                    raise CorpusError(f"train count {k} out of range for {label.value}")
            else:
                k = _train_size(ratio, len(members))
            train_idx += members[:k]
    else:
        if train_counts:
            raise CorpusError("train_counts requires a stratified split")
        members = list(range(len(corpus)))
        rng.shuffle(members)
        train_idx = members[:_train_size(ratio, len(members))]
    train_idx = sorted(train_idx)
    chosen = set(train_idx)
    test_idx = [i for i in range(len(corpus)) if i not in chosen]
    return DatasetSplit(
        train=corpus.subset(train_idx),
        test=corpus.subset(test_idx),
        ratio=ratio,
        seed=seed,
        stratified=stratified,
        train_indices=tuple(train_idx),
        test_indices=tuple(test_idx),
    )


_URL_PREFIXES = ("http://", "https://", "www.")


def is_url_token(token):
    t = token.lower()
    return t.startswith(_URL_PREFIXES) or "://" in t


def has_url(text):
    return any(is_url_token(tok) for tok in text.split())


def has_currency_symbol(text):
    return "$" in text or "€" in text


def compute_stats(corpus):
    """Per-class Table-III style statistics keyed by Label."""
    if not len(corpus):
        raise CorpusError("empty corpus")
    out = {}
    for label in Label:
        texts = [m.text for m in corpus.messages if m.label is label]
        n = len(texts)
        if n == 0:
            out[label] = ClassStats(0, 0.0, 0.0, 0.0, 0.0)
            continue
        out[label] = ClassStats(
            message_count=n,
            avg_chars=sum(len(t) for t in texts) / n,
            avg_words=sum(len(t.split()) for t in texts) / n,
            url_presence_rate=sum(has_url(t) for t in texts) / n,
            currency_symbol_rate=sum(has_currency_symbol(t) for t in texts) / n,
        )
    return out


STATS_ROWS = (
    ("Total Messages", "total_messages", "message_count"),
    ("Average No. of Characters", "avg_chars", "avg_chars"),
    ("Average Presence of URLs", "avg_url_presence", "url_presence_rate"),
    ("Average No. of Words", "avg_words", "avg_words"),
    ("Average Presence of Symbols ($ and €)", "avg_symbol_presence", "currency_symbol_rate"),
)


def format_stats(stats, fmt="text"):
    ham, smish = stats[Label.HAM], stats[Label.SMISH]
    if fmt == "kv":
        lines = []
        for _, key, attr in STATS_ROWS:
            for prefix, s in (("ham", ham), ("smish", smish)):
                lines.append(f"{prefix}.{key}={getattr(s, attr)!r}")
        return "\n".join(lines) + "\n"

    def cell(attr, s):
        v = getattr(s, attr)
        if attr == "message_count":
            return f"{v:,}"
        if attr in ("avg_chars", "avg_words"):
            return f"{v:.2f}"
        return f"{v:.4f}"

    width = max(len(r[0]) for r in STATS_ROWS) + 2
    lines = [f"{'':<{width}}{'Ham Messages':>14}{'Smishing Messages':>20}"]
    for title, _, attr in STATS_ROWS:
        lines.append(f"{title:<{width}}{cell(attr, ham):>14}{cell(attr, smish):>20}")
    return "\n".join(lines) + "\n"
