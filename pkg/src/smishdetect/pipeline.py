"""Preprocessing: tokenize -> lowercase -> normalize -> stop words -> stem.

The stage order is fixed. Normalization runs before stop-word removal, so
an expansion that yields a stop word ("ur" -> "your") is removed again.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

from .corpus import is_url_token
from .lingo import LingoDictionary, bundled_dictionary, empty_dictionary
from .stemmer import stem

# alphanumeric runs, optionally joined by inner apostrophes ("don't")
_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "`": "'"})
_URL_LEAD = "([{<\"'"
_URL_TRAIL = ".,!?;:)]}>\"'"


@dataclass(frozen=True)
class StopWords:
    words: frozenset
    version: str = ""
    digest: str = field(init=False, compare=False)

    def __post_init__(self):
        words = frozenset(self.words)
        bad = [w for w in words if not w or w != w.casefold()]
        if bad:
            raise ValueError(f"stop words must be lowercase and non-empty: {sorted(bad)[:5]}")
        object.__setattr__(self, "words", words)
        h = hashlib.sha256("\n".join(sorted(words)).encode("utf-8")).hexdigest()
        object.__setattr__(self, "digest", h)
        if not self.version:
            object.__setattr__(self, "version", "sha256:" + h[:16])

    def __contains__(self, token):
        return token in self.words

    def __len__(self):
        return len(self.words)


def parse_stopwords(text):
    words, version = set(), ""
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("version:") and not version:
                version = body[len("version:"):].strip()
            continue
        words.add(line.casefold())
    return StopWords(frozenset(words), version)


def load_stopwords(path):
    return parse_stopwords(Path(path).read_text(encoding="utf-8"))


def bundled_stopwords():
    text = resources.files("smishdetect.data").joinpath("stopwords_en.txt").read_text(
        encoding="utf-8"
    )
    return parse_stopwords(text)


@dataclass(frozen=True)
class PipelineConfig:
    dictionary: LingoDictionary = field(default_factory=bundled_dictionary)
    stopwords: StopWords = field(default_factory=bundled_stopwords)
    enable_normalization: bool = True
    enable_stopword_removal: bool = True
    enable_stemming: bool = True

    @cached_property
    def fingerprint(self):
        """Hash of everything that changes preprocess() output."""
        payload = {
            "normalize": self.enable_normalization,
            "stopwords": self.enable_stopword_removal,
            "stem": self.enable_stemming,
            "dictionary": self.dictionary.digest if self.enable_normalization else None,
            "stoplist": self.stopwords.digest if self.enable_stopword_removal else None,
            "tokenizer": 2,
            "stemmer": "porter-1980",
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


def raw_config():
    """Config with every optional stage disabled (tokenize + lowercase only)."""
    return PipelineConfig(
        dictionary=empty_dictionary(),
        enable_normalization=False,
        enable_stopword_removal=False,
        enable_stemming=False,
    )


@dataclass(frozen=True)
class NormalizedMessage:
    tokens: tuple[str, ...]
    fingerprint: str = ""

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


def _strip_url(chunk):
    return chunk.lstrip(_URL_LEAD).rstrip(_URL_TRAIL)


def tokenize(text):
    """Split raw text into word tokens; URL-like chunks stay whole.

    >>> tokenize("WINNER!! Claim ur prize")
    ['WINNER', 'Claim', 'ur', 'prize']
    """
    tokens = []
    for chunk in text.translate(_APOSTROPHES).split():
        candidate = _strip_url(chunk)
        if candidate and is_url_token(candidate):
            tokens.append(candidate)
        else:
            tokens.extend(_WORD_RE.findall(chunk))
    return tokens


@lru_cache(maxsize=4096)
def _fold_char(ch):
    out = ch.casefold().lower()
    if not any(c.isupper() for c in out):
        return out
    # styled letters (mathematical bold etc.) have no lowercase mapping
    out = unicodedata.normalize("NFKC", ch).casefold().lower()
    if any(c.isupper() or c.isspace() for c in out):
        return ""
    return out


def _fold(token):
    if token.isascii():
        return token.lower()
    return "".join(map(_fold_char, token))


def lowercase(tokens):
    """Case-fold tokens; the result never holds an uppercase code point."""
    out = []
    for t in tokens:
        t = _fold(t)
        if t:
            out.append(t)
    return out


def normalize(tokens, dictionary):
    out = []
    for tok in tokens:
        expansion = dictionary.lookup(tok)
        if expansion is None:
            out.append(tok)
        else:
            out.extend(expansion)
    return out


def remove_stopwords(tokens, stopwords):
    return [t for t in tokens if t not in stopwords]


def stem_tokens(tokens):
    # URLs are kept verbatim so the link itself stays a feature
    return [t if is_url_token(t) else stem(t) for t in tokens]


def preprocess(text, config):
    tokens = lowercase(tokenize(text))
    if config.enable_normalization:
        tokens = normalize(tokens, config.dictionary)
    if config.enable_stopword_removal:
        tokens = remove_stopwords(tokens, config.stopwords)
    if config.enable_stemming:
        tokens = stem_tokens(tokens)
    return NormalizedMessage(tuple(tokens), config.fingerprint)


def preprocess_many(texts, config):
    return [preprocess(text, config) for text in texts]
