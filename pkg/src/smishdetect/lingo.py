"""Slang / abbreviation dictionary used by the normalization stage.

File format (UTF-8)::

    # version: my-dict-3        <- optional, sets ``source_version``
    # any other '#' line is a comment
    ur<TAB>your
    brb<TAB>be right back

Keys are single tokens. Expansions are split on whitespace and
case-folded at load time, so lookups return ready-to-use token lists.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import DuplicateKeyError, LingoError

_VERSION_PREFIX = "version:"


@dataclass(frozen=True)
class LingoDictionary:
    entries: Mapping[str, tuple[str, ...]]
    source_version: str = ""
    digest: str = field(init=False, compare=False)

    def __post_init__(self):
        checked = {}
        for key, expansion in self.entries.items():
            if not key or key != key.casefold() or _has_space(key):
                raise LingoError(f"invalid key {key!r}")
            expansion = tuple(expansion)
            if not expansion:
                raise LingoError(f"empty expansion for key {key!r}")
            for tok in expansion:
                if not tok or tok != tok.casefold() or _has_space(tok):
                    raise LingoError(f"invalid expansion token {tok!r} for {key!r}")
            checked[key] = expansion
        object.__setattr__(self, "entries", MappingProxyType(checked))
        object.__setattr__(self, "digest", _digest(checked))
        if not self.source_version:
            object.__setattr__(self, "source_version", "sha256:" + self.digest[:16])

    def lookup(self, token):
        """Expansion for ``token`` or None. ``token`` must already be lowercased."""
        return self.entries.get(token)

    def __contains__(self, token):
        return token in self.entries

    def __len__(self):
        return len(self.entries)

    def dumps(self):
        lines = [f"# version: {self.source_version}"]
        lines += [f"{k}\t{' '.join(v)}" for k, v in self.entries.items()]
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")


def lookup(dictionary, token):
    return dictionary.lookup(token)


def _has_space(s):
    return any(ch.isspace() for ch in s)


def _digest(entries):
    h = hashlib.sha256()
    for key in sorted(entries):
        h.update(key.encode("utf-8"))
        h.update(b"\t")
        h.update(" ".join(entries[key]).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def parse_dictionary(text, source="<string>"):
    entries = {}
    first_seen = {}
    version = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.lower().startswith(_VERSION_PREFIX) and not version:
                version = body[len(_VERSION_PREFIX):].strip()
            continue
        if "\t" not in line:
            raise LingoError(f"{source}:{lineno}: expected 'slang<TAB>expansion'")
        key, expansion = line.split("\t", 1)
        key = key.strip().casefold()
        if not key or _has_space(key):
            raise LingoError(f"{source}:{lineno}: malformed key {key!r}")
        tokens = expansion.casefold().split()
        if not tokens:
            raise LingoError(f"{source}:{lineno}: empty expansion for {key!r}")
        if key in entries:
            raise DuplicateKeyError(key, first_seen[key], lineno)
        entries[key] = tuple(tokens)
        first_seen[key] = lineno
    return LingoDictionary(entries, version)


def load_dictionary(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise LingoError(f"cannot read dictionary {path}: {exc}") from exc
    return parse_dictionary(text, source=str(path))


def bundled_dictionary():
    """The small sample dictionary shipped with the package."""
    text = resources.files("smishdetect.data").joinpath("lingo_sample.tsv").read_text(
        encoding="utf-8"
    )
    return parse_dictionary(text, source="lingo_sample.tsv")


def empty_dictionary():
    return LingoDictionary({}, "empty")
