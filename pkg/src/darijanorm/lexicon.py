"""Canonical-form dictionary: loading, validation, and conversion of
adapted-IPA dictionary headwords to the working Latin alphabet."""
from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .ingest import TOKEN_RE

POS_TAGS = ("noun", "verb", "adjective", "other")
ORIGINS = ("converted", "sm-augmented", "neologism")

_DOT_BELOW = "̣"
_DOT_ABOVE = "̇"
_CARON = "̌"
_CIRCUMFLEX = "̂"
_BREVE_BELOW = "̮"


@dataclass(frozen=True)
class LexiconEntry:
    canonical: str
    pos: str = ""
    gloss: str = ""
    origin: str = "converted"

    def __post_init__(self) -> None:
        if not TOKEN_RE.match(self.canonical):
            raise ValueError(f"canonical form {self.canonical!r} outside alphabet a-z/3/7")
        if self.pos and self.pos not in POS_TAGS:
            raise ValueError(f"unknown pos tag {self.pos!r}")
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown origin {self.origin!r}")


class Lexicon:
    """Ordered set of canonical forms. Entries are kept sorted so that
    saved files are reproducible byte for byte."""

    def __init__(self, entries: list[LexiconEntry]):
        seen: dict[str, LexiconEntry] = {}
        for entry in entries:
            if entry.canonical in seen:
                raise ValueError(f"duplicate canonical form {entry.canonical!r}")
            seen[entry.canonical] = entry
        self.entries = sorted(seen.values(), key=lambda e: e.canonical)
        self._canonical_set = set(seen)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self._canonical_set

    def __iter__(self):
        return iter(self.entries)

    @property
    def words(self) -> list[str]:
        return [e.canonical for e in self.entries]

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for entry in self.entries:
            digest.update(entry.canonical.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()


def _convert_cluster(base: str, marks: frozenset[str], pos: int, symbol: str) -> str:
    if base == "h":
        if _DOT_BELOW in marks:
            return "7"
        if _BREVE_BELOW in marks:
            return "kh"
        if not marks:
            return "h"
    elif base == "s":
        if _CARON in marks:
            return "ch"
        if marks <= {_DOT_BELOW}:
            return "s"
    elif base == "z":
        if _CARON in marks:
            return "j"
        if marks <= {_DOT_BELOW}:
            return "z"
    elif base in ("d", "t", "r", "l"):
        # emphatic (dotted) and plain variants merge in Latin script
        if marks <= {_DOT_BELOW}:
            return base
    elif base == "ε":
        if marks <= {_DOT_BELOW}:
            return "3"
    elif base == "g":
        if marks == {_DOT_ABOVE}:
            return "gh"
        if not marks:
            return "g"
    elif base == "x":
        if not marks:
            return "kh"
    elif base == "a":
        if marks <= {_CIRCUMFLEX}:
            return "a"
    elif base == "ə":
        if not marks:
            return "e"
    elif base == "i":
        if marks <= {_CIRCUMFLEX}:
            return "i"
    elif base == "u":
        if marks == {_CIRCUMFLEX}:
            return "ou"
        if not marks:
            return "u"
    elif base.isascii() and base.isalpha() and not marks:
        return base
    raise ValueError(f"unmapped symbol {symbol!r} at position {pos}")


def convert_adapted_ipa(word: str) -> str:
    """Transliterate one adapted-IPA headword to the a-z/3/7 alphabet.

    The input is canonically decomposed first, so precomposed and
    combining-mark spellings of the same symbol convert identically.
    Any symbol outside the conversion table raises ValueError naming
    the symbol and its (1-based) position.
    """
    if not word:
        raise ValueError("word must be nonempty")
    decomposed = unicodedata.normalize("NFD", word.lower())
    clusters: list[list[str]] = []
    for ch in decomposed:
        if unicodedata.combining(ch):
            if not clusters:
                raise ValueError(f"unmapped symbol {ch!r} at position 1")
            clusters[-1].append(ch)
        else:
            clusters.append([ch])
    out: list[str] = []
    for pos, cluster in enumerate(clusters, start=1):
        base, marks = cluster[0], frozenset(cluster[1:])
        symbol = unicodedata.normalize("NFC", "".join(cluster))
        out.append(_convert_cluster(base, marks, pos, symbol))
    return "".join(out)


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a TSV lexicon: canonical<TAB>pos<TAB>gloss<TAB>origin, one
    entry per line, '#' starts a comment line. Trailing fields may be
    omitted. Alphabet and uniqueness violations report line numbers."""
    path = Path(path)
    entries: list[LexiconEntry] = []
    first_line: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            canonical = fields[0].strip()
            pos = fields[1].strip() if len(fields) > 1 else ""
            gloss = fields[2].strip() if len(fields) > 2 else ""
            origin = fields[3].strip() if len(fields) > 3 else ""
            if canonical in first_line:
                raise ValueError(
                    f"{path}:{lineno}: duplicate canonical form {canonical!r} "
                    f"(first seen on line {first_line[canonical]})"
                )
            try:
                entry = LexiconEntry(canonical, pos, gloss, origin or "converted")
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            first_line[canonical] = lineno
            entries.append(entry)
    return Lexicon(entries)


def save_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    lines = [
        "\t".join((e.canonical, e.pos, e.gloss, e.origin))
        for e in lexicon.entries
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def coverage_in_model(lexicon: Lexicon, model_vocab: set[str]) -> float:
    """Fraction of canonical forms present in a model's vocabulary."""
    if len(lexicon) == 0:
        raise ValueError("coverage of an empty lexicon is undefined")
    present = sum(1 for e in lexicon.entries if e.canonical in model_vocab)
    return present / len(lexicon)


def convert_lexicon_file(src: str | Path, dst: str | Path) -> Lexicon:
    """Convert a TSV of adapted-IPA headwords (same column layout) into
    a validated Latin-script lexicon and save it."""
    src = Path(src)
    entries: list[LexiconEntry] = []
    with src.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            try:
                canonical = convert_adapted_ipa(fields[0].strip())
                entry = LexiconEntry(
                    canonical,
                    fields[1].strip() if len(fields) > 1 else "",
                    fields[2].strip() if len(fields) > 2 else "",
                    (fields[3].strip() if len(fields) > 3 else "") or "converted",
                )
            except ValueError as exc:
                raise ValueError(f"{src}:{lineno}: {exc}") from exc
            entries.append(entry)
    lexicon = Lexicon(entries)
    save_lexicon(lexicon, dst)
    return lexicon
