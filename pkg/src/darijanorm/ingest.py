"""Raw comment ingestion and the cleaning pipeline.

Comments go through script filtering, noise stripping, repeat-letter
collapsing and digit-to-letter substitution, ending up as lowercase
token sequences over the alphabet a-z plus 3 and 7.
"""
from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

TOKEN_RE = re.compile(r"[a-z37]+\Z")

#: Digit (and x) substitutions observed in Latin-script dialect text.
#: 3 and 7 have no Latin equivalent and are kept as letters.
DEFAULT_DIGIT_RULES: dict[str, str] = {
    "2": "a",
    "6": "t",
    "4": "gh",
    "8": "gh",
    "5": "kh",
    "x": "kh",
    "9": "q",
}

_URL_RE = re.compile(r"https?://\S+|www\.\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\S+")
_NON_ALPHANUM_RE = re.compile(r"[^a-z0-9 ]")
_WS_RE = re.compile(r"\s+")
_LATIN_LETTER_RE = re.compile(r"[a-zA-Z]")


@dataclass(frozen=True)
class RawComment:
    id: str
    text: str
    source: str = ""


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    origin_id: str = ""

    def __str__(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class CleanConfig:
    latin_threshold: float = 0.5
    max_run: int = 3
    min_tokens: int = 2
    digit_rules: tuple[tuple[str, str], ...] = tuple(sorted(DEFAULT_DIGIT_RULES.items()))

    def __post_init__(self) -> None:
        if not 0.0 <= self.latin_threshold <= 1.0:
            raise ValueError("latin_threshold must be in [0, 1]")
        if self.max_run < 2:
            raise ValueError("max_run must be >= 2")
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        rules = dict(self.digit_rules)
        if "3" in rules or "7" in rules:
            raise ValueError("digit rules must not remap 3 or 7")


@dataclass
class IngestStats:
    total: int = 0
    kept: int = 0
    dropped_script: int = 0
    dropped_short: int = 0
    dropped_duplicate: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


class Corpus:
    """Cleaned sentences with token counts and a per-occurrence index."""

    def __init__(self, sentences: list[Sentence]):
        self.sentences = sentences
        self.vocab_counts: Counter[str] = Counter()
        # token -> [(sentence idx, token idx), ...] for every occurrence
        self.index: dict[str, list[tuple[int, int]]] = {}
        for si, sent in enumerate(sentences):
            for ti, tok in enumerate(sent.tokens):
                self.vocab_counts[tok] += 1
                self.index.setdefault(tok, []).append((si, ti))

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def total_tokens(self) -> int:
        return sum(self.vocab_counts.values())

    @property
    def unique_words(self) -> int:
        return len(self.vocab_counts)

    def contexts(self, word: str, limit: int) -> list[tuple[Sentence, int]]:
        """Up to `limit` occurrences of `word`, each a sentence plus the
        token position to highlight. Unseen words give an empty list."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        hits = self.index.get(word, [])
        return [(self.sentences[si], ti) for si, ti in hits[:limit]]

    def to_lines(self) -> list[str]:
        return [" ".join(s.tokens) for s in self.sentences]

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for line in self.to_lines():
            digest.update(line.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()


def is_latin_script(text: str, latin_threshold: float = 0.5) -> bool:
    """True when at least the given fraction of alphabetic characters are
    basic Latin letters. Text without alphabetic characters fails."""
    alpha = [ch for ch in text if ch.isalpha()]
    if not alpha:
        return False
    latin = sum(1 for ch in alpha if _LATIN_LETTER_RE.match(ch))
    return latin / len(alpha) >= latin_threshold


def strip_noise(text: str) -> str:
    """Lowercase and drop URLs, mentions, hashtags, symbols and
    standalone number strings, leaving space-separated word material."""
    text = text.lower()
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _HASHTAG_RE.sub(" ", text)
    text = _NON_ALPHANUM_RE.sub(" ", text.replace("\n", " ").replace("\t", " "))
    tokens = [t for t in text.split() if not t.isdigit()]
    return " ".join(tokens)


def collapse_runs(token: str, max_run: int = 3) -> str:
    """Shorten any run of one repeated character longer than `max_run`
    down to exactly two characters; shorter runs stay untouched."""
    if not token:
        raise ValueError("token must be nonempty")
    out: list[str] = []
    i = 0
    while i < len(token):
        j = i
        while j < len(token) and token[j] == token[i]:
            j += 1
        run = j - i
        out.append(token[i] * (2 if run > max_run else run))
        i = j
    return "".join(out)


def digits_to_letters(token: str, rules: dict[str, str] | None = None) -> str:
    """Substitute in-word digits by their letter equivalents (2->a, 9->q,
    5/x->kh, ...). 3 and 7 stand for real phonemes and are preserved."""
    mapping = DEFAULT_DIGIT_RULES if rules is None else rules
    return "".join(mapping.get(ch, ch) for ch in token)


def clean_tokens(text: str, cfg: CleanConfig | None = None) -> list[str]:
    """Noise-stripped, run-collapsed, digit-substituted tokens of one
    comment, without the corpus-level length/duplicate filtering."""
    cfg = cfg or CleanConfig()
    rules = dict(cfg.digit_rules)
    tokens = []
    for raw_tok in strip_noise(text).split():
        tok = collapse_runs(raw_tok, cfg.max_run)
        tok = digits_to_letters(tok, rules)
        # digits with no substitution rule (0, 1) are noise, not phonemes
        tok = "".join(ch for ch in tok if not ch.isdigit() or ch in "37")
        if tok:
            tokens.append(tok)
    return tokens


def clean_comment(comment: RawComment, cfg: CleanConfig) -> list[str] | None:
    """Tokens for one comment, or None when the script filter rejects it."""
    if not is_latin_script(comment.text, cfg.latin_threshold):
        return None
    return clean_tokens(comment.text, cfg)


def clean_corpus(raw: list[RawComment], cfg: CleanConfig | None = None) -> tuple[Corpus, IngestStats]:
    """Run the full pipeline over raw comments.

    Sentences below the minimum length (or of a single word), and exact
    duplicates of an earlier sentence, are dropped. Deterministic for a
    fixed input order. An empty result is reported through the stats,
    not raised.
    """
    cfg = cfg or CleanConfig()
    stats = IngestStats(total=len(raw))
    seen: set[tuple[str, ...]] = set()
    sentences: list[Sentence] = []
    for comment in raw:
        tokens = clean_comment(comment, cfg)
        if tokens is None:
            stats.dropped_script += 1
            continue
        if len(tokens) < cfg.min_tokens or len(tokens) < 2:
            stats.dropped_short += 1
            continue
        key = tuple(tokens)
        if key in seen:
            stats.dropped_duplicate += 1
            continue
        seen.add(key)
        sentences.append(Sentence(tokens=key, origin_id=comment.id))
    stats.kept = len(sentences)
    return Corpus(sentences), stats


def read_raw_comments(path: str | Path) -> list[RawComment]:
    """Read raw comments from plain text (one comment per line) or
    JSON lines records with id and text fields."""
    path = Path(path)
    comments: list[RawComment] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("{"):
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: invalid JSON record: {exc}") from exc
                if "text" not in record:
                    raise ValueError(f"{path}:{lineno}: record missing 'text' field")
                if not str(record["text"]).strip():
                    continue
                comments.append(
                    RawComment(
                        id=str(record.get("id", lineno)),
                        text=str(record["text"]),
                        source=str(path),
                    )
                )
            else:
                comments.append(RawComment(id=str(lineno), text=line, source=str(path)))
    return comments


def save_corpus_text(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text("\n".join(corpus.to_lines()) + ("\n" if len(corpus) else ""), encoding="utf-8")


def load_corpus_text(path: str | Path) -> Corpus:
    """Load an already-cleaned corpus (one sentence of space-separated
    tokens per line). Token alphabet is validated."""
    path = Path(path)
    sentences: list[Sentence] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = tuple(line.split())
            if not tokens:
                continue
            for tok in tokens:
                if not TOKEN_RE.match(tok):
                    raise ValueError(f"{path}:{lineno}: token {tok!r} outside the cleaned alphabet")
            sentences.append(Sentence(tokens=tokens, origin_id=str(lineno)))
    return Corpus(sentences)


def save_stats(corpus: Corpus, stats: IngestStats, path: str | Path) -> None:
    payload = {
        "sentences": len(corpus),
        "unique_words": corpus.unique_words,
        "total_tokens": corpus.total_tokens,
        "ingest": stats.as_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
