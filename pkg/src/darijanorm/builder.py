"""Normalization dictionary construction.

For every canonical form in the lexicon, pull its nearest embedding
neighbors, keep the ones whose lexical similarity to the canonical
clears the threshold, and merge the surviving pairs across models.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .embeddings import VectorModel
from .lexicon import Lexicon
from .simscore import DEFAULT_THRESHOLD, METHODS, score

logger = logging.getLogger(__name__)

DICT_COLUMNS = ("translit", "canonical", "semantic_score", "lexical_score", "sources")


@dataclass(frozen=True)
class BuildConfig:
    k: int = 20
    threshold: float = DEFAULT_THRESHOLD
    method: str = "seqmatch_skeleton"
    oov_via_subwords: bool = False
    model_ids: tuple[str, ...] = ()
    lexicon_fingerprint: str = ""

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def as_dict(self) -> dict:
        payload = asdict(self)
        payload["model_ids"] = list(self.model_ids)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "BuildConfig":
        payload = dict(payload)
        payload["model_ids"] = tuple(payload.get("model_ids", ()))
        return cls(**payload)


@dataclass(frozen=True)
class CandidatePair:
    translit: str
    canonical: str
    semantic_score: float
    lexical_score: float
    sources: frozenset[str]

    def __post_init__(self) -> None:
        if self.translit == self.canonical:
            raise ValueError("identity pairs carry no information")
        if not -1.0 - 1e-9 <= self.semantic_score <= 1.0 + 1e-9:
            raise ValueError("semantic_score out of [-1, 1]")
        if not 0.0 <= self.lexical_score <= 1.0:
            raise ValueError("lexical_score out of [0, 1]")
        if not self.sources:
            raise ValueError("sources must be nonempty")

    @property
    def key(self) -> tuple[str, str]:
        return (self.translit, self.canonical)


class NormalizationDictionary:
    """Pairs keyed by (translit, canonical), stored in sorted order."""

    def __init__(self, pairs: list[CandidatePair], build_config: BuildConfig):
        merged: dict[tuple[str, str], CandidatePair] = {}
        for pair in pairs:
            held = merged.get(pair.key)
            merged[pair.key] = pair if held is None else _merge_pair(held, pair)
        self.pairs = sorted(merged.values(), key=lambda p: p.key)
        self.build_config = build_config
        self._by_translit: dict[str, set[str]] = {}
        for pair in self.pairs:
            self._by_translit.setdefault(pair.translit, set()).add(pair.canonical)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormalizationDictionary):
            return NotImplemented
        return self.pairs == other.pairs and self.build_config == other.build_config

    @property
    def pair_keys(self) -> set[tuple[str, str]]:
        return {p.key for p in self.pairs}

    @property
    def covered_canonicals(self) -> set[str]:
        return {p.canonical for p in self.pairs}

    def canonicals_for(self, translit: str) -> set[str]:
        return set(self._by_translit.get(translit, ()))


def _merge_pair(a: CandidatePair, b: CandidatePair) -> CandidatePair:
    return CandidatePair(
        translit=a.translit,
        canonical=a.canonical,
        semantic_score=max(a.semantic_score, b.semantic_score),
        lexical_score=a.lexical_score,
        sources=a.sources | b.sources,
    )


def candidates_for(
    model: VectorModel,
    canonical: str,
    k: int = 20,
    method: str = "seqmatch_skeleton",
    threshold: float = DEFAULT_THRESHOLD,
    oov_via_subwords: bool = False,
) -> list[CandidatePair]:
    """Filtered neighbor pairs for one canonical form from one model.

    A canonical absent from the model vocabulary is skipped with a
    warning: most dictionary words never occur in a real corpus, so
    this is the expected path, not an error.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if canonical not in model.vocab and not (oov_via_subwords and model.ngram_vectors is not None):
        logger.warning("canonical %r not in model %s vocabulary, skipped", canonical, model.model_id)
        return []
    pairs: list[CandidatePair] = []
    for neighbor, semantic in model.most_similar(canonical, k, oov_via_subwords=oov_via_subwords):
        if neighbor == canonical:
            continue
        lexical = score(neighbor, canonical, method)
        if lexical >= threshold:
            pairs.append(
                CandidatePair(
                    translit=neighbor,
                    canonical=canonical,
                    semantic_score=semantic,
                    lexical_score=lexical,
                    sources=frozenset({model.model_id}),
                )
            )
    return pairs


def build_dictionary(
    models: list[VectorModel], lexicon: Lexicon, cfg: BuildConfig | None = None
) -> NormalizationDictionary:
    """Union of candidates_for over every model and lexicon entry.

    Pairs found by several models merge: sources union, semantic score
    keeps the maximum, the lexical score is method-determined and
    identical by construction.
    """
    cfg = cfg or BuildConfig()
    if not models:
        raise ValueError("at least one model is required")
    if len(lexicon) == 0:
        raise ValueError("lexicon is empty")
    pairs: list[CandidatePair] = []
    for model in models:
        for entry in lexicon:
            pairs.extend(
                candidates_for(
                    model, entry.canonical, cfg.k, cfg.method, cfg.threshold, cfg.oov_via_subwords
                )
            )
    if not pairs:
        logger.warning("build produced zero candidate pairs")
    stamped = replace(
        cfg,
        model_ids=tuple(m.model_id for m in models),
        lexicon_fingerprint=lexicon.fingerprint(),
    )
    return NormalizationDictionary(pairs, stamped)


def conflicts(dictionary: NormalizationDictionary) -> dict[str, set[str]]:
    """Transliterations assigned to more than one canonical form."""
    targets: dict[str, set[str]] = {}
    for pair in dictionary:
        targets.setdefault(pair.translit, set()).add(pair.canonical)
    return {t: c for t, c in targets.items() if len(c) >= 2}


def save_dictionary(dictionary: NormalizationDictionary, path: str | Path) -> None:
    lines = ["# build " + json.dumps(dictionary.build_config.as_dict(), sort_keys=True)]
    lines.append("\t".join(DICT_COLUMNS))
    for pair in dictionary:
        lines.append(
            "\t".join(
                (
                    pair.translit,
                    pair.canonical,
                    f"{pair.semantic_score:.6f}",
                    f"{pair.lexical_score:.6f}",
                    ",".join(sorted(pair.sources)),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dictionary(path: str | Path) -> NormalizationDictionary:
    path = Path(path)
    build_config = BuildConfig()
    pairs: list[CandidatePair] = []
    header_seen = False
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("# build "):
                try:
                    build_config = BuildConfig.from_dict(json.loads(line[len("# build ") :]))
                except (json.JSONDecodeError, TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad build metadata: {exc}") from exc
                continue
            if line.startswith("#"):
                continue
            if not header_seen:
                if tuple(line.split("\t")) != DICT_COLUMNS:
                    raise ValueError(f"{path}:{lineno}: expected header {'/'.join(DICT_COLUMNS)}")
                header_seen = True
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(fields)}")
            translit, canonical, semantic_text, lexical_text, sources_text = fields
            try:
                semantic = float(semantic_text)
                lexical = float(lexical_text)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad score: {exc}") from exc
            sources = frozenset(s for s in sources_text.split(",") if s)
            try:
                pairs.append(CandidatePair(translit, canonical, semantic, lexical, sources))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not header_seen:
        raise ValueError(f"{path}: missing header row")
    return NormalizationDictionary(pairs, build_config)
