"""Decision log and derived review state for dictionary validation.

The only persistent artifact is an append-only JSON-lines log of
reviewer decisions. Everything else (per-pair status, counts, the
exportable reference dictionary) is recomputed from the log, so a
restart replays it and lands in exactly the same state.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .builder import NormalizationDictionary
from .lexicon import Lexicon

VERDICTS = ("accept", "reject", "remap")
STATUSES = ("pending", "accepted", "rejected", "remapped")

_VERDICT_STATUS = {"accept": "accepted", "reject": "rejected", "remap": "remapped"}


class UnknownPairError(KeyError):
    """The decided pair is not part of the dictionary under review."""


class InvalidRemapError(ValueError):
    """Remap without a usable replacement canonical (or a replacement
    supplied for a non-remap verdict)."""


@dataclass(frozen=True)
class ReviewDecision:
    translit: str
    canonical: str
    verdict: str
    reviewer: str
    timestamp: str
    chosen_canonical: str | None = None

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not self.translit or not self.canonical:
            raise ValueError("decision needs a nonempty pair")
        if not self.reviewer:
            raise ValueError("decision needs a reviewer id")
        if self.verdict == "remap":
            if not self.chosen_canonical:
                raise InvalidRemapError("remap requires chosen_canonical")
            if self.chosen_canonical == self.canonical:
                raise InvalidRemapError("remap must change the canonical")
        elif self.chosen_canonical is not None:
            raise InvalidRemapError(f"chosen_canonical is only valid for remap, not {self.verdict}")

    @property
    def key(self) -> tuple[str, str]:
        return (self.translit, self.canonical)

    @property
    def status(self) -> str:
        return _VERDICT_STATUS[self.verdict]

    def as_dict(self) -> dict:
        out = {
            "translit": self.translit,
            "canonical": self.canonical,
            "verdict": self.verdict,
            "reviewer": self.reviewer,
            "timestamp": self.timestamp,
        }
        if self.chosen_canonical is not None:
            out["chosen_canonical"] = self.chosen_canonical
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewDecision":
        return cls(
            translit=data["translit"],
            canonical=data["canonical"],
            verdict=data["verdict"],
            reviewer=data["reviewer"],
            timestamp=data["timestamp"],
            chosen_canonical=data.get("chosen_canonical"),
        )


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


class ReviewState:
    """Dictionary under review plus the decision log, kept consistent.

    Appends go through a single lock and hit disk (write + fsync)
    before the in-memory state or the caller sees them, so an
    acknowledged decision is never lost to a crash.
    """

    def __init__(
        self,
        dictionary: NormalizationDictionary,
        lexicon: Lexicon,
        log_path: str | Path,
        clock=_utc_now,
    ):
        if len(lexicon) == 0:
            raise ValueError("review needs a nonempty lexicon")
        self.dictionary = dictionary
        self.lexicon = lexicon
        self.log_path = Path(log_path)
        self._clock = clock
        self._lock = threading.Lock()
        self._pairs = {p.key: p for p in dictionary}
        conflicted = {t for t, cs in _translit_targets(dictionary).items() if len(cs) >= 2}
        self._order = sorted(
            self._pairs, key=lambda k: (k[0] not in conflicted, k[0], k[1])
        )
        self._conflicted = conflicted
        self._latest: dict[tuple[str, str], ReviewDecision] = {}
        self._history_len = 0
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.log_path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    decision = ReviewDecision.from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise ValueError(f"{self.log_path}:{lineno}: bad log entry: {exc}") from exc
                self._validate(decision)
                self._latest[decision.key] = decision
                self._history_len += 1

    def _validate(self, decision: ReviewDecision) -> None:
        if decision.key not in self._pairs:
            raise UnknownPairError(f"pair {decision.key} is not under review")
        if decision.verdict == "remap" and decision.chosen_canonical not in self.lexicon:
            raise InvalidRemapError(
                f"chosen_canonical {decision.chosen_canonical!r} is not in the lexicon"
            )

    def record(
        self,
        translit: str,
        canonical: str,
        verdict: str,
        reviewer: str,
        chosen_canonical: str | None = None,
    ) -> ReviewDecision:
        """Validate, append to the log, fsync, then apply. The returned
        decision is exactly what the log now holds."""
        if (translit, canonical) not in self._pairs:
            raise UnknownPairError(f"pair {(translit, canonical)} is not under review")
        decision = ReviewDecision(
            translit=translit,
            canonical=canonical,
            verdict=verdict,
            reviewer=reviewer,
            timestamp=self._clock(),
            chosen_canonical=chosen_canonical,
        )
        self._validate(decision)
        line = json.dumps(decision.as_dict(), sort_keys=True, ensure_ascii=True)
        with self._lock:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._latest[decision.key] = decision
            self._history_len += 1
        return decision

    def status_of(self, key: tuple[str, str]) -> str:
        if key not in self._pairs:
            raise UnknownPairError(f"pair {key} is not under review")
        decision = self._latest.get(key)
        return decision.status if decision else "pending"

    def pair_record(self, key: tuple[str, str]):
        """The dictionary entry behind a review key, scores included."""
        if key not in self._pairs:
            raise UnknownPairError(f"pair {key} is not under review")
        return self._pairs[key]

    def is_conflicted(self, translit: str) -> bool:
        return translit in self._conflicted

    def conflict_set(self, translit: str, canonical: str) -> list[str]:
        return sorted(self.dictionary.canonicals_for(translit) - {canonical})

    def pairs_with_status(self, status: str) -> list[tuple[str, str]]:
        """Keys in review order (conflicted transliterations first,
        then alphabetical) filtered to one status."""
        if status not in STATUSES:
            raise ValueError(f"unknown status {status!r}")
        return [k for k in self._order if self.status_of(k) == status]

    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for key in self._pairs:
            out[self.status_of(key)] += 1
        out["total"] = len(self._pairs)
        return out

    def running_precision(self) -> float | None:
        c = self.counts()
        decided = c["accepted"] + c["rejected"] + c["remapped"]
        if decided == 0:
            return None
        return (c["accepted"] + c["remapped"]) / decided

    def export_pairs(self) -> list[tuple[str, str]]:
        """Reference pairs: accepted ones as-is, remapped ones with the
        reviewer's replacement canonical. Sorted, duplicate-free."""
        result = set()
        for key, decision in self._latest.items():
            if decision.status == "accepted":
                result.add(key)
            elif decision.status == "remapped":
                result.add((decision.translit, decision.chosen_canonical))
        return sorted(result)

    def export_tsv(self) -> str:
        lines = ["translit\tcanonical"]
        lines.extend("\t".join(pair) for pair in self.export_pairs())
        return "\n".join(lines) + "\n"

    @property
    def history_length(self) -> int:
        return self._history_len


def _translit_targets(dictionary: NormalizationDictionary) -> dict[str, set[str]]:
    targets: dict[str, set[str]] = {}
    for pair in dictionary:
        targets.setdefault(pair.translit, set()).add(pair.canonical)
    return targets
