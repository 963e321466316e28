"""Precision and coverage evaluation of built dictionaries, plus the
threshold sweep and model/scorer comparison tables."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .builder import BuildConfig, NormalizationDictionary, build_dictionary
from .embeddings import VectorModel
from .ingest import TOKEN_RE
from .lexicon import Lexicon
from .simscore import DEFAULT_THRESHOLD

UNDEFINED = "undefined"


@dataclass(frozen=True)
class ReferenceDictionary:
    accepted_pairs: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        for translit, canonical in self.accepted_pairs:
            if not TOKEN_RE.match(translit) or not TOKEN_RE.match(canonical):
                raise ValueError(f"pair ({translit!r}, {canonical!r}) outside the token alphabet")

    def __len__(self) -> int:
        return len(self.accepted_pairs)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.accepted_pairs


@dataclass(frozen=True)
class EvalReport:
    precision: float | None
    coverage: float
    produced_count: int
    correct_count: int
    covered_canonicals: int
    lexicon_size: int

    def precision_text(self, digits: int = 3) -> str:
        return UNDEFINED if self.precision is None else f"{self.precision:.{digits}f}"


def precision(produced: NormalizationDictionary, reference: ReferenceDictionary) -> float | None:
    """Fraction of produced pairs present in the reference; None (the
    undefined marker) when nothing was produced."""
    if len(produced) == 0:
        return None
    correct = sum(1 for pair in produced if pair.key in reference)
    return correct / len(produced)


def coverage(produced: NormalizationDictionary, lexicon: Lexicon) -> float:
    """Fraction of lexicon canonicals that captured at least one
    transliteration."""
    if len(lexicon) == 0:
        raise ValueError("coverage over an empty lexicon is undefined")
    covered = {c for c in produced.covered_canonicals if c in lexicon}
    return len(covered) / len(lexicon)


def evaluate(
    produced: NormalizationDictionary, reference: ReferenceDictionary, lexicon: Lexicon
) -> EvalReport:
    correct = sum(1 for pair in produced if pair.key in reference)
    covered = {c for c in produced.covered_canonicals if c in lexicon}
    return EvalReport(
        precision=precision(produced, reference),
        coverage=coverage(produced, lexicon),
        produced_count=len(produced),
        correct_count=correct,
        covered_canonicals=len(covered),
        lexicon_size=len(lexicon),
    )


@dataclass(frozen=True)
class LabeledReport:
    label: str
    report: EvalReport


def threshold_sweep(
    models: list[VectorModel],
    lexicon: Lexicon,
    reference: ReferenceDictionary,
    thresholds: list[float],
    method: str = "seqmatch_skeleton",
    k: int = 20,
    oov_via_subwords: bool = False,
) -> list[LabeledReport]:
    """One merged build and evaluation per threshold, ascending."""
    if not thresholds:
        raise ValueError("thresholds must be nonempty")
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"threshold {t} outside [0, 1]")
    rows: list[LabeledReport] = []
    for t in sorted(thresholds):
        cfg = BuildConfig(k=k, threshold=t, method=method, oov_via_subwords=oov_via_subwords)
        produced = build_dictionary(models, lexicon, cfg)
        rows.append(LabeledReport(label=f"{t:.2f}", report=evaluate(produced, reference, lexicon)))
    return rows


def compare_models(
    models: list[VectorModel],
    lexicon: Lexicon,
    reference: ReferenceDictionary,
    method: str = "seqmatch_skeleton",
    k: int = 20,
    threshold: float = DEFAULT_THRESHOLD,
    oov_via_subwords: bool = False,
) -> list[LabeledReport]:
    """One row per model plus the merged build. The merged build covers
    at least as much as any single model; that is asserted here because
    a violation means the merge lost pairs."""
    if not models:
        raise ValueError("at least one model is required")
    cfg = BuildConfig(k=k, threshold=threshold, method=method, oov_via_subwords=oov_via_subwords)
    rows = [
        LabeledReport(label=m.model_id, report=evaluate(build_dictionary([m], lexicon, cfg), reference, lexicon))
        for m in models
    ]
    merged = evaluate(build_dictionary(models, lexicon, cfg), reference, lexicon)
    if any(merged.coverage < row.report.coverage for row in rows):
        raise RuntimeError("merged build lost coverage relative to a single model")
    rows.append(LabeledReport(label="merged", report=merged))
    return rows


def compare_scorers(
    models: list[VectorModel],
    lexicon: Lexicon,
    reference: ReferenceDictionary,
    methods: list[str],
    k: int = 20,
    threshold: float = DEFAULT_THRESHOLD,
    oov_via_subwords: bool = False,
) -> list[LabeledReport]:
    if not methods:
        raise ValueError("methods must be nonempty")
    rows: list[LabeledReport] = []
    for method in methods:
        cfg = BuildConfig(k=k, threshold=threshold, method=method, oov_via_subwords=oov_via_subwords)
        produced = build_dictionary(models, lexicon, cfg)
        rows.append(LabeledReport(label=method, report=evaluate(produced, reference, lexicon)))
    return rows


def save_reference(reference: ReferenceDictionary, path: str | Path) -> None:
    lines = ["translit\tcanonical"]
    lines.extend("\t".join(pair) for pair in sorted(reference.accepted_pairs))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_reference(path: str | Path) -> ReferenceDictionary:
    path = Path(path)
    pairs: set[tuple[str, str]] = set()
    header_seen = False
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if not header_seen:
                if line.split("\t") != ["translit", "canonical"]:
                    raise ValueError(f"{path}:{lineno}: expected header translit/canonical")
                header_seen = True
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
            if not TOKEN_RE.match(fields[0]) or not TOKEN_RE.match(fields[1]):
                raise ValueError(f"{path}:{lineno}: tokens outside the cleaned alphabet")
            pairs.add((fields[0], fields[1]))
    if not header_seen:
        raise ValueError(f"{path}: missing header row")
    return ReferenceDictionary(accepted_pairs=frozenset(pairs))


def reports_to_tsv(rows: list[LabeledReport], label_column: str) -> str:
    lines = [f"{label_column}\tprecision\tcoverage\tproduced\tcorrect\tcovered\tlexicon"]
    for row in rows:
        r = row.report
        lines.append(
            "\t".join(
                (
                    row.label,
                    r.precision_text(6),
                    f"{r.coverage:.6f}",
                    str(r.produced_count),
                    str(r.correct_count),
                    str(r.covered_canonicals),
                    str(r.lexicon_size),
                )
            )
        )
    return "\n".join(lines) + "\n"


def reports_to_table(rows: list[LabeledReport], label_column: str) -> str:
    """Aligned plain-text table for terminal output."""
    header = (label_column, "precision", "coverage", "produced", "correct")
    body = [
        (
            row.label,
            row.report.precision_text(),
            f"{row.report.coverage:.3f}",
            str(row.report.produced_count),
            str(row.report.correct_count),
        )
        for row in rows
    ]
    widths = [max(len(col), *(len(r[i]) for r in body)) if body else len(col) for i, col in enumerate(header)]

    def render(cells: tuple[str, ...]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    return "\n".join([render(header)] + [render(r) for r in body]) + "\n"
