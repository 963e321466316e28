"""Command line entry point wiring the toolkit into subcommands.

Every subcommand is non-interactive. Exit codes: 0 on success, 1 on a
runtime failure (bad data, missing file, failed invariant), 2 on usage
errors (unknown flags, missing required options).
"""
from __future__ import annotations

import functools
import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .builder import BuildConfig, build_dictionary, conflicts, load_dictionary, save_dictionary
from .embeddings import ALGORITHMS, TrainConfig, VectorModel, load_vectors, save_vectors, train
from .evaluate import (
    LabeledReport,
    compare_models,
    compare_scorers,
    evaluate,
    load_reference,
    reports_to_table,
    reports_to_tsv,
    threshold_sweep,
)
from .fetch import FetchError, fetch_comments
from .ingest import (
    CleanConfig,
    clean_corpus,
    load_corpus_text,
    read_raw_comments,
    save_corpus_text,
    save_stats,
)
from .lexicon import convert_lexicon_file, load_lexicon
from .normalizer import NormalizePolicy, normalize_text
from .review_state import ReviewState
from .simscore import DEFAULT_THRESHOLD, METHODS, score

_AMBIGUITY_FLAGS = {
    "leave": "leave-unchanged",
    "most-frequent": "most-frequent-canonical",
}


@dataclass(frozen=True)
class BuildManifest:
    """Everything needed to audit or reproduce one end-to-end run."""

    tool_version: str
    created_at: str
    deterministic: bool
    seed: int
    corpus: dict
    lexicon: dict
    models: dict
    builder: dict
    evaluation: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BuildManifest":
        return cls(**json.loads(text))


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _runtime_errors(fn):
    """Turn expected failures into exit code 1 with a diagnostic.

    Anything not listed here is a bug and keeps its traceback."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, OSError, RuntimeError, ArithmeticError, KeyError, FetchError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_models(spec: str) -> list[VectorModel]:
    paths = [p for p in spec.split(",") if p]
    if not paths:
        raise click.ClickException("no model paths given")
    return [load_vectors(p) for p in paths]


def _parse_thresholds(spec: str) -> list[float]:
    try:
        return [float(part) for part in spec.split(",") if part]
    except ValueError as exc:
        raise click.ClickException(f"bad threshold list {spec!r}") from exc


def _emit_reports(rows: list[LabeledReport], label_column: str, out: str | None) -> None:
    click.echo(reports_to_table(rows, label_column))
    if out:
        Path(out).write_text(reports_to_tsv(rows, label_column), encoding="utf-8")


@click.group()
@click.version_option(version=__version__, prog_name="darijanorm")
def main() -> None:
    """Build, evaluate, and apply a spelling-normalization dictionary."""


@main.command()
@click.option("--in", "source", required=True, help="Raw text/JSONL file or a paginated HTTP endpoint.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--latin-threshold", default=0.5, show_default=True)
@click.option("--min-tokens", default=2, show_default=True)
@click.option("--max-run", default=3, show_default=True)
@click.option("--max-items", default=100_000, show_default=True, help="Fetch cap for HTTP sources.")
@_runtime_errors
def ingest(source, out_dir, latin_threshold, min_tokens, max_run, max_items):
    """Clean raw comments into a tokenized corpus plus a stats file."""
    if source.startswith(("http://", "https://")):
        raw = fetch_comments(source, max_items=max_items)
    else:
        raw = read_raw_comments(source)
    cfg = CleanConfig(latin_threshold=latin_threshold, max_run=max_run, min_tokens=min_tokens)
    corpus, stats = clean_corpus(raw, cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus_text(corpus, out / "corpus.txt")
    save_stats(corpus, stats, out / "stats.json")
    click.echo(
        f"kept {stats.kept} of {stats.total} comments, "
        f"{corpus.unique_words} unique words -> {out / 'corpus.txt'}"
    )


@main.group()
def lexicon() -> None:
    """Lexicon maintenance."""


@lexicon.command()
@click.option("--in", "src", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "dst", required=True, type=click.Path(dir_okay=False))
@_runtime_errors
def convert(src, dst):
    """Convert an adapted-IPA lexicon into plain Latin spelling."""
    converted = convert_lexicon_file(src, dst)
    click.echo(f"converted {len(converted)} entries -> {dst}")


@lexicon.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@_runtime_errors
def validate(path):
    """Check a lexicon file; exit 1 with the first problem found."""
    loaded = load_lexicon(path)
    click.echo(f"OK: {len(loaded)} entries")


@main.command(name="train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--algo", default="skipgram", show_default=True, type=click.Choice(ALGORITHMS))
@click.option("--dim", default=100, show_default=True)
@click.option("--window", default=7, show_default=True)
@click.option("--min-count", default=2, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--subsample-t", default=1e-4, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--threads", default=1, show_default=True)
@_runtime_errors
def train_cmd(corpus_path, out_path, algo, dim, window, min_count, epochs, negatives, subsample_t, seed, threads):
    """Train one embedding model on a cleaned corpus."""
    corpus = load_corpus_text(corpus_path)
    cfg = TrainConfig(
        algorithm=algo,
        dim=dim,
        window=window,
        min_count=min_count,
        epochs=epochs,
        negatives=negatives,
        subsample_t=subsample_t,
        seed=seed,
        threads=threads,
    )
    model = train(corpus, cfg)
    save_vectors(model, out_path)
    click.echo(f"trained {algo}: {len(model.words)} words x {model.dim} dims -> {out_path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--word", required=True)
@click.option("--k", default=20, show_default=True)
@click.option("--oov-via-subwords", is_flag=True, default=False)
@_runtime_errors
def neighbors(model_path, word, k, oov_via_subwords):
    """Print the k nearest vocabulary words by cosine similarity."""
    model = load_vectors(model_path)
    for neighbor, similarity in model.most_similar(word, k, oov_via_subwords=oov_via_subwords):
        click.echo(f"{neighbor}\t{similarity:.6f}")


@main.command(name="score")
@click.option("--method", default="seqmatch_skeleton", show_default=True, type=click.Choice(METHODS))
@click.option("--a", "word_a", required=True)
@click.option("--b", "word_b", required=True)
@_runtime_errors
def score_cmd(method, word_a, word_b):
    """Print the lexical similarity of two words to 6 decimals."""
    click.echo(f"{score(word_a, word_b, method):.6f}")


@main.command()
@click.option("--models", required=True, help="Comma-separated model vector files.")
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=20, show_default=True)
@click.option("--method", default="seqmatch_skeleton", show_default=True, type=click.Choice(METHODS))
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--oov-via-subwords", is_flag=True, default=False)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_runtime_errors
def build(models, lexicon_path, k, method, threshold, oov_via_subwords, out_path):
    """Build a normalization dictionary from trained models."""
    loaded = _load_models(models)
    lex = load_lexicon(lexicon_path)
    cfg = BuildConfig(k=k, threshold=threshold, method=method, oov_via_subwords=oov_via_subwords)
    dictionary = build_dictionary(loaded, lex, cfg)
    save_dictionary(dictionary, out_path)
    conflicted = conflicts(dictionary)
    click.echo(f"{len(dictionary)} pairs ({len(conflicted)} conflicted transliterations) -> {out_path}")


@main.command(name="eval")
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", "reference_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--label", default="produced", show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@_runtime_errors
def eval_cmd(dict_path, lexicon_path, reference_path, label, out_path):
    """Score a built dictionary against a reference."""
    dictionary = load_dictionary(dict_path)
    lex = load_lexicon(lexicon_path)
    reference = load_reference(reference_path)
    rows = [LabeledReport(label=label, report=evaluate(dictionary, reference, lex))]
    _emit_reports(rows, "label", out_path)


@main.command()
@click.option("--models", required=True, help="Comma-separated model vector files.")
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", "reference_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--thresholds", default="0.60,0.65,0.70,0.75,0.80", show_default=True)
@click.option("--k", default=20, show_default=True)
@click.option("--method", default="seqmatch_skeleton", show_default=True, type=click.Choice(METHODS))
@click.option("--oov-via-subwords", is_flag=True, default=False)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@_runtime_errors
def sweep(models, lexicon_path, reference_path, thresholds, k, method, oov_via_subwords, out_path):
    """Evaluate one merged build per similarity threshold."""
    loaded = _load_models(models)
    lex = load_lexicon(lexicon_path)
    reference = load_reference(reference_path)
    rows = threshold_sweep(
        loaded, lex, reference, _parse_thresholds(thresholds),
        method=method, k=k, oov_via_subwords=oov_via_subwords,
    )
    _emit_reports(rows, "threshold", out_path)


@main.command(name="compare-models")
@click.option("--models", required=True, help="Comma-separated model vector files.")
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", "reference_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=20, show_default=True)
@click.option("--method", default="seqmatch_skeleton", show_default=True, type=click.Choice(METHODS))
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--oov-via-subwords", is_flag=True, default=False)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@_runtime_errors
def compare_models_cmd(models, lexicon_path, reference_path, k, method, threshold, oov_via_subwords, out_path):
    """Evaluate each model separately plus the merged build."""
    loaded = _load_models(models)
    lex = load_lexicon(lexicon_path)
    reference = load_reference(reference_path)
    rows = compare_models(
        loaded, lex, reference, method=method, k=k, threshold=threshold,
        oov_via_subwords=oov_via_subwords,
    )
    _emit_reports(rows, "model", out_path)


@main.command(name="compare-scorers")
@click.option("--models", required=True, help="Comma-separated model vector files.")
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", "reference_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default=",".join(METHODS), show_default=True)
@click.option("--k", default=20, show_default=True)
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--oov-via-subwords", is_flag=True, default=False)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@_runtime_errors
def compare_scorers_cmd(models, lexicon_path, reference_path, methods, k, threshold, oov_via_subwords, out_path):
    """Evaluate the merged build once per lexical scoring method."""
    loaded = _load_models(models)
    lex = load_lexicon(lexicon_path)
    reference = load_reference(reference_path)
    method_list = [m for m in methods.split(",") if m]
    rows = compare_scorers(
        loaded, lex, reference, method_list, k=k, threshold=threshold,
        oov_via_subwords=oov_via_subwords,
    )
    _emit_reports(rows, "method", out_path)


@main.command()
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "in_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Input text; stdin when omitted.")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Output text; stdout when omitted.")
@click.option("--on-ambiguous", default="leave", show_default=True,
              type=click.Choice(sorted(_AMBIGUITY_FLAGS)))
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Cleaned corpus for the most-frequent policy's counts.")
@click.option("--preprocess/--no-preprocess", default=True, show_default=True)
@_runtime_errors
def normalize(dict_path, lexicon_path, in_path, out_path, on_ambiguous, corpus_path, preprocess):
    """Rewrite text token by token through the dictionary."""
    dictionary = load_dictionary(dict_path)
    lex = load_lexicon(lexicon_path)
    policy = NormalizePolicy(on_ambiguous=_AMBIGUITY_FLAGS[on_ambiguous], preprocess=preprocess)
    counts = None
    if corpus_path is not None:
        counts = dict(load_corpus_text(corpus_path).vocab_counts)
    in_stream = open(in_path, "r", encoding="utf-8") if in_path else click.get_text_stream("stdin")
    out_stream = open(out_path, "w", encoding="utf-8") if out_path else click.get_text_stream("stdout")
    try:
        for line in in_stream:
            out_stream.write(normalize_text(dictionary, lex, line.rstrip("\n"), policy, counts) + "\n")
    finally:
        if in_path:
            in_stream.close()
        if out_path:
            out_stream.close()


@main.command()
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", required=True, type=click.Path(dir_okay=False))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None, type=click.Path(file_okay=False, exists=True),
              help="Built review UI bundle to serve at /.")
@_runtime_errors
def serve(dict_path, corpus_path, lexicon_path, log_path, port, host, static_dir):
    """Run the human review service over a built dictionary."""
    from .review_api import serve as run_server

    dictionary = load_dictionary(dict_path)
    lex = load_lexicon(lexicon_path)
    corpus = load_corpus_text(corpus_path)
    state = ReviewState(dictionary, lex, log_path)
    click.echo(f"review service on http://{host}:{port} (log: {log_path})")
    run_server(state, corpus, host=host, port=port, static_dir=static_dir)


@main.command()
@click.option("--raw", "raw_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", "reference_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--dim", default=100, show_default=True)
@click.option("--window", default=7, show_default=True)
@click.option("--min-count", default=2, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--subsample-t", default=1e-4, show_default=True)
@click.option("--k", default=20, show_default=True)
@click.option("--method", default="seqmatch_skeleton", show_default=True, type=click.Choice(METHODS))
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--deterministic", is_flag=True, default=False,
              help="Single-threaded, fixed ordering, no wall-clock in the manifest.")
@_runtime_errors
def e2e(raw_path, lexicon_path, reference_path, out_dir, dim, window, min_count, epochs,
        subsample_t, k, method, threshold, seed, deterministic):
    """Ingest, train all three algorithms, build, and evaluate."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    raw = read_raw_comments(raw_path)
    clean_cfg = CleanConfig()
    corpus, stats = clean_corpus(raw, clean_cfg)
    save_corpus_text(corpus, out / "corpus.txt")
    save_stats(corpus, stats, out / "stats.json")
    click.echo(f"corpus: {len(corpus)} sentences, {corpus.unique_words} unique words")

    lex = load_lexicon(lexicon_path)
    reference = load_reference(reference_path)

    models: list[VectorModel] = []
    model_entries: dict[str, dict] = {}
    for algo in ALGORITHMS:
        cfg = TrainConfig(
            algorithm=algo, dim=dim, window=window, min_count=min_count,
            epochs=epochs, subsample_t=subsample_t, seed=seed, threads=1,
        )
        model = train(corpus, cfg)
        vec_path = out / f"vectors_{algo}.txt"
        save_vectors(model, vec_path)
        models.append(model)
        model_entries[algo] = {"digest": _file_digest(vec_path), "config": cfg.as_dict()}
        click.echo(f"trained {algo}: {len(model.words)} words")

    build_cfg = BuildConfig(k=k, threshold=threshold, method=method)
    dictionary = build_dictionary(models, lex, build_cfg)
    dict_path = out / "dict.tsv"
    save_dictionary(dictionary, dict_path)
    click.echo(f"dictionary: {len(dictionary)} pairs")

    rows = compare_models(models, lex, reference, method=method, k=k, threshold=threshold)
    report_path = out / "report.tsv"
    report_path.write_text(reports_to_tsv(rows, "model"), encoding="utf-8")
    click.echo(reports_to_table(rows, "model"))

    manifest = BuildManifest(
        tool_version=__version__,
        created_at="" if deterministic else datetime.now(timezone.utc).isoformat(),
        deterministic=deterministic,
        seed=seed,
        corpus={
            "digest": _file_digest(out / "corpus.txt"),
            "sentences": len(corpus),
            "unique_words": corpus.unique_words,
            "config": {
                "latin_threshold": clean_cfg.latin_threshold,
                "max_run": clean_cfg.max_run,
                "min_tokens": clean_cfg.min_tokens,
            },
        },
        lexicon={
            "digest": _file_digest(Path(lexicon_path)),
            "entries": len(lex),
            "fingerprint": lex.fingerprint(),
        },
        models=model_entries,
        builder={
            "digest": _file_digest(dict_path),
            "pairs": len(dictionary),
            "config": dictionary.build_config.as_dict(),
        },
        evaluation={
            "digest": _file_digest(report_path),
            "reference_digest": _file_digest(Path(reference_path)),
        },
    )
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    click.echo(f"manifest -> {out / 'manifest.json'}")


if __name__ == "__main__":
    main()
