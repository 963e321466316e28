"""Word embedding training from scratch: CBOW, skip-gram, and a
subword model, all with negative sampling over a cleaned corpus.

The trainer is intentionally plain numpy. Gradient kernels are shared
between the training loop and the finite-difference checks in the test
suite, so what gets verified is what actually runs.
"""
from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .ingest import Corpus

ALGORITHMS = ("cbow", "skipgram", "subword")
LR_FLOOR_RATIO = 1e-4

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "skipgram"
    dim: int = 100
    window: int = 7
    min_count: int = 2
    epochs: int = 5
    negatives: int = 5
    initial_lr: float | None = None
    subsample_t: float = 1e-4
    seed: int = 1
    subword_min_n: int = 3
    subword_max_n: int = 6
    bucket_count: int = 200_000
    threads: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        for name in ("dim", "window", "min_count", "epochs", "bucket_count", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.negatives < 0:
            raise ValueError("negatives must be >= 0")
        if self.subsample_t < 0:
            raise ValueError("subsample_t must be >= 0")
        if not 1 <= self.subword_min_n <= self.subword_max_n:
            raise ValueError("need 1 <= subword_min_n <= subword_max_n")
        if self.initial_lr is None:
            # the cbow objective averages context vectors, which supports
            # a larger step than the per-pair objectives
            object.__setattr__(self, "initial_lr", 0.05 if self.algorithm == "cbow" else 0.025)
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be positive")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "TrainConfig":
        return cls(**payload)


def _fnv1a(data: bytes) -> int:
    digest = _FNV_OFFSET
    for byte in data:
        digest = ((digest ^ byte) * _FNV_PRIME) & _FNV_MASK
    return digest


def word_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of the boundary-wrapped word, shortest first."""
    wrapped = f"<{word}>"
    grams: list[str] = []
    for n in range(min_n, max_n + 1):
        if n > len(wrapped):
            break
        grams.extend(wrapped[i : i + n] for i in range(len(wrapped) - n + 1))
    return grams


def ngram_ids(word: str, min_n: int, max_n: int, bucket_count: int) -> np.ndarray:
    ids = [_fnv1a(g.encode("utf-8")) % bucket_count for g in word_ngrams(word, min_n, max_n)]
    return np.array(ids, dtype=np.int64)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def nsg_loss(center: np.ndarray, out_rows: np.ndarray, labels: np.ndarray) -> float:
    """Negative-sampling loss for one composed input vector against the
    positive target row (label 1) and negative rows (label 0)."""
    preds = _sigmoid(out_rows @ center)
    positive = labels > 0.5
    eps = np.finfo(preds.dtype).tiny
    return float(-(np.log(preds[positive] + eps).sum() + np.log1p(-preds[~positive] + eps).sum()))


def nsg_grads(center: np.ndarray, out_rows: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of nsg_loss: (d_center, d_out_rows)."""
    g = _sigmoid(out_rows @ center) - labels
    return g @ out_rows, np.outer(g, center)


def cbow_grads(
    context_rows: np.ndarray, out_rows: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients when the input is the mean of the context rows:
    (d_per_context_row, d_out_rows). Every context row shares the
    returned input gradient."""
    hidden = context_rows.mean(axis=0)
    d_hidden, d_out = nsg_grads(hidden, out_rows, labels)
    return d_hidden / len(context_rows), d_out


def subword_grads(
    own_row: np.ndarray, gram_rows: np.ndarray, out_rows: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients when the input is the sum of a word's own row and its
    n-gram rows: (d_shared_constituent, d_out_rows). The constituent
    gradient applies unchanged to the own row and to every n-gram row."""
    composed = own_row + gram_rows.sum(axis=0)
    return nsg_grads(composed, out_rows, labels)


def build_vocab(corpus: Corpus, min_count: int) -> dict[str, int]:
    """Vocabulary indices by descending count, ties lexicographic."""
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    kept = [(w, c) for w, c in corpus.vocab_counts.items() if c >= min_count]
    if not kept:
        raise ValueError(f"no word reaches min_count={min_count}")
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return {w: i for i, (w, _) in enumerate(kept)}


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors differ in dimension")
    uu = float(u @ u)
    vv = float(v @ v)
    if uu == 0.0 or vv == 0.0:
        raise ValueError("cosine of a zero vector is undefined")
    return float(u @ v) / float(np.sqrt(uu * vv))


class VectorModel:
    """Trained vectors plus everything needed to query them."""

    def __init__(
        self,
        vocab: dict[str, int],
        vectors: np.ndarray,
        config: TrainConfig,
        corpus_fingerprint: str = "",
        ngram_vectors: np.ndarray | None = None,
        model_id: str = "",
    ):
        if vectors.shape[0] != len(vocab):
            raise ValueError("vector row count does not match vocabulary size")
        self.vocab = vocab
        self.vectors = vectors
        self.config = config
        self.corpus_fingerprint = corpus_fingerprint
        self.ngram_vectors = ngram_vectors
        self.model_id = model_id or config.algorithm
        self.words = [w for w, _ in sorted(vocab.items(), key=lambda kv: kv[1])]
        self._unit: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def _unit_matrix(self) -> np.ndarray:
        if self._unit is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            if np.any(norms == 0):
                raise ValueError("model contains a zero-norm vector")
            self._unit = (self.vectors / norms).astype(np.float64)
        return self._unit

    def vector(self, word: str) -> np.ndarray:
        if word not in self.vocab:
            raise ValueError(f"word {word!r} not in model vocabulary")
        return self.vectors[self.vocab[word]]

    def query_vector(self, word: str, oov_via_subwords: bool = False) -> np.ndarray:
        if word in self.vocab:
            return self.vectors[self.vocab[word]]
        if oov_via_subwords and self.ngram_vectors is not None:
            cfg = self.config
            ids = ngram_ids(word, cfg.subword_min_n, cfg.subword_max_n, cfg.bucket_count)
            if len(ids) == 0:
                raise ValueError(f"word {word!r} yields no character n-grams")
            composed = self.ngram_vectors[ids].sum(axis=0)
            if not np.any(composed):
                raise ValueError(f"word {word!r} composes to a zero vector")
            return composed
        raise ValueError(f"word {word!r} not in model vocabulary")

    def most_similar(self, word: str, k: int, oov_via_subwords: bool = False) -> list[tuple[str, float]]:
        """The k nearest vocabulary words by cosine, best first, ties
        broken lexicographically; the query word itself is excluded."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0:
            self.query_vector(word, oov_via_subwords)
            return []
        query = np.asarray(self.query_vector(word, oov_via_subwords), dtype=np.float64)
        norm = np.linalg.norm(query)
        if norm == 0:
            raise ValueError(f"word {word!r} has a zero vector")
        scores = self._unit_matrix() @ (query / norm)
        order = sorted(range(len(self.words)), key=lambda i: (-scores[i], self.words[i]))
        out: list[tuple[str, float]] = []
        for idx in order:
            if self.words[idx] == word:
                continue
            out.append((self.words[idx], float(scores[idx])))
            if len(out) == k:
                break
        return out


def _keep_probabilities(counts: np.ndarray, subsample_t: float) -> np.ndarray | None:
    if subsample_t <= 0:
        return None
    freq = counts / counts.sum()
    ratio = subsample_t / freq
    return np.minimum(1.0, np.sqrt(ratio) + ratio)


class _Trainer:
    def __init__(self, corpus: Corpus, cfg: TrainConfig):
        self.cfg = cfg
        self.vocab = build_vocab(corpus, cfg.min_count)
        counts = np.zeros(len(self.vocab), dtype=np.float64)
        for word, count in corpus.vocab_counts.items():
            idx = self.vocab.get(word)
            if idx is not None:
                counts[idx] = count
        self.counts = counts
        self.sentences = [
            np.array([self.vocab[t] for t in s.tokens if t in self.vocab], dtype=np.int64)
            for s in corpus.sentences
        ]
        self.sentences = [s for s in self.sentences if len(s) >= 2]
        self.total_tokens = int(sum(len(s) for s in self.sentences))
        if self.total_tokens < cfg.window + 1:
            raise ValueError("corpus smaller than one full window")
        self.keep_prob = _keep_probabilities(counts, cfg.subsample_t)
        table = counts**0.75
        self.neg_cdf = np.cumsum(table / table.sum())
        self.neg_cdf[-1] = 1.0

        rng = np.random.default_rng(cfg.seed)
        bound = 0.5 / cfg.dim
        self.syn0 = rng.uniform(-bound, bound, (len(self.vocab), cfg.dim)).astype(np.float32)
        self.syn1 = np.zeros((len(self.vocab), cfg.dim), dtype=np.float32)
        self.gram_ids: list[np.ndarray] | None = None
        self.syn0_ng: np.ndarray | None = None
        if cfg.algorithm == "subword":
            words = [w for w, _ in sorted(self.vocab.items(), key=lambda kv: kv[1])]
            self.gram_ids = [
                ngram_ids(w, cfg.subword_min_n, cfg.subword_max_n, cfg.bucket_count) for w in words
            ]
            self.syn0_ng = rng.uniform(-bound, bound, (cfg.bucket_count, cfg.dim)).astype(np.float32)
        # shared mutable counter: lock-free on purpose, threads race on it
        self.processed = [0]
        self.schedule_total = cfg.epochs * self.total_tokens

    def _negatives(self, rng: np.random.Generator, positive: int) -> np.ndarray:
        if self.cfg.negatives == 0:
            return np.empty(0, dtype=np.int64)
        draws = np.searchsorted(self.neg_cdf, rng.random(self.cfg.negatives))
        return draws[draws != positive]

    def _lr(self) -> float:
        cfg = self.cfg
        remaining = 1.0 - self.processed[0] / max(1, self.schedule_total)
        return max(cfg.initial_lr * LR_FLOOR_RATIO, cfg.initial_lr * remaining)

    def _train_span(self, span: list[np.ndarray], seed: int) -> None:
        cfg = self.cfg
        rng = np.random.default_rng(seed)
        syn0, syn1 = self.syn0, self.syn1
        for epoch in range(cfg.epochs):
            for sent in span:
                if self.keep_prob is not None:
                    kept = sent[rng.random(len(sent)) < self.keep_prob[sent]]
                else:
                    kept = sent
                self.processed[0] += len(sent)
                if len(kept) < 2:
                    continue
                lr = self._lr()
                reach = rng.integers(1, cfg.window + 1, size=len(kept))
                for i in range(len(kept)):
                    b = int(reach[i])
                    lo = max(0, i - b)
                    context = np.concatenate((kept[lo:i], kept[i + 1 : i + b + 1]))
                    if len(context) == 0:
                        continue
                    center = int(kept[i])
                    if cfg.algorithm == "cbow":
                        negatives = self._negatives(rng, center)
                        targets = np.concatenate(([center], negatives))
                        labels = np.zeros(len(targets), dtype=np.float32)
                        labels[0] = 1.0
                        d_ctx, d_out = cbow_grads(syn0[context], syn1[targets], labels)
                        np.subtract.at(syn1, targets, lr * d_out)
                        np.subtract.at(syn0, context, lr * d_ctx)
                    elif cfg.algorithm == "skipgram":
                        for ctx_word in context:
                            negatives = self._negatives(rng, int(ctx_word))
                            targets = np.concatenate(([int(ctx_word)], negatives))
                            labels = np.zeros(len(targets), dtype=np.float32)
                            labels[0] = 1.0
                            d_in, d_out = nsg_grads(syn0[center], syn1[targets], labels)
                            np.subtract.at(syn1, targets, lr * d_out)
                            syn0[center] -= lr * d_in
                    else:
                        ids = self.gram_ids[center]
                        for ctx_word in context:
                            negatives = self._negatives(rng, int(ctx_word))
                            targets = np.concatenate(([int(ctx_word)], negatives))
                            labels = np.zeros(len(targets), dtype=np.float32)
                            labels[0] = 1.0
                            d_in, d_out = subword_grads(
                                syn0[center], self.syn0_ng[ids], syn1[targets], labels
                            )
                            np.subtract.at(syn1, targets, lr * d_out)
                            syn0[center] -= lr * d_in
                            np.subtract.at(self.syn0_ng, ids, lr * d_in)

    def run(self) -> None:
        cfg = self.cfg
        if cfg.threads == 1:
            self._train_span(self.sentences, cfg.seed + 1)
            return
        spans = [self.sentences[t :: cfg.threads] for t in range(cfg.threads)]
        workers = [
            threading.Thread(target=self._train_span, args=(span, cfg.seed + 1 + t))
            for t, span in enumerate(spans)
        ]
        for w in workers:
            w.start()
        for w in workers:
            w.join()

    def composed_vectors(self) -> np.ndarray:
        if self.cfg.algorithm != "subword":
            return self.syn0.copy()
        out = self.syn0.astype(np.float64).copy()
        for idx, ids in enumerate(self.gram_ids):
            out[idx] += self.syn0_ng[ids].astype(np.float64).sum(axis=0)
        return out.astype(np.float32)


def train(corpus: Corpus, cfg: TrainConfig) -> VectorModel:
    """Train one embedding model on a cleaned corpus.

    Single-threaded runs with a fixed seed are reproducible bit for
    bit; multi-threaded runs update shared rows without locks and may
    differ between runs.
    """
    trainer = _Trainer(corpus, cfg)
    trainer.run()
    vectors = trainer.composed_vectors()
    if not np.all(np.isfinite(vectors)):
        raise ArithmeticError("training produced non-finite vector components")
    return VectorModel(
        vocab=trainer.vocab,
        vectors=vectors,
        config=cfg,
        corpus_fingerprint=corpus.fingerprint(),
        ngram_vectors=None if trainer.syn0_ng is None else trainer.syn0_ng.copy(),
    )


def save_vectors(model: VectorModel, path: str | Path) -> None:
    """Text vector format: header "<count> <dim>", then one word and its
    components per line. Subword n-gram rows and the training config go
    to sidecar files next to the main one."""
    path = Path(path)
    for word in model.words:
        if " " in word or "\n" in word or "\t" in word:
            raise ValueError(f"word {word!r} contains whitespace; cannot be saved")
    lines = [f"{len(model.words)} {model.dim}"]
    for word in model.words:
        row = model.vectors[model.vocab[word]]
        lines.append(word + " " + " ".join(f"{x:.6f}" for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {
        "config": model.config.as_dict(),
        "corpus_fingerprint": model.corpus_fingerprint,
        "model_id": model.model_id,
    }
    _meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if model.ngram_vectors is not None:
        np.savez_compressed(_subword_path(path), ngram_vectors=model.ngram_vectors)


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def _subword_path(path: Path) -> Path:
    return path.with_name(path.name + ".subword.npz")


def load_vectors(path: str | Path) -> VectorModel:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}:1: header must be '<count> <dim>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ValueError(f"{path}:1: header must contain two integers") from exc
        vocab: dict[str, int] = {}
        rows = np.empty((count, dim), dtype=np.float32)
        lineno = 1
        idx = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if idx >= count:
                raise ValueError(f"{path}:{lineno}: more rows than the header's {count}")
            parts = line.split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}")
            word = parts[0]
            if word in vocab:
                raise ValueError(f"{path}:{lineno}: duplicate word {word!r}")
            vocab[word] = idx
            rows[idx] = np.array(parts[1:], dtype=np.float32)
            idx += 1
        if len(vocab) != count:
            raise ValueError(f"{path}:{lineno}: header promises {count} rows, file has {len(vocab)}")
    config = TrainConfig()
    fingerprint = ""
    model_id = ""
    meta_path = _meta_path(path)
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        config = TrainConfig.from_dict(meta["config"])
        fingerprint = meta.get("corpus_fingerprint", "")
        model_id = meta.get("model_id", "")
    ngram_vectors = None
    subword_path = _subword_path(path)
    if subword_path.exists():
        with np.load(subword_path) as payload:
            ngram_vectors = payload["ngram_vectors"]
    return VectorModel(
        vocab=vocab,
        vectors=rows,
        config=config,
        corpus_fingerprint=fingerprint,
        ngram_vectors=ngram_vectors,
        model_id=model_id,
    )
