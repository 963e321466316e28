"""Embedding trainer tests: gradient checks against finite differences,
reproducibility, neighbor queries, and the text vector format."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darijanorm.embeddings import (
    TrainConfig,
    VectorModel,
    build_vocab,
    cbow_grads,
    cosine,
    load_vectors,
    ngram_ids,
    nsg_grads,
    nsg_loss,
    save_vectors,
    subword_grads,
    train,
    word_ngrams,
)
from darijanorm.ingest import Corpus, Sentence


def corpus_from(token_lines: list[str]) -> Corpus:
    return Corpus([Sentence(tokens=tuple(line.split())) for line in token_lines])


def context_corpus(frames: int = 120) -> Corpus:
    """Two target words planted in identical frames, one far word in an
    unrelated frame, enough filler to keep training honest."""
    lines = []
    for _ in range(frames):
        lines.append("daba kan worda bzaf hna")
        lines.append("daba kan wordb bzaf hna")
        lines.append("sbah jab farword ltrik youm")
        lines.append("khoya rahad chi klam hna")
    return corpus_from(lines)


class TestTrainConfig:
    def test_paper_defaults(self):
        cfg = TrainConfig()
        assert cfg.window == 7
        assert cfg.min_count == 2
        assert cfg.dim == 100

    def test_lr_defaults_per_algorithm(self):
        assert TrainConfig(algorithm="cbow").initial_lr == 0.05
        assert TrainConfig(algorithm="skipgram").initial_lr == 0.025
        assert TrainConfig(algorithm="subword").initial_lr == 0.025

    def test_explicit_lr_kept(self):
        assert TrainConfig(algorithm="cbow", initial_lr=0.01).initial_lr == 0.01

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            TrainConfig(algorithm="glove")

    def test_subword_n_ordering(self):
        with pytest.raises(ValueError):
            TrainConfig(algorithm="subword", subword_min_n=5, subword_max_n=3)

    def test_round_trips_through_dict(self):
        cfg = TrainConfig(algorithm="subword", dim=32, seed=9)
        assert TrainConfig.from_dict(cfg.as_dict()) == cfg


class TestBuildVocab:
    def test_counts_filtered_and_ordered(self):
        corpus = corpus_from(["a a a b c", "a a b z z"])
        vocab = build_vocab(corpus, min_count=2)
        assert vocab == {"a": 0, "b": 1, "z": 2}

    def test_tie_breaks_lexicographic(self):
        corpus = corpus_from(["a b a b", "b a b a"])
        vocab = build_vocab(corpus, min_count=2)
        assert vocab == {"a": 0, "b": 1}

    def test_all_filtered_is_error(self):
        corpus = corpus_from(["a b c d"])
        with pytest.raises(ValueError, match="min_count"):
            build_vocab(corpus, min_count=2)

    def test_empty_corpus_is_error(self):
        with pytest.raises(ValueError):
            build_vocab(Corpus([]), min_count=1)


class TestCosine:
    def test_identity(self):
        v = np.array([1.0, 2.0, -3.0])
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_scale_invariance(self):
        assert cosine(np.array([1.0, 1.0]), np.array([2.0, 2.0])) == pytest.approx(1.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(3), np.ones(3))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.ones(3), np.ones(4))

    def test_matches_formula(self):
        u = np.array([0.3, -1.2, 2.0])
        v = np.array([1.5, 0.4, -0.2])
        num = sum(a * b for a, b in zip(u, v))
        den = np.sqrt(sum(a * a for a in u) * sum(b * b for b in v))
        assert cosine(u, v) == pytest.approx(num / den, abs=1e-12)

    @given(
        st.lists(st.floats(-5, 5).map(lambda x: x if abs(x) > 1e-6 else 0.0), min_size=3, max_size=3),
        st.lists(st.floats(-5, 5).map(lambda x: x if abs(x) > 1e-6 else 0.0), min_size=3, max_size=3),
    )
    def test_symmetry_and_bound(self, a, b):
        u, v = np.array(a), np.array(b)
        if not u.any() or not v.any():
            return
        assert cosine(u, v) == cosine(v, u)
        assert abs(cosine(u, v)) <= 1 + 1e-12


def finite_difference(loss_fn, params: np.ndarray, step: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(params)
    flat = params.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = loss_fn()
        flat[i] = orig - step
        down = loss_fn()
        flat[i] = orig
        out[i] = (up - down) / (2 * step)
    return grad


def assert_close_gradients(analytic: np.ndarray, numeric: np.ndarray) -> None:
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    rel = np.abs(analytic - numeric) / denom
    assert float(rel.max()) < 1e-4


@pytest.fixture
def frozen_batch():
    rng = np.random.default_rng(42)
    dim, negatives = 16, 5
    center = rng.normal(0, 0.5, dim)
    out_rows = rng.normal(0, 0.5, (1 + negatives, dim))
    labels = np.zeros(1 + negatives)
    labels[0] = 1.0
    return center, out_rows, labels


class TestGradientCheck:
    def test_plain_input_gradient(self, frozen_batch):
        center, out_rows, labels = frozen_batch
        d_center, _ = nsg_grads(center, out_rows, labels)
        numeric = finite_difference(lambda: nsg_loss(center, out_rows, labels), center)
        assert_close_gradients(d_center, numeric)

    def test_output_rows_gradient(self, frozen_batch):
        center, out_rows, labels = frozen_batch
        _, d_out = nsg_grads(center, out_rows, labels)
        numeric = finite_difference(lambda: nsg_loss(center, out_rows, labels), out_rows)
        assert_close_gradients(d_out, numeric)

    def test_mean_context_gradient(self, frozen_batch):
        _, out_rows, labels = frozen_batch
        rng = np.random.default_rng(7)
        context_rows = rng.normal(0, 0.5, (4, out_rows.shape[1]))
        d_ctx, d_out = cbow_grads(context_rows, out_rows, labels)
        numeric_ctx = finite_difference(
            lambda: nsg_loss(context_rows.mean(axis=0), out_rows, labels), context_rows
        )
        # the mean composition shares one gradient across context rows
        for row_grad in numeric_ctx:
            assert_close_gradients(d_ctx, row_grad)
        numeric_out = finite_difference(
            lambda: nsg_loss(context_rows.mean(axis=0), out_rows, labels), out_rows
        )
        assert_close_gradients(d_out, numeric_out)

    def test_summed_subword_gradient(self, frozen_batch):
        _, out_rows, labels = frozen_batch
        rng = np.random.default_rng(11)
        own = rng.normal(0, 0.5, out_rows.shape[1])
        gram_rows = rng.normal(0, 0.5, (6, out_rows.shape[1]))
        d_shared, d_out = subword_grads(own, gram_rows, out_rows, labels)

        def loss() -> float:
            return nsg_loss(own + gram_rows.sum(axis=0), out_rows, labels)

        assert_close_gradients(d_shared, finite_difference(loss, own))
        numeric_grams = finite_difference(loss, gram_rows)
        for row_grad in numeric_grams:
            assert_close_gradients(d_shared, row_grad)
        assert_close_gradients(d_out, finite_difference(loss, out_rows))


class TestWordNgrams:
    def test_boundary_markers(self):
        assert word_ngrams("ab", 3, 3) == ["<ab", "ab>"]

    def test_range(self):
        grams = word_ngrams("abc", 3, 4)
        assert "<ab" in grams and "abc" in grams and "<abc" in grams and "abc>" in grams

    def test_short_word_still_has_grams(self):
        assert word_ngrams("a", 3, 6) == ["<a>"]

    def test_ids_in_bucket_range(self):
        ids = ngram_ids("choukran", 3, 6, 1000)
        assert len(ids) == len(word_ngrams("choukran", 3, 6))
        assert ((0 <= ids) & (ids < 1000)).all()

    def test_ids_deterministic(self):
        assert np.array_equal(ngram_ids("salam", 3, 6, 5000), ngram_ids("salam", 3, 6, 5000))


def small_cfg(algorithm: str, **kwargs) -> TrainConfig:
    base = dict(
        algorithm=algorithm,
        dim=24,
        window=3,
        min_count=2,
        epochs=3,
        negatives=4,
        seed=5,
        bucket_count=5000,
        subsample_t=0.0,
    )
    base.update(kwargs)
    return TrainConfig(**base)


class TestTrain:
    @pytest.mark.parametrize("algorithm", ["cbow", "skipgram", "subword"])
    def test_deterministic_with_seed(self, algorithm):
        corpus = context_corpus(frames=30)
        a = train(corpus, small_cfg(algorithm))
        b = train(corpus, small_cfg(algorithm))
        assert np.array_equal(a.vectors, b.vectors)
        assert a.vocab == b.vocab

    @pytest.mark.parametrize("algorithm", ["cbow", "skipgram", "subword"])
    def test_shared_frames_beat_random_word(self, algorithm):
        corpus = context_corpus(frames=120)
        model = train(corpus, small_cfg(algorithm, epochs=4))
        together = cosine(model.vector("worda"), model.vector("wordb"))
        apart = cosine(model.vector("worda"), model.vector("farword"))
        assert together > apart

    def test_vectors_finite_and_nonzero(self):
        model = train(context_corpus(frames=30), small_cfg("skipgram"))
        assert np.isfinite(model.vectors).all()
        assert (np.linalg.norm(model.vectors, axis=1) > 0).all()

    def test_hapax_excluded_and_query_errors(self):
        lines = ["daba kan worda bzaf hna"] * 10 + ["daba kan hapaxword bzaf hna"]
        model = train(corpus_from(lines), small_cfg("skipgram"))
        assert "hapaxword" not in model.vocab
        with pytest.raises(ValueError, match="hapaxword"):
            model.most_similar("hapaxword", 5)

    def test_tiny_corpus_rejected(self):
        corpus = corpus_from(["a b a"])
        with pytest.raises(ValueError, match="window"):
            train(corpus, TrainConfig(algorithm="skipgram", window=7, min_count=1))

    def test_seed_changes_vectors(self):
        corpus = context_corpus(frames=20)
        a = train(corpus, small_cfg("skipgram", seed=1))
        b = train(corpus, small_cfg("skipgram", seed=2))
        assert not np.array_equal(a.vectors, b.vectors)

    def test_threaded_training_runs(self):
        corpus = context_corpus(frames=30)
        model = train(corpus, small_cfg("skipgram", threads=2))
        assert np.isfinite(model.vectors).all()

    def test_fingerprint_recorded(self):
        corpus = context_corpus(frames=20)
        model = train(corpus, small_cfg("cbow"))
        assert model.corpus_fingerprint == corpus.fingerprint()


def toy_model(n: int = 6, dim: int = 8, seed: int = 3) -> VectorModel:
    rng = np.random.default_rng(seed)
    words = [f"w{chr(ord('a') + i)}" for i in range(n)]
    vocab = {w: i for i, w in enumerate(words)}
    vectors = rng.normal(0, 1, (n, dim)).astype(np.float32)
    return VectorModel(vocab, vectors, TrainConfig(dim=dim))


class TestMostSimilar:
    def test_k_zero(self):
        assert toy_model().most_similar("wa", 0) == []

    def test_vocab_exhaustion(self):
        model = toy_model(n=3)
        assert len(model.most_similar("wa", 20)) == 2

    def test_self_excluded(self):
        model = toy_model()
        names = [w for w, _ in model.most_similar("wa", 10)]
        assert "wa" not in names

    def test_scores_descending(self):
        scores = [s for _, s in toy_model().most_similar("wa", 5)]
        assert scores == sorted(scores, reverse=True)

    def test_full_query_is_permutation(self):
        model = toy_model(n=7)
        names = [w for w, _ in model.most_similar("wa", len(model.words) - 1)]
        assert sorted(names) == sorted(w for w in model.words if w != "wa")

    def test_positive_scaling_preserves_ranking(self):
        model = toy_model(n=8)
        scaled = VectorModel(model.vocab, model.vectors * 7.5, model.config)
        for word in model.words:
            before = [w for w, _ in model.most_similar(word, 7)]
            after = [w for w, _ in scaled.most_similar(word, 7)]
            assert before == after

    def test_oov_query_errors(self):
        with pytest.raises(ValueError, match="missing"):
            toy_model().most_similar("missing", 3)

    def test_subword_oov_flag(self):
        corpus = context_corpus(frames=60)
        model = train(corpus, small_cfg("subword"))
        with pytest.raises(ValueError):
            model.most_similar("wordc", 3)
        hits = model.most_similar("wordc", 3, oov_via_subwords=True)
        assert len(hits) == 3
        # shared character n-grams should pull the sibling forms up
        assert {"worda", "wordb"} & {w for w, _ in hits}


class TestVectorIO:
    def test_round_trip_close(self, tmp_path):
        model = train(context_corpus(frames=30), small_cfg("skipgram"))
        path = tmp_path / "model.vec"
        save_vectors(model, path)
        loaded = load_vectors(path)
        assert loaded.vocab == model.vocab
        assert np.abs(loaded.vectors - model.vectors).max() <= 1e-6
        assert loaded.config == model.config
        assert loaded.corpus_fingerprint == model.corpus_fingerprint

    def test_subword_sidecar_round_trip(self, tmp_path):
        model = train(context_corpus(frames=30), small_cfg("subword"))
        path = tmp_path / "model.vec"
        save_vectors(model, path)
        loaded = load_vectors(path)
        assert loaded.ngram_vectors is not None
        assert np.array_equal(loaded.ngram_vectors, model.ngram_vectors)
        before = [w for w, _ in model.most_similar("wordc", 3, oov_via_subwords=True)]
        after = [w for w, _ in loaded.most_similar("wordc", 3, oov_via_subwords=True)]
        assert before == after

    def test_header_row_mismatch(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("2 3\na 0.1 0.2 0.3\nb 0.1 0.2 0.3\nc 0.1 0.2 0.3\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":4:"):
            load_vectors(path)

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("3 2\na 0.1 0.2\nb 0.1 0.2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="3"):
            load_vectors(path)

    def test_component_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("1 3\na 0.1 0.2\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2:"):
            load_vectors(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("banana\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            load_vectors(path)

    def test_word_with_space_rejected(self, tmp_path):
        model = toy_model()
        model.vocab = {"a b": 0, **{w: i for w, i in model.vocab.items() if i > 0}}
        model.words[0] = "a b"
        with pytest.raises(ValueError, match="whitespace"):
            save_vectors(model, tmp_path / "oops.vec")

    def test_plain_text_file_without_sidecars(self, tmp_path):
        path = tmp_path / "ext.vec"
        path.write_text("2 3\nfoo 0.1 0.2 0.3\nbar -0.1 0.0 1.5\n", encoding="utf-8")
        model = load_vectors(path)
        assert model.vocab == {"foo": 0, "bar": 1}
        assert model.vector("bar")[2] == pytest.approx(1.5)
