import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from tmembed.core import TMConfig, TsetlinAutoencoder
from tmembed.corpus import DocumentSet, Vocabulary, prepare_corpus
from tmembed.embedding import (
    EmbedConfig,
    EmbeddingMatrices,
    extract_embeddings,
    generate_example,
    save_binary_text,
    save_embeddings_binary,
    save_weighted_text,
    train,
)

from conftest import make_topic_documents


def tiny_config(**kw):
    tm = TMConfig(n_clauses=kw.pop("n_clauses", 10),
                  margin=kw.pop("margin", 8),
                  specificity=kw.pop("specificity", 3.0),
                  seed=kw.pop("seed", 0))
    return EmbedConfig(tm=tm, **kw)


class TestGenerateExample:
    def test_single_document_example(self):
        dset = DocumentSet([[0, 2]], num_words=3)
        rng = np.random.default_rng(0)
        # word 0 appears in the only document: target 0 pools nothing (skip),
        # target 1 yields exactly that document's vector
        seen = set()
        for _ in range(20):
            ex = generate_example(dset, 0, accumulation=1, rng=rng)
            if ex is None:
                seen.add("skip")
                continue
            seen.add("hit")
            assert ex.target == 1
            assert list(ex.inputs) == [True, False, True]
            assert ex.masked_index == 0
        assert seen == {"skip", "hit"}

    def test_positive_target_always_contains_the_word(self):
        rng = np.random.default_rng(1)
        docs = [[0, 1], [0, 2], [1, 2], [2, 3]]
        dset = DocumentSet(docs, num_words=4)
        for _ in range(200):
            k = int(rng.integers(0, 4))
            ex = generate_example(dset, k, accumulation=2, rng=rng)
            assert ex is not None
            if ex.target == 1:
                assert ex.inputs[k]
            else:
                assert not ex.inputs[k]

    def test_union_of_the_whole_pool(self):
        # accumulation >= pool size unions every pooled document
        dset = DocumentSet([[0, 1], [1, 2], [0, 3]], num_words=5)
        rng = np.random.default_rng(2)
        for _ in range(50):
            ex = generate_example(dset, 1, accumulation=10, rng=rng)
            assert ex is not None
            if ex.target == 1:
                assert list(np.flatnonzero(ex.inputs)) == [0, 1, 2]
            else:
                assert list(np.flatnonzero(ex.inputs)) == [0, 3]

    def test_target_balance(self):
        dset = DocumentSet([[0], [1], [0], [1], [0, 1]], num_words=2)
        rng = np.random.default_rng(3)
        targets = [generate_example(dset, 0, 1, rng).target for _ in range(4000)]
        assert abs(np.mean(targets) - 0.5) < 0.03

    def test_subset_sampler_is_uniform_without_replacement(self):
        from tmembed.embedding import _sample_without_replacement
        rng = np.random.default_rng(4)
        trials = 3000
        counts = np.zeros(10)
        for _ in range(trials):
            picked = _sample_without_replacement(rng, 10, 3)
            assert len(set(int(i) for i in picked)) == 3
            counts[picked] += 1
        expected = trials * 3 / 10
        assert (np.abs(counts - expected) / expected < 0.1).all()
        assert list(_sample_without_replacement(rng, 4, 4)) == [0, 1, 2, 3]


class TestExtract:
    def test_worked_example_row(self):
        cfg = TMConfig(n_clauses=2, margin=1200, specificity=5.0, seed=0)
        tm = TsetlinAutoencoder(cfg, num_outputs=1)
        tm.weights[:] = [[4, -5]]
        emb = extract_embeddings(tm)
        assert list(emb.weighted[0]) == [4, 0]
        assert list(emb.binary[0]) == [True, False]

    def test_all_negative_row_goes_dark(self):
        cfg = TMConfig(n_clauses=3, margin=10, specificity=5.0, seed=0)
        tm = TsetlinAutoencoder(cfg, num_outputs=1)
        tm.weights[:] = [[-1, -7, -2]]
        emb = extract_embeddings(tm)
        assert not emb.weighted[0].any()
        assert not emb.binary[0].any()

    def test_clip_at_margin(self):
        cfg = TMConfig(n_clauses=1, margin=10, specificity=5.0, seed=0)
        tm = TsetlinAutoencoder(cfg, num_outputs=1)
        tm.weights[:] = [[17]]
        assert extract_embeddings(tm).weighted[0, 0] == 10

    @given(hnp.arrays(np.int64, (6, 8), elements=st.integers(-50, 50)))
    @settings(max_examples=100)
    def test_extraction_equations_hold_entrywise(self, weights):
        cfg = TMConfig(n_clauses=8, margin=20, specificity=5.0, seed=0)
        tm = TsetlinAutoencoder(cfg, num_outputs=6)
        tm.weights[:] = weights
        emb = extract_embeddings(tm)
        for k in range(6):
            for j in range(8):
                w = weights[k, j]
                assert emb.weighted[k, j] == min(max(w, 0), 20)
                assert emb.binary[k, j] == (w > 0)
                if emb.binary[k, j]:
                    assert emb.weighted[k, j] >= 1

    def test_decoded_clauses_attach_with_vocab(self):
        vocab = Vocabulary(["actor", "brilliant", "was"])
        cfg = TMConfig(n_clauses=2, margin=10, specificity=5.0, seed=0)
        tm = TsetlinAutoencoder(cfg, num_outputs=3)
        tm.memory[:] = [[3, 3, 1], [1, 1, 4]]
        emb = extract_embeddings(tm, vocab)
        assert emb.clauses == [["actor", "brilliant"], ["was"]]


class TestTrain:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            tiny_config(rounds=0)
        with pytest.raises(ValueError):
            tiny_config(accumulation=0)

    def test_deterministic_given_seed(self):
        docs, _ = make_topic_documents(seed=5, num_docs=60, doc_len=4)
        vocab, dset = prepare_corpus(docs)
        runs = []
        for _ in range(2):
            tm = train(dset, vocab, tiny_config(rounds=12, accumulation=3, seed=9))
            emb = extract_embeddings(tm)
            runs.append((emb.weighted.copy(), emb.binary.copy()))
        assert (runs[0][0] == runs[1][0]).all()
        assert (runs[0][1] == runs[1][1]).all()

    def test_different_seeds_differ(self):
        docs, _ = make_topic_documents(seed=5, num_docs=60, doc_len=4)
        vocab, dset = prepare_corpus(docs)
        a = train(dset, vocab, tiny_config(rounds=12, accumulation=3, seed=1))
        b = train(dset, vocab, tiny_config(rounds=12, accumulation=3, seed=2))
        assert (a.weights != b.weights).any()

    def test_round_metrics_and_skips_are_reported(self):
        # "common" appears in every document: its target-0 pool is empty and
        # the word is skipped roughly half the time
        docs = [f"common w{i}" for i in range(8)]
        vocab, dset = prepare_corpus(docs)
        rounds = []
        train(dset, vocab, tiny_config(rounds=30, accumulation=2, seed=3),
              on_round=lambda rnd, err, skipped: rounds.append((rnd, err, skipped)))
        assert [r[0] for r in rounds] == list(range(30))
        assert all(err >= 0 for _, err, _ in rounds)
        total_skips = sum(s for _, _, s in rounds)
        assert 0 < total_skips < 30  # only the ubiquitous word can skip

    def test_vocabulary_mismatch_is_rejected(self):
        vocab = Vocabulary(["a", "b"])
        dset = DocumentSet([[0]], num_words=3)
        with pytest.raises(ValueError):
            train(dset, vocab, tiny_config())

    def test_empty_corpus_is_rejected(self):
        vocab = Vocabulary(["a"])
        dset = DocumentSet([], num_words=1)
        with pytest.raises(ValueError):
            train(dset, vocab, tiny_config())


class TestExports:
    def setup_method(self):
        self.words = ["coffee", "tea"]
        self.emb = EmbeddingMatrices(
            weighted=np.array([[4, 0, 9], [0, 2, 0]], dtype=np.int64),
            binary=np.array([[True, False, True], [False, True, False]]))

    def test_weighted_text(self, tmp_path):
        path = tmp_path / "emb.txt"
        save_weighted_text(self.emb, self.words, path)
        assert path.read_text() == "coffee 4 0 9\ntea 0 2 0\n"

    def test_binary_text_lists_connected_clause_indices(self, tmp_path):
        path = tmp_path / "emb-b.txt"
        save_binary_text(self.emb, self.words, path)
        assert path.read_text() == "coffee 0 2\ntea 1\n"

    def test_binary_container_round_trips(self, tmp_path):
        for matrix, dtype in (("weighted", "<i8"), ("binary", "u1")):
            path = tmp_path / f"{matrix}.bin"
            save_embeddings_binary(self.emb, self.words, path, matrix=matrix)
            data = path.read_bytes()
            assert data[:4] == b"TMEB"
            (header_len,) = struct.unpack_from("<I", data, 6)
            header = json.loads(data[10:10 + header_len])
            assert header["matrix"] == matrix
            assert header["vocabulary"] == self.words
            payload = np.frombuffer(data, dtype=dtype, offset=10 + header_len)
            reference = self.emb.weighted if matrix == "weighted" else self.emb.binary
            assert (payload.reshape(header["shape"]) == reference).all()

    def test_unknown_matrix_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            save_embeddings_binary(self.emb, self.words, tmp_path / "x", matrix="E")
