import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tmembed.estimator import TsetlinWordEmbedder

from conftest import make_topic_documents


def small_embedder(**kw):
    defaults = dict(n_clauses=20, margin=30, specificity=3.0, accumulation=3,
                    rounds=15, random_state=0)
    defaults.update(kw)
    return TsetlinWordEmbedder(**defaults)


@pytest.fixture(scope="module")
def fitted():
    docs, _ = make_topic_documents(seed=0, num_docs=80, doc_len=5)
    return small_embedder().fit(docs)


class TestSklearnContract:
    def test_defaults_are_the_large_corpus_reference_config(self):
        params = TsetlinWordEmbedder().get_params()
        assert params["n_clauses"] == 600
        assert params["margin"] == 1200
        assert params["specificity"] == 5.0
        assert params["accumulation"] == 25
        assert params["rounds"] == 2000
        assert params["memory_depth"] == 2

    def test_get_params_round_trip(self):
        est = small_embedder(margin=77)
        params = est.get_params()
        assert params["margin"] == 77
        assert clone(est).get_params() == params

    def test_set_params(self):
        est = small_embedder().set_params(rounds=9)
        assert est.rounds == 9

    def test_transform_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            small_embedder().transform(["a0"])


class TestFitTransform:
    def test_fit_exposes_learned_state(self, fitted):
        m = len(fitted.vocabulary_)
        assert m == 18
        assert fitted.embeddings_.shape == (m, 20)
        assert fitted.binary_embeddings_.shape == (m, 20)
        assert fitted.embeddings_.min() >= 0
        assert fitted.embeddings_.max() <= 30
        assert len(fitted.training_errors_) == 15

    def test_transform_returns_embedding_rows(self, fitted):
        out = fitted.transform(["a0", "s1"])
        assert out.shape == (2, 20)
        k = fitted.vocabulary_.index["a0"]
        assert (out[0] == fitted.embeddings_[k]).all()

    def test_transform_lowercases_tokens(self, fitted):
        assert (fitted.transform(["A0"]) == fitted.transform(["a0"])).all()

    def test_oov_error_and_zero_modes(self, fitted):
        with pytest.raises(ValueError):
            fitted.transform(["nonsense"])
        docs, _ = make_topic_documents(seed=0, num_docs=40, doc_len=5)
        lenient = small_embedder(oov="zero", rounds=3).fit(docs)
        assert not lenient.transform(["nonsense"])[0].any()

    def test_same_random_state_reproduces(self):
        docs, _ = make_topic_documents(seed=1, num_docs=50, doc_len=5)
        a = small_embedder(rounds=8).fit(docs)
        b = small_embedder(rounds=8).fit(docs)
        assert (a.embeddings_ == b.embeddings_).all()

    def test_vocab_controls(self):
        docs = ["the cat sat", "the dog sat", "the bird flew"]
        est = small_embedder(rounds=2, stopwords={"the"}, min_df=2).fit(docs)
        assert set(est.vocabulary_.words) == {"sat"}
        est = small_embedder(rounds=2, max_vocab=2).fit(docs)
        assert len(est.vocabulary_) == 2

    def test_feature_names(self, fitted):
        names = fitted.get_feature_names_out()
        assert list(names[:2]) == ["clause_0", "clause_1"]
        assert len(names) == 20
