import numpy as np
import pytest

from tmembed.core import TMConfig, TsetlinAutoencoder


@pytest.fixture
def example_machine():
    """The 3-word, 2-clause worked-example machine: clause 0 = x1 AND x2,
    clause 1 = x2 AND x3, weight rows (+4,-5), (+1,+2), (-7,+6)."""
    cfg = TMConfig(n_clauses=2, margin=15, specificity=5.0, memory_depth=2, seed=0)
    tm = TsetlinAutoencoder(cfg, num_outputs=3)
    tm.memory[:] = [[3, 3, 1],
                    [1, 3, 3]]
    tm.weights[:] = [[4, -5],
                     [1, 2],
                     [-7, 6]]
    return tm


def make_topic_documents(seed, num_docs=2000, doc_len=8):
    """Two 12-word topics sharing 6 common words; each document samples
    doc_len distinct words from one topic. Returns (documents, topic labels)."""
    rng = np.random.default_rng(seed)
    shared = [f"s{i}" for i in range(6)]
    topic_words = ([f"a{i}" for i in range(6)] + shared,
                   [f"b{i}" for i in range(6)] + shared)
    docs = []
    labels = []
    for _ in range(num_docs):
        topic = int(rng.integers(0, 2))
        words = topic_words[topic]
        picked = rng.choice(len(words), size=doc_len, replace=False)
        docs.append(" ".join(words[i] for i in picked))
        labels.append(topic)
    return docs, labels
