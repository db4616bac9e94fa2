import os
import random

import networkx as nx
import numpy as np
import pytest
from sklearn import metrics as skm

import dis2vec

DATA = os.environ.get("DIS2VEC_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "tests", "data"))
FIXTURE = os.path.join(DATA, "fixture6.jsonl")


def test_corpus_loads():
    corpus = dis2vec.load_corpus(FIXTURE)
    assert len(corpus.documents) == 2
    assert len(corpus) == 6
    assert corpus.documents[0].label == "sports"
    assert corpus.sentences[0].words[:2] == ["the", "team"]


def test_clustering_matches_sklearn():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 30)
        a = [rng.randrange(4) for _ in range(n)]
        b = [rng.randrange(3) for _ in range(n)]
        if len(set(a)) == 1 and len(set(b)) == 1:
            continue
        got = dis2vec.clustering_metrics(a, b)
        assert got["homogeneity"] == pytest.approx(skm.homogeneity_score(a, b), abs=1e-9)
        assert got["completeness"] == pytest.approx(skm.completeness_score(a, b), abs=1e-9)
        assert got["v_measure"] == pytest.approx(skm.v_measure_score(a, b), abs=1e-9)
        assert got["ami_raw"] == pytest.approx(skm.adjusted_mutual_info_score(a, b), abs=1e-7)


def test_classification_matches_sklearn():
    gold = [0, 1, 2, 0, 1, 2, 1, 1]
    pred = [0, 2, 2, 0, 1, 1, 1, 0]
    got = dis2vec.classification_metrics(gold, pred)
    assert got["f1"] == pytest.approx(skm.f1_score(gold, pred, average="macro"))
    assert got["precision"] == pytest.approx(skm.precision_score(gold, pred, average="macro"))
    assert got["kappa"] == pytest.approx(skm.cohen_kappa_score(gold, pred))
    micro = dis2vec.classification_metrics(gold, pred, average="micro")
    assert micro["f1"] == pytest.approx(skm.accuracy_score(gold, pred))
    with pytest.raises(dis2vec.ArgumentError):
        dis2vec.classification_metrics(gold, pred[:-1])


def test_pagerank_matches_networkx():
    g = nx.gnp_random_graph(12, 0.3, seed=3)
    edges = [(u, v, 0.2 + (u * 7 + v) % 5 / 5) for u, v in g.edges()]
    g = nx.Graph()
    g.add_nodes_from(range(12))
    g.add_weighted_edges_from(edges)
    ours = dis2vec.pagerank(12, edges)
    ref = nx.pagerank(g, alpha=0.85, tol=1e-12, max_iter=1000)
    assert sum(ours) == pytest.approx(1.0)
    for i in range(12):
        assert ours[i] == pytest.approx(ref[i], abs=1e-8)


def test_retrofit_two_nodes():
    out = dis2vec.retrofit(np.eye(2), [(0, 1, 1.0)], max_iterations=1000, tol=1e-12)
    np.testing.assert_allclose(out, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-6)
    same = dis2vec.retrofit(np.eye(2), [(0, 1, 1.0)], beta=0.0)
    np.testing.assert_array_equal(same, np.eye(2))


def test_kmeans_separates_blobs():
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(c, 0.1, size=(20, 2)) for c in (0, 5, 10)])
    labels, inertia = dis2vec.kmeans(x, 3, seed=2)
    assert skm.adjusted_rand_score([i // 20 for i in range(60)], labels) == 1.0
    assert inertia > 0


def test_rouge():
    assert dis2vec.rouge_1(["a", "b", "c"], [["a", "b", "d", "e"]], stopwords=False) == 0.5


def test_cli_train_and_reload(tmp_path):
    code, _, err = dis2vec.run(["train", "s2v-dbow", "--corpus", FIXTURE, "--out", str(tmp_path / "m"),
                                "--dim", "8", "--epochs", "3", "--min-count", "1", "--subsample", "0",
                                "--seed", "7"])
    assert code == 0, err
    vectors, ids = dis2vec.load_vectors(str(tmp_path / "m" / "vectors.txt"))
    assert vectors.shape == (6, 8)
    assert ids == [str(i) for i in range(6)]
    assert "s2v-dbow" in dis2vec.train_variants()

    code, _, err = dis2vec.run(["train", "it-w", "--priors", str(tmp_path / "m" / "vectors.txt"),
                                "--out", str(tmp_path / "x")])
    assert code == 2
    assert "--graph" in err
