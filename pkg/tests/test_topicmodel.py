import math

import numpy as np
import pytest

from sndetect import topicmodel
from sndetect.errors import DegenerateLabels, EmptyCorpus
from sndetect.textprep import tokenize
from sndetect.topicmodel import (
    LogRegHyperparams,
    LogRegModel,
    SparseVector,
    analyze_topic,
    fit_logreg,
    fit_tfidf,
    objective_and_grad,
    predict,
    predict_proba,
    transform,
)

from corpus_data import CS_CLUSTER


def stream_of(text):
    return tokenize(text, "es")


def zero_model(classes=("a", "b")):
    return LogRegModel(
        classes=tuple(classes),
        weights=np.zeros((len(classes), 4)),
        intercepts=np.zeros(len(classes)),
        hyperparams=LogRegHyperparams(),
        converged=True,
        n_iter=0,
    )


class TestTfIdf:
    def test_ubiquitous_token_idf_one(self):
        corpus = [stream_of("nube roja"), stream_of("nube azul"), stream_of("nube gris")]
        model = fit_tfidf(corpus)
        assert model.idf[model.vocabulary["nube"]] == pytest.approx(1.0)

    def test_rare_token_idf(self):
        corpus = [stream_of("nube sola"), stream_of("otra cosa"), stream_of("tercer texto")]
        model = fit_tfidf(corpus)
        assert model.idf[model.vocabulary["sola"]] == pytest.approx(math.log(4 / 2) + 1, abs=1e-12)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            fit_tfidf([])

    def test_idf_non_increasing_in_df(self):
        corpus = [stream_of(t) for t in ("a b c", "a b", "a x", "a y")]
        model = fit_tfidf(corpus)
        df = model.document_frequency
        idf = model.idf
        for i in range(len(idf)):
            for j in range(len(idf)):
                if df[i] <= df[j]:
                    assert idf[i] >= idf[j]


class TestTransform:
    def test_oov_gives_zero_vector(self):
        model = fit_tfidf([stream_of("nube roja")])
        vec = transform(model, stream_of("desconocido total"))
        assert vec.nnz == 0

    def test_single_token_unit(self):
        model = fit_tfidf([stream_of("nube roja"), stream_of("sol")])
        vec = transform(model, stream_of("nube"))
        assert vec.pairs() == [(model.vocabulary["nube"], 1.0)]

    def test_equal_tfidf_symmetric(self):
        model = fit_tfidf([stream_of("nube sol"), stream_of("nube sol")])
        vec = transform(model, stream_of("nube sol"))
        weights = [w for _, w in vec.pairs()]
        assert weights == pytest.approx([1 / math.sqrt(2)] * 2)

    def test_l2_norm_is_one(self):
        model = fit_tfidf([stream_of("a b c"), stream_of("a d")])
        vec = transform(model, stream_of("a a b d e"))
        assert float(np.dot(vec.values, vec.values)) == pytest.approx(1.0, abs=1e-9)


def separable_fixture():
    left = [stream_of(f"uno dos tres cosa{i}") for i in range(5)]
    right = [stream_of(f"siete ocho nueve otra{i}") for i in range(5)]
    streams = left + right
    labels = ["l"] * 5 + ["r"] * 5
    tfidf = fit_tfidf(streams)
    X = [transform(tfidf, s) for s in streams]
    return tfidf, X, labels


class TestFitLogReg:
    def test_separable_training_accuracy(self):
        tfidf, X, labels = separable_fixture()
        model = fit_logreg(X, labels, n_features=tfidf.n_features)
        hits = sum(1 for x, lab in zip(X, labels) if predict(model, x).label == lab)
        assert hits == len(labels)

    def test_degenerate_labels(self):
        tfidf, X, _ = separable_fixture()
        with pytest.raises(DegenerateLabels):
            fit_logreg(X, ["same"] * len(X), n_features=tfidf.n_features)

    def test_extreme_regularization_shrinks_weights(self):
        tfidf, X, labels = separable_fixture()
        model = fit_logreg(
            X, labels, LogRegHyperparams(c=1e-9), n_features=tfidf.n_features
        )
        assert float(np.max(np.abs(model.weights))) < 1e-3

    def test_objective_never_worse_than_zero_init(self):
        tfidf, X, labels = separable_fixture()
        model = fit_logreg(X, labels, n_features=tfidf.n_features)
        zero = np.zeros_like(model.weights)
        zero_b = np.zeros_like(model.intercepts)
        obj_zero, _, _ = objective_and_grad(
            X, labels, model.classes, zero, zero_b, model.hyperparams.c
        )
        obj_fit, _, _ = objective_and_grad(
            X, labels, model.classes, model.weights, model.intercepts, model.hyperparams.c
        )
        assert obj_fit <= obj_zero

    def test_refit_bitwise_identical(self):
        tfidf, X, labels = separable_fixture()
        a = fit_logreg(X, labels, n_features=tfidf.n_features)
        b = fit_logreg(X, labels, n_features=tfidf.n_features)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.intercepts, b.intercepts)
        assert a.n_iter == b.n_iter

    def test_converged_flag(self):
        tfidf, X, labels = separable_fixture()
        assert fit_logreg(X, labels, n_features=tfidf.n_features).converged
        capped = fit_logreg(X, labels, LogRegHyperparams(max_iter=1), n_features=tfidf.n_features)
        assert not capped.converged


class TestGradient:
    def test_matches_central_finite_differences(self):
        # 5 docs, 10 terms
        texts = ["t0 t1 t2", "t2 t3 t4", "t4 t5 t6", "t6 t7 t8", "t8 t9 t0"]
        labels = ["a", "b", "a", "b", "a"]
        streams = [stream_of(t) for t in texts]
        tfidf = fit_tfidf(streams)
        X = [transform(tfidf, s) for s in streams]
        classes = ("a", "b")
        rng = np.random.default_rng(3)
        weights = 0.5 * rng.standard_normal((2, tfidf.n_features))
        intercepts = 0.5 * rng.standard_normal(2)
        c = 1.0
        _, grad_w, grad_b = objective_and_grad(X, labels, classes, weights, intercepts, c)

        def obj_at(w, b):
            val, _, _ = objective_and_grad(X, labels, classes, w, b, c)
            return val

        h = 1e-6
        for k in range(2):
            for j in range(tfidf.n_features):
                up = weights.copy()
                down = weights.copy()
                up[k, j] += h
                down[k, j] -= h
                numeric = (obj_at(up, intercepts) - obj_at(down, intercepts)) / (2 * h)
                analytic = grad_w[k, j]
                assert abs(analytic - numeric) <= 1e-5 * max(1.0, abs(analytic), abs(numeric))
            up_b = intercepts.copy()
            down_b = intercepts.copy()
            up_b[k] += h
            down_b[k] -= h
            numeric = (obj_at(weights, up_b) - obj_at(weights, down_b)) / (2 * h)
            assert abs(grad_b[k] - numeric) <= 1e-5 * max(1.0, abs(grad_b[k]), abs(numeric))


class TestPredict:
    def test_zero_vector_goes_to_largest_intercept(self):
        model = LogRegModel(
            classes=("a", "b", "c"),
            weights=np.zeros((3, 4)),
            intercepts=np.array([0.1, 0.7, 0.3]),
            hyperparams=LogRegHyperparams(),
            converged=True,
            n_iter=0,
        )
        assert predict(model, topicmodel.EMPTY_VECTOR).label == "b"

    def test_zero_model_uniform(self):
        probs = predict_proba(zero_model(), topicmodel.EMPTY_VECTOR)
        assert probs == pytest.approx([0.5, 0.5])
        probs3 = predict_proba(zero_model(("a", "b", "c")), topicmodel.EMPTY_VECTOR)
        assert probs3 == pytest.approx([1 / 3] * 3)

    def test_scale_invariance_zero_intercepts(self):
        rng = np.random.default_rng(0)
        model = LogRegModel(
            classes=("a", "b"),
            weights=rng.standard_normal((2, 4)),
            intercepts=np.zeros(2),
            hyperparams=LogRegHyperparams(),
            converged=True,
            n_iter=0,
        )
        x = SparseVector(np.array([0, 2]), np.array([0.6, 0.8]))
        scaled = SparseVector(np.array([0, 2]), np.array([0.6, 0.8]) * 3.5)
        assert predict(model, x) == predict(model, scaled)

    def test_tie_breaks_by_class_order(self):
        probs = predict_proba(zero_model(), topicmodel.EMPTY_VECTOR)
        assert probs[0] == probs[1]
        assert predict(zero_model(), topicmodel.EMPTY_VECTOR).label == "a"

    def test_proba_sums_to_one_random_inputs(self, toy_classifier):
        rng = np.random.default_rng(11)
        model = toy_classifier.logreg
        v = toy_classifier.tfidf.n_features
        for _ in range(1000):
            nnz = int(rng.integers(1, 6))
            idx = np.sort(rng.choice(v, size=nnz, replace=False))
            vals = rng.standard_normal(nnz)
            vals[vals == 0] = 1.0
            x = SparseVector(idx, vals)
            probs = predict_proba(model, x)
            assert abs(float(probs.sum()) - 1.0) <= 1e-9
            assert np.all(probs > 0) and np.all(probs < 1)


class TestAnalyzeTopic:
    def test_cs_neighbor_words(self, toy_classifier):
        words = (CS_CLUSTER * 14)[:140]
        assert analyze_topic(words, "es", toy_classifier).label == "informática"

    def test_empty_list_low_confidence(self, toy_classifier):
        label = analyze_topic([], "es", toy_classifier)
        assert label.low_confidence

    def test_duplication_invariant(self, toy_classifier):
        text = "el banco sube el precio"
        once = analyze_topic([text], "es", toy_classifier)
        twice = analyze_topic([text, text], "es", toy_classifier)
        assert once.label == twice.label

    def test_projection(self):
        label = topicmodel.TopicLabel(label="informática")
        assert label.project("informática") == 1
        assert label.project("deportes") == 0
