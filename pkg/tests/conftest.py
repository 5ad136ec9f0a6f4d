import numpy as np
import pytest

from sndetect import storage, textprep, topicmodel
from sndetect.embeddings import load_vectors
from sndetect.pipeline import PipelineConfig, PipelineModels

from corpus_data import (
    CS_CLUSTER,
    ECON_CLUSTER,
    PROBE_CS,
    PROBE_NON_CS,
    SPORT_CLUSTER,
    TOY_DOCS,
)


def write_vec_file(path, entries, dim):
    """word2vec text format from a key -> vector mapping."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(entries)} {dim}\n")
        for key, vec in entries.items():
            fh.write(key + " " + " ".join(repr(float(x)) for x in vec) + "\n")
    return path


def cluster_entries(seed=7, dim=8):
    """Three tight clusters on orthogonal axes plus the five probe words."""
    rng = np.random.default_rng(seed)
    axes = {"cs": 0, "sport": 1, "econ": 2}

    def member(axis, scale=0.05):
        base = np.zeros(dim)
        base[axes[axis]] = 2.0
        return base + scale * rng.standard_normal(dim)

    entries = {}
    for word in CS_CLUSTER:
        entries[word] = member("cs")
    for word in SPORT_CLUSTER:
        entries[word] = member("sport")
    for word in ECON_CLUSTER:
        entries[word] = member("econ")
    for word, axis in PROBE_NON_CS.items():
        entries[word] = member(axis, scale=0.02)
    for word in PROBE_CS:
        entries[word] = member("cs", scale=0.02)
    return entries


@pytest.fixture(scope="session")
def toy_classifier():
    streams = [
        textprep.prepare(text, "es", doc_id=f"d{i}") for i, (_, text) in enumerate(TOY_DOCS)
    ]
    labels = [label for label, _ in TOY_DOCS]
    return topicmodel.train_topic_model(streams, labels)


@pytest.fixture(scope="session")
def toy_bundle(toy_classifier):
    return storage.make_bundle(toy_classifier, "es", metadata={"created_at": "fixture"})


@pytest.fixture(scope="session")
def cluster_store_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("vectors") / "clusters.vec"
    return write_vec_file(path, cluster_entries(), dim=8)


@pytest.fixture(scope="session")
def cluster_store(cluster_store_path):
    return load_vectors(cluster_store_path, "plain")


@pytest.fixture(scope="session")
def pipeline_models(toy_bundle, cluster_store):
    return PipelineModels.single(toy_bundle, cluster_store)


@pytest.fixture()
def pipeline_config():
    return PipelineConfig(backend="plain", topn=10)
