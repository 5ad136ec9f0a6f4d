"""Semantic-neologism candidate detection for Spanish, Catalan, and French.

A keyword is flagged as a candidate when the topic of its embedding
"semantic field" disagrees with the topic of the text it appears in.
"""

from .embeddings import (
    EmbeddingStore,
    SemanticField,
    SfDiagnostics,
    compose_oov,
    diagnose_sf,
    load_vectors,
    most_similar,
    resolve_key,
)
from .errors import SnDetectError
from .evaluation import confusion, cross_validate, per_pos_report, report, train_test_split_eval
from .keywords import KeywordGraph, RankedKeywords, build_graph, extract_keywords, rank
from .pipeline import (
    BatchSummary,
    PipelineConfig,
    PipelineModels,
    PipelineReport,
    SNCandidate,
    batch_classify,
    sn_classification,
)
from .postag import PosLexicon, load_conllu_tags, tag
from .storage import LabeledCorpus, ModelBundle, load_bundle, make_bundle, save_bundle
from .textprep import (
    RawDocument,
    StopwordTable,
    Token,
    TokenStream,
    detect_language,
    normalize,
    remove_stopwords,
    tokenize,
)
from .topicmodel import (
    LogRegHyperparams,
    LogRegModel,
    SparseVector,
    TfIdfModel,
    TopicClassifier,
    TopicLabel,
    analyze_topic,
    fit_logreg,
    fit_tfidf,
    predict,
    predict_proba,
    train_topic_model,
    transform,
)

__version__ = "0.1.0"
