"""Keyword extraction: co-occurrence graph over NOUN/VERB/ADJ tokens,
ranked by weighted PageRank.

Node scores follow WS(i) = (1-d) + d * sum_j w_ji / outsum_j * WS(j) with
synchronous updates from an all-ones start; undirected edges act as two
directed ones.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels, postag, textprep
from .errors import EmptyGraph
from .postag import PosLexicon
from .textprep import StopwordTable, TokenStream

ELIGIBLE_TAGS = ("NOUN", "VERB", "ADJ")

DEFAULT_WINDOW = 2
DEFAULT_DAMPING = 0.85
DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class KeywordGraph:
    """Undirected weighted co-occurrence graph over candidate tokens."""

    nodes: tuple[str, ...]
    edges: dict[tuple[int, int], float]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def out_weights(self) -> np.ndarray:
        """Per-node sum of incident edge weights."""
        out = np.zeros(len(self.nodes))
        for (i, j), w in self.edges.items():
            out[i] += w
            out[j] += w
        return out

    def edge_list(self) -> list[tuple[str, str, float]]:
        rows = [(self.nodes[i], self.nodes[j], w) for (i, j), w in self.edges.items()]
        rows.sort()
        return rows


@dataclass(frozen=True)
class RankedKeywords:
    items: tuple[tuple[str, float], ...]
    damping: float
    iterations: int
    converged: bool

    def scores(self) -> dict[str, float]:
        return dict(self.items)


def build_graph(stream: TokenStream, window: int = DEFAULT_WINDOW) -> KeywordGraph:
    """Connect eligible tokens that appear within `window` positions of each
    other in the POS-filtered sequence; each co-occurrence adds weight 1."""
    if window < 2:
        raise ValueError("window must be >= 2")
    filtered = [t.normalized for t in stream.tokens if t.pos in ELIGIBLE_TAGS]
    node_index: dict[str, int] = {}
    for token in filtered:
        if token not in node_index:
            node_index[token] = len(node_index)
    edges: dict[tuple[int, int], float] = {}
    for i, left in enumerate(filtered):
        for j in range(i + 1, min(i + window, len(filtered))):
            right = filtered[j]
            if left == right:
                continue
            a, b = node_index[left], node_index[right]
            key = (a, b) if a < b else (b, a)
            edges[key] = edges.get(key, 0.0) + 1.0
    return KeywordGraph(nodes=tuple(node_index), edges=edges)


def _contribution_arrays(graph: KeywordGraph):
    """Directed (src, dst, w/outsum_src) triples, sorted by (dst, src) so the
    per-node summation order is independent of edge insertion order."""
    out = graph.out_weights()
    triples = []
    for (i, j), w in graph.edges.items():
        triples.append((j, i, w))  # i contributes to j
        triples.append((i, j, w))  # j contributes to i
    triples.sort()
    dst = np.array([t[0] for t in triples], dtype=np.int64)
    src = np.array([t[1] for t in triples], dtype=np.int64)
    weight = np.array([t[2] for t in triples], dtype=np.float64)
    ratio = weight / out[src] if triples else np.empty(0)
    return src, dst, ratio


def rank(
    graph: KeywordGraph,
    d: float = DEFAULT_DAMPING,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    collect_trace: bool = False,
) -> RankedKeywords | tuple[RankedKeywords, list[np.ndarray]]:
    """Iterate the weighted rank update until the max per-node change drops
    below eps or max_iter is reached. Optionally returns every iterate."""
    if graph.n_nodes == 0:
        raise EmptyGraph("cannot rank an empty graph")
    if not 0.0 < d < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    src, dst, ratio = _contribution_arrays(graph)
    scores = np.ones(graph.n_nodes)
    trace = [scores.copy()] if collect_trace else None
    iterations = 0
    converged = False
    for _ in range(max_iter):
        new_scores = _kernels.pagerank_sweep(src, dst, ratio, scores, d)
        iterations += 1
        if collect_trace:
            trace.append(new_scores.copy())
        delta = float(np.max(np.abs(new_scores - scores)))
        scores = new_scores
        if delta < eps:
            converged = True
            break
    order = sorted(range(graph.n_nodes), key=lambda i: (-scores[i], graph.nodes[i]))
    items = tuple((graph.nodes[i], float(scores[i])) for i in order)
    result = RankedKeywords(items=items, damping=d, iterations=iterations, converged=converged)
    if collect_trace:
        return result, trace
    return result


def majority_tags(stream: TokenStream) -> dict[str, str]:
    """Most frequent eligible tag per token; ties follow ELIGIBLE_TAGS order."""
    votes: dict[str, Counter] = {}
    for token in stream.tokens:
        if token.pos in ELIGIBLE_TAGS:
            votes.setdefault(token.normalized, Counter())[token.pos] += 1
    return {
        tok: max(ELIGIBLE_TAGS, key=lambda tag: (counts[tag], -ELIGIBLE_TAGS.index(tag)))
        for tok, counts in votes.items()
    }


def extract_keywords(
    text: str,
    language: str,
    kw: int = 10,
    window: int = DEFAULT_WINDOW,
    d: float = DEFAULT_DAMPING,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    table: StopwordTable | None = None,
    lexicon: PosLexicon | None = None,
) -> list[tuple[str, str, float]]:
    """Full path from raw text to the top-kw (token, tag, score) triples."""
    if kw < 1:
        raise ValueError("kw must be >= 1")
    stream = textprep.prepare(text, language, table=table)
    tagged = postag.tag(stream, lexicon)
    graph = build_graph(tagged, window=window)
    if graph.n_nodes == 0:
        return []
    ranked = rank(graph, d=d, eps=eps, max_iter=max_iter)
    tags = majority_tags(tagged)
    return [(token, tags[token], score) for token, score in ranked.items[:kw]]
