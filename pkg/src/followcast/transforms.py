"""Graph transformations that reduce the follow-back and reader objectives
to plain cascade influence, used as executable cross-checks.

Follow-back: each original node u gets a companion u' with a single arc
u' -> u succeeding with probability r_u * p0(u).  Choosing followings B
corresponds to seeding the companions h(B); every cascade outcome then has
value |B| plus the original-model value, since the companions themselves
count as active.

Reader: each original node u gets a companion u'' that activates exactly
when u reads — via u -> u'' (u retweeted) or v -> u'' for every arc v -> u
(someone u follows retweeted), all with probability 1.  Giving weight 1 to
companions and 0 to originals turns "readers" into a weighted node count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import exact_probabilistic_influence
from .graph import SocialGraph
from .reciprocation import ReciprocationModel


@dataclass(frozen=True)
class TransformedGraph:
    """A cascade graph with per-arc success probabilities and node weights."""

    graph: SocialGraph
    node_map: np.ndarray  # original node id -> companion node id
    arc_probs: np.ndarray  # aligned with graph's CSR arcs
    node_weight: np.ndarray

    def companions(self, nodes) -> np.ndarray:
        return self.node_map[np.asarray(nodes, dtype=np.int64)]


def _assemble(node_count: int, srcs, dsts, probs) -> tuple:
    """CSR-sort parallel arc arrays, keeping probabilities aligned."""
    srcs = np.asarray(srcs, dtype=np.int64)
    dsts = np.asarray(dsts, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    order = np.lexsort((dsts, srcs))
    srcs, dsts, probs = srcs[order], dsts[order], probs[order]
    counts = np.bincount(srcs, minlength=node_count)
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    graph = SocialGraph(node_count=node_count, indptr=indptr, targets=dsts)
    return graph, probs


def follow_back_transform(graph: SocialGraph, reciprocation: ReciprocationModel,
                          p: float, p0: np.ndarray = None) -> TransformedGraph:
    """Companion node u' per original u, arc u' -> u with probability
    r_u * p0(u); original arcs keep probability p."""
    n = graph.node_count
    rates = reciprocation.rates(graph)
    if p0 is None:
        p0 = np.ones(n)
    srcs = np.concatenate([graph.arc_sources, np.arange(n, 2 * n, dtype=np.int64)])
    dsts = np.concatenate([graph.targets, np.arange(n, dtype=np.int64)])
    probs = np.concatenate([np.full(graph.arc_count, p), rates * np.asarray(p0)])
    tgraph, aligned = _assemble(2 * n, srcs, dsts, probs)
    return TransformedGraph(
        graph=tgraph,
        node_map=np.arange(n, 2 * n, dtype=np.int64),
        arc_probs=aligned,
        node_weight=np.ones(2 * n),
    )


def reader_transform(graph: SocialGraph, p: float) -> TransformedGraph:
    """Companion node u'' per original u with arcs u -> u'' and v -> u'' for
    every original arc v -> u, all certain; companions carry weight 1,
    originals weight 0."""
    n = graph.node_count
    srcs = np.concatenate([
        graph.arc_sources,                     # original cascade arcs
        np.arange(n, dtype=np.int64),          # u -> u''
        graph.arc_sources,                     # v -> u'' for each arc v -> u
    ])
    dsts = np.concatenate([
        graph.targets,
        np.arange(n, 2 * n, dtype=np.int64),
        graph.targets + n,
    ])
    probs = np.concatenate([
        np.full(graph.arc_count, p),
        np.ones(n),
        np.ones(graph.arc_count),
    ])
    tgraph, aligned = _assemble(2 * n, srcs, dsts, probs)
    weights = np.concatenate([np.zeros(n), np.ones(n)])
    return TransformedGraph(
        graph=tgraph,
        node_map=np.arange(n, 2 * n, dtype=np.int64),
        arc_probs=aligned,
        node_weight=weights,
    )


def exact_transformed_influence(transformed: TransformedGraph, seeds) -> float:
    """Exact expected weighted active count on a transformed graph."""
    return exact_probabilistic_influence(
        transformed.graph, transformed.arc_probs, seeds, transformed.node_weight
    )
