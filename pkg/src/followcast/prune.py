"""Arc sampling: keep each arc independently with probability p.

Retention draws are a counter-based function of (seed, arc index), so a
sample is reproducible regardless of iteration order, and the same draws
serve every p (threshold coupling): for p1 <= p2 and equal seed,
kept_arcs(p1) is a subset of kept_arcs(p2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SocialGraph
from .rng import arc_uniforms


@dataclass(frozen=True)
class PrunedGraph:
    """One cascade sample: the subgraph of arcs that fired."""

    parent: SocialGraph
    p: float
    seed: int
    kept_mask: np.ndarray  # bool per parent arc
    indptr: np.ndarray  # CSR over kept arcs, same node ids as parent
    targets: np.ndarray

    @property
    def node_count(self) -> int:
        return self.parent.node_count

    @property
    def kept_arc_count(self) -> int:
        return int(self.targets.size)

    @property
    def arc_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.indptr))


def prune(graph: SocialGraph, p: float, seed: int) -> PrunedGraph:
    """Sample a pruned graph: each arc kept independently with probability p.

    The per-arc draw is uniform on [0, 1) and the arc is kept iff draw < p,
    so p=0 keeps nothing and p=1 keeps everything, deterministically.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    draws = arc_uniforms(seed, graph.arc_count)
    mask = draws < p
    kept_targets = graph.targets[mask]
    kept_sources = graph.arc_sources[mask]
    counts = np.bincount(kept_sources, minlength=graph.node_count)
    indptr = np.zeros(graph.node_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return PrunedGraph(
        parent=graph,
        p=p,
        seed=seed,
        kept_mask=mask,
        indptr=indptr,
        targets=kept_targets,
    )
