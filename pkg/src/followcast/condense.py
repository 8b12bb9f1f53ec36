"""SCC condensation of pruned graphs and weighted reachability queries.

A pruned graph is condensed to a DAG whose nodes are strongly connected
components carrying their member counts.  Reachability from a seed set is
then a DAG traversal plus a size accumulation, which is what makes
cascade-size queries cheap enough to repeat across many samples.

Component detection uses scipy's iterative SCC routine, so recursion
depth never bounds graph size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .graph import SocialGraph
from .prune import PrunedGraph


@dataclass(frozen=True)
class CondensedDag:
    """Condensation of one pruned graph: component partition + weighted DAG."""

    node_count: int
    comp_count: int
    scc_id: np.ndarray  # per-node component id
    scc_size: np.ndarray  # per-component member count
    comp_indptr: np.ndarray  # CSR over deduplicated inter-component arcs
    comp_targets: np.ndarray


def condense(pruned: PrunedGraph) -> CondensedDag:
    n = pruned.node_count
    if pruned.kept_arc_count == 0:
        return CondensedDag(
            node_count=n,
            comp_count=n,
            scc_id=np.arange(n, dtype=np.int32),
            scc_size=np.ones(n, dtype=np.int32),
            comp_indptr=np.zeros(n + 1, dtype=np.int64),
            comp_targets=np.zeros(0, dtype=np.int32),
        )
    adjacency = scipy.sparse.csr_matrix(
        (np.ones(pruned.kept_arc_count, dtype=np.int8), pruned.targets, pruned.indptr),
        shape=(n, n),
    )
    comp_count, labels = connected_components(adjacency, directed=True, connection="strong")
    labels = labels.astype(np.int32)
    sizes = np.bincount(labels, minlength=comp_count).astype(np.int32)

    src_comp = labels[pruned.arc_sources].astype(np.int64)
    dst_comp = labels[pruned.targets].astype(np.int64)
    cross = src_comp != dst_comp
    packed = src_comp[cross] * np.int64(comp_count) + dst_comp[cross]
    packed = np.unique(packed)
    dag_src = packed // comp_count
    dag_dst = (packed % comp_count).astype(np.int32)
    counts = np.bincount(dag_src, minlength=comp_count)
    comp_indptr = np.zeros(comp_count + 1, dtype=np.int64)
    np.cumsum(counts, out=comp_indptr[1:])
    return CondensedDag(
        node_count=n,
        comp_count=comp_count,
        scc_id=labels,
        scc_size=sizes,
        comp_indptr=comp_indptr,
        comp_targets=dag_dst,
    )


def neighbors_of(indptr: np.ndarray, targets: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    """All out-neighbors of the frontier nodes, concatenated (with repeats)."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return targets[:0]
    ends = np.cumsum(counts)
    offsets = np.arange(total) - np.repeat(ends - counts, counts)
    return targets[np.repeat(starts, counts) + offsets]


def _as_node_array(nodes, node_count: int) -> np.ndarray:
    arr = np.asarray(list(nodes) if isinstance(nodes, (set, frozenset)) else nodes, dtype=np.int64)
    arr = np.atleast_1d(arr)
    if arr.size and (arr.min() < 0 or arr.max() >= node_count):
        raise ValueError("node id out of range")
    return arr


def _reached_components(dag: CondensedDag, source_comps: np.ndarray) -> np.ndarray:
    """Boolean mask over components reachable from the given components."""
    visited = np.zeros(dag.comp_count, dtype=bool)
    visited[source_comps] = True
    frontier = np.unique(source_comps)
    while frontier.size:
        nbrs = neighbors_of(dag.comp_indptr, dag.comp_targets, frontier)
        nbrs = np.unique(nbrs)
        fresh = nbrs[~visited[nbrs]]
        visited[fresh] = True
        frontier = fresh
    return visited


def reach_set(dag: CondensedDag, sources) -> np.ndarray:
    """Nodes reachable from the sources in the pruned graph (sources included),
    computed on the condensation and expanded back to node ids."""
    sources = _as_node_array(sources, dag.node_count)
    if sources.size == 0:
        return np.zeros(0, dtype=np.int64)
    visited = _reached_components(dag, dag.scc_id[sources])
    return np.flatnonzero(visited[dag.scc_id]).astype(np.int64)


def reach_count(dag: CondensedDag, sources) -> int:
    """|reach_set(dag, sources)| via component-size accumulation, without
    materializing the node set."""
    sources = _as_node_array(sources, dag.node_count)
    if sources.size == 0:
        return 0
    visited = _reached_components(dag, dag.scc_id[sources])
    return int(dag.scc_size[visited].sum())


def reader_set(graph: SocialGraph, active) -> np.ndarray:
    """Users who see the tweet: the active nodes plus everyone following an
    active node.  Reading never fails, so this walks the original follow
    arcs, not any pruned sample."""
    active = _as_node_array(active, graph.node_count)
    if active.size == 0:
        return np.zeros(0, dtype=np.int64)
    mask = np.zeros(graph.node_count, dtype=bool)
    mask[active] = True
    followers = neighbors_of(graph.indptr, graph.targets, np.unique(active))
    mask[followers] = True
    return np.flatnonzero(mask).astype(np.int64)
