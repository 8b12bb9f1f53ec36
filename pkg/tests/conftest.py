"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own traversal code:
reachability is recomputed with a plain queue-based BFS over explicit arc
lists, so agreement between the two routes actually means something.
"""

from collections import deque

import numpy as np
import pytest

from followcast.graph import SocialGraph, from_arc_arrays


def make_graph(node_count, arcs) -> SocialGraph:
    """Graph from a literal arc list [(u, v), ...]."""
    if arcs:
        srcs, dsts = zip(*arcs)
    else:
        srcs, dsts = [], []
    return from_arc_arrays(node_count, list(srcs), list(dsts))


def random_graph(rng: np.random.Generator, max_nodes: int, max_arcs: int) -> SocialGraph:
    """Random tiny digraph; may contain isolated nodes, never self-loops."""
    n = int(rng.integers(1, max_nodes + 1))
    if n == 1:
        return from_arc_arrays(1, [], [])
    m = int(rng.integers(0, max_arcs + 1))
    srcs = rng.integers(0, n, size=m)
    dsts = rng.integers(0, n, size=m)
    keep = srcs != dsts
    return from_arc_arrays(n, srcs[keep], dsts[keep])


def bfs_reach(node_count, arc_pairs, sources) -> set:
    """Queue BFS over an explicit arc list; the reference for reach_set."""
    adj = [[] for _ in range(node_count)]
    for u, v in arc_pairs:
        adj[int(u)].append(int(v))
    seen = set(int(s) for s in sources)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def pruned_arc_pairs(pruned) -> list:
    """(source, target) pairs of a PrunedGraph's kept arcs."""
    return list(zip(pruned.arc_sources.tolist(), pruned.targets.tolist()))


def graph_arc_pairs(graph) -> list:
    return list(zip(graph.arc_sources.tolist(), graph.targets.tolist()))


def mutual_reach_classes(node_count, arc_pairs) -> list:
    """Partition into strong components via the pairwise-BFS definition:
    u ~ v iff each reaches the other.  O(n^2) and proud of it."""
    reach = [bfs_reach(node_count, arc_pairs, [u]) for u in range(node_count)]
    assigned = [-1] * node_count
    classes = []
    for u in range(node_count):
        if assigned[u] >= 0:
            continue
        members = [v for v in range(node_count)
                   if assigned[v] < 0 and v in reach[u] and u in reach[v]]
        for v in members:
            assigned[v] = len(classes)
        classes.append(sorted(members))
    return classes


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
