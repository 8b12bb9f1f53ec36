"""Exact expected influence by enumeration over arc subsets.

With a constant per-arc success probability, the order-independent cascade's
final active set is distributed exactly like reachability on an arc-sampled
subgraph.  So the expectation can be computed exactly by summing over all
2^E arc subsets, weighting each subset by its probability.  Node sets are
held as uint64 bitmasks and all subsets of one chunk are processed at once,
which keeps genuinely exhaustive checks fast enough to run in test suites.

Only small graphs qualify: at most 25 arcs (enumeration) and 64 nodes
(bitmask width).  Larger inputs are refused, never approximated.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .graph import SocialGraph

MAX_ENUM_ARCS = 25
MAX_NODES = 64
_CHUNK = 1 << 16
# beyond this, per-subset closures are recomputed per query instead of stored
_STORE_BYTES = 128 << 20

METRICS = ("retweeters", "readers")


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def _seed_array(seeds, node_count: int) -> np.ndarray:
    arr = np.asarray(sorted(set(int(s) for s in seeds)), dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= node_count):
        raise ValueError("seed node id out of range")
    return arr


def _follower_masks(graph: SocialGraph) -> np.ndarray:
    masks = np.zeros(graph.node_count, dtype=np.uint64)
    srcs = graph.arc_sources
    for i in range(graph.arc_count):
        masks[srcs[i]] |= np.uint64(1) << np.uint64(graph.targets[i])
    return masks


class ExactCascade:
    """Reusable exact evaluator for one (graph, p) pair.

    Precomputes, for every arc subset, the reachability closure of every
    node, so repeated seed-set queries (greedy traces, brute-force sweeps)
    cost only bitwise ORs and popcounts.
    """

    def __init__(self, graph: SocialGraph, p: float):
        if graph.arc_count > MAX_ENUM_ARCS:
            raise ValueError(
                f"exact enumeration refused: {graph.arc_count} arcs > {MAX_ENUM_ARCS}"
            )
        if graph.node_count > MAX_NODES:
            raise ValueError(
                f"exact enumeration refused: {graph.node_count} nodes > {MAX_NODES}"
            )
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p}")
        self.graph = graph
        self.p = float(p)
        self._n = graph.node_count
        self._arcs = list(zip(graph.arc_sources.tolist(), graph.targets.tolist()))
        e = len(self._arcs)
        self._subset_count = 1 << e
        pop = np.bitwise_count(np.arange(self._subset_count, dtype=np.uint64)).astype(np.float64)
        self.weights = self.p ** pop * (1.0 - self.p) ** (e - pop)
        self._follower_mask = _follower_masks(graph)
        self._bits = None  # (n, 2^E), closure bitmask per node per subset
        if self._subset_count * self._n * 8 <= _STORE_BYTES:
            self._bits = self._closure_range(0, self._subset_count)

    def _closure_range(self, m0: int, m1: int) -> np.ndarray:
        """bits[u][i] = bitmask of nodes reachable from u under subset m0+i."""
        count = m1 - m0
        subset_ids = np.arange(m0, m1, dtype=np.uint64)
        bits = np.empty((self._n, count), dtype=np.uint64)
        for u in range(self._n):
            bits[u] = np.uint64(1) << np.uint64(u)
        present = [
            ((subset_ids >> np.uint64(idx)) & np.uint64(1))
            for idx in range(len(self._arcs))
        ]
        changed = True
        while changed:
            changed = False
            for idx, (u, v) in enumerate(self._arcs):
                new = bits[u] | (bits[v] * present[idx])
                if not np.array_equal(new, bits[u]):
                    bits[u] = new
                    changed = True
        return bits

    def _reach_bits(self, seeds: np.ndarray, m0: int, m1: int) -> np.ndarray:
        if self._bits is not None:
            source = self._bits[:, m0:m1]
        else:
            source = self._closure_range(m0, m1)
        reach = np.zeros(m1 - m0, dtype=np.uint64)
        for b in seeds:
            reach |= source[b]
        return reach

    def _metric_counts(self, reach: np.ndarray, metric: str) -> np.ndarray:
        if metric == "retweeters":
            return np.bitwise_count(reach)
        readers = reach.copy()
        for u in range(self._n):
            active_u = (reach >> np.uint64(u)) & np.uint64(1)
            readers |= self._follower_mask[u] * active_u
        return np.bitwise_count(readers)

    def expectation(self, seeds, metric: str = "retweeters") -> float:
        """Exact expected metric value when the seed nodes start active."""
        _check_metric(metric)
        seeds = _seed_array(seeds, self._n)
        if seeds.size == 0:
            return 0.0
        total = 0.0
        step = self._subset_count if self._bits is not None else _CHUNK
        for m0 in range(0, self._subset_count, step):
            m1 = min(m0 + step, self._subset_count)
            reach = self._reach_bits(seeds, m0, m1)
            counts = self._metric_counts(reach, metric).astype(np.float64)
            total += float(np.dot(self.weights[m0:m1], counts))
        return total

    def expectation_with_reciprocation(self, seeds, metric: str, rates: np.ndarray) -> float:
        """Average over the 2^|B| reciprocation outcomes: members of the seed
        set activate independently, member v with probability rates[v]; the
        metric is then evaluated with only the reciprocating members active."""
        seeds = _seed_array(seeds, self._n)
        if seeds.size > 20:
            raise ValueError("reciprocation enumeration refused: seed set too large")
        total = 0.0
        for outcome in product((0, 1), repeat=seeds.size):
            weight = 1.0
            for v, accepted in zip(seeds, outcome):
                weight *= rates[v] if accepted else 1.0 - rates[v]
            if weight == 0.0:
                continue
            accepted_seeds = seeds[np.array(outcome, dtype=bool)]
            total += weight * self.expectation(accepted_seeds, metric)
        return total


def exact_influence(graph: SocialGraph, seeds, p: float, metric: str = "retweeters",
                    reciprocation=None) -> float:
    """One-shot exact expected influence; see ExactCascade for the limits.

    With a reciprocation model, seed-set members are only active in the
    outcomes where they reciprocate.
    """
    cascade = ExactCascade(graph, p)
    if reciprocation is None:
        return cascade.expectation(seeds, metric)
    return cascade.expectation_with_reciprocation(seeds, metric, reciprocation.rates(graph))


def exact_probabilistic_influence(graph: SocialGraph, arc_probs: np.ndarray, seeds,
                                  node_weights: np.ndarray = None) -> float:
    """Exact expected Σ_{v active} w_v with heterogeneous per-arc success
    probabilities (the evaluator the graph-transform identities are checked
    with).

    Probability-1 arcs are applied in every outcome and probability-0 arcs
    never, so only genuinely random arcs are enumerated; arcs whose source
    can never activate are dropped first.  Refuses more than 25 random arcs.
    """
    n = graph.node_count
    if n > MAX_NODES:
        raise ValueError(f"exact enumeration refused: {n} nodes > {MAX_NODES}")
    arc_probs = np.asarray(arc_probs, dtype=np.float64)
    if arc_probs.shape != (graph.arc_count,):
        raise ValueError("arc_probs must align with the graph's arcs")
    if ((arc_probs < 0) | (arc_probs > 1)).any():
        raise ValueError("arc probabilities must lie in [0, 1]")
    seeds = _seed_array(seeds, n)
    if seeds.size == 0:
        return 0.0
    if node_weights is None:
        weight_mask = (np.uint64(1) << np.uint64(n)) - np.uint64(1) if n < 64 else ~np.uint64(0)
    else:
        weight_mask = np.uint64(0)
        for v in np.flatnonzero(np.asarray(node_weights) != 0):
            weight_mask |= np.uint64(1) << np.uint64(v)

    srcs = graph.arc_sources
    dsts = graph.targets

    # restrict to arcs whose source is reachable when every positive arc fires
    potential = np.zeros(n, dtype=bool)
    potential[seeds] = True
    positive = arc_probs > 0
    for _ in range(n):
        spread = potential[srcs] & positive
        before = potential.sum()
        potential[dsts[spread]] = True
        if potential.sum() == before:
            break
    live = positive & potential[srcs]
    certain = [(int(u), int(v)) for u, v in zip(srcs[live & (arc_probs >= 1.0)],
                                                dsts[live & (arc_probs >= 1.0)])]
    random_sel = live & (arc_probs < 1.0)
    random_arcs = list(zip(srcs[random_sel].tolist(), dsts[random_sel].tolist()))
    random_probs = arc_probs[random_sel]
    r = len(random_arcs)
    if r > MAX_ENUM_ARCS:
        raise ValueError(f"exact enumeration refused: {r} random arcs > {MAX_ENUM_ARCS}")

    seed_mask = np.uint64(0)
    for s in seeds:
        seed_mask |= np.uint64(1) << np.uint64(s)

    total = 0.0
    for m0 in range(0, 1 << r, _CHUNK):
        m1 = min(m0 + _CHUNK, 1 << r)
        subset_ids = np.arange(m0, m1, dtype=np.uint64)
        present = [
            ((subset_ids >> np.uint64(idx)) & np.uint64(1)) for idx in range(r)
        ]
        w = np.ones(m1 - m0, dtype=np.float64)
        for idx in range(r):
            pe = float(random_probs[idx])
            w *= np.where(present[idx].astype(bool), pe, 1.0 - pe)
        active = np.full(m1 - m0, seed_mask, dtype=np.uint64)
        changed = True
        while changed:
            changed = False
            for u, v in certain:
                bit_u = (active >> np.uint64(u)) & np.uint64(1)
                new = active | (bit_u << np.uint64(v))
                if not np.array_equal(new, active):
                    active = new
                    changed = True
            for idx, (u, v) in enumerate(random_arcs):
                bit_u = (active >> np.uint64(u)) & np.uint64(1) & present[idx]
                new = active | (bit_u << np.uint64(v))
                if not np.array_equal(new, active):
                    active = new
                    changed = True
        counts = np.bitwise_count(active & weight_mask).astype(np.float64)
        total += float(np.dot(w, counts))
    return total
