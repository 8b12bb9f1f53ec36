"""Seed-set selection strategies and their validation oracle.

All estimation-driven strategies share one SampleBank (common random
numbers), so cross-strategy comparisons are not polluted by resampling
noise.  Ties break toward the smaller node id everywhere, which makes
every strategy fully deterministic given its seeds.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from .condense import neighbors_of
from .estimator import InfluenceEstimate, summarize
from .exact import ExactCascade, _check_metric
from .graph import SocialGraph
from .reciprocation import ReciprocationModel
from .samples import SampleBank
from .util import parallel_map


@dataclass
class SelectionResult:
    strategy_name: str
    K: int
    picks: list
    objective_curve: Optional[list] = None  # InfluenceEstimate per prefix
    attempts: Optional[list] = None  # (node, reciprocated?) per proposal
    candidate_pool: Optional[int] = None  # pool size when restricted

    def to_csv(self) -> str:
        """Per-prefix curve as CSV (requires an objective_curve)."""
        if self.objective_curve is None:
            raise ValueError("selection result carries no objective curve")
        lines = ["strategy,K_prefix,mean,stderr,ci_low,ci_high,picks"]
        for i, est in enumerate(self.objective_curve, start=1):
            prefix = " ".join(str(v) for v in self.picks[:i])
            lines.append(
                f"{self.strategy_name},{i},{est.mean:.10g},{est.stderr:.10g},"
                f"{est.ci95[0]:.10g},{est.ci95[1]:.10g},{prefix}"
            )
        return "\n".join(lines) + "\n"


class BankEvaluator:
    """Incremental per-sample cascade state for marginal-gain queries.

    Keeps, per sample, the set of components reached by the committed seed
    set.  A marginal query runs a truncated traversal that stops at already
    reached components, so its cost shrinks as the committed reach grows.
    Generation-stamped scratch arrays avoid reallocating visit marks per
    query.
    """

    def __init__(self, bank: SampleBank, metric: str = "retweeters"):
        _check_metric(metric)
        self.bank = bank
        self.graph = bank.parent
        self.metric = metric
        self._gen = 0
        self._visited = [np.zeros(dag.comp_count, dtype=bool) for dag in bank.samples]
        self._stamp = [np.zeros(dag.comp_count, dtype=np.int64) for dag in bank.samples]
        self._values = np.zeros(len(bank.samples), dtype=np.int64)
        if metric == "readers":
            self._read = [np.zeros(self.graph.node_count, dtype=bool) for _ in bank.samples]
            self._node_stamp = [
                np.zeros(self.graph.node_count, dtype=np.int64) for _ in bank.samples
            ]
            # per-sample component membership lists (CSR over components)
            self._members = []
            for dag in bank.samples:
                order = np.argsort(dag.scc_id, kind="stable").astype(np.int64)
                indptr = np.zeros(dag.comp_count + 1, dtype=np.int64)
                np.cumsum(dag.scc_size, out=indptr[1:])
                self._members.append((indptr, order))

    def _sample_gain(self, idx: int, node: int, commit: bool) -> int:
        dag = self.bank.samples[idx]
        visited, stamp = self._visited[idx], self._stamp[idx]
        comp = dag.scc_id[node]
        if visited[comp]:
            return 0
        gen = self._gen
        stamp[comp] = gen
        frontier = np.array([comp], dtype=np.int64)
        new_comps = [frontier]
        while frontier.size:
            nbrs = np.unique(neighbors_of(dag.comp_indptr, dag.comp_targets, frontier))
            fresh = nbrs[(~visited[nbrs]) & (stamp[nbrs] != gen)]
            stamp[fresh] = gen
            new_comps.append(fresh)
            frontier = fresh
        new_comps = np.concatenate(new_comps)
        if commit:
            visited[new_comps] = True

        if self.metric == "retweeters":
            return int(dag.scc_size[new_comps].sum())

        member_indptr, member_order = self._members[idx]
        new_nodes = neighbors_of(member_indptr, member_order, new_comps)
        touched = np.concatenate(
            [new_nodes, neighbors_of(self.graph.indptr, self.graph.targets, new_nodes)]
        )
        read, node_stamp = self._read[idx], self._node_stamp[idx]
        touched = touched[(~read[touched]) & (node_stamp[touched] != gen)]
        touched = np.unique(touched)
        node_stamp[touched] = gen
        if commit:
            read[touched] = True
        return int(touched.size)

    def marginal(self, node: int, threads: int = 1) -> float:
        """Mean over samples of the metric gain if ``node`` joined the seed set."""
        self._gen += 1
        gains = parallel_map(
            lambda idx: self._sample_gain(idx, node, commit=False),
            range(len(self.bank.samples)),
            threads,
        )
        return float(sum(gains)) / len(gains)

    def commit(self, node: int, threads: int = 1) -> None:
        self._gen += 1
        gains = parallel_map(
            lambda idx: self._sample_gain(idx, node, commit=True),
            range(len(self.bank.samples)),
            threads,
        )
        self._values += np.array(gains, dtype=np.int64)

    def snapshot(self) -> InfluenceEstimate:
        return summarize(self._values.astype(np.float64), self.metric)

    def values(self) -> np.ndarray:
        return self._values.astype(np.float64)


def _resolve_pool(graph: SocialGraph, rates: np.ndarray, candidate_pool) -> np.ndarray:
    """Candidate ids, ascending.  candidate_pool: None (all), an int M
    (top-M by effective degree r_v * d_v), or an explicit id array."""
    if candidate_pool is None:
        return np.arange(graph.node_count, dtype=np.int64)
    if np.isscalar(candidate_pool):
        m = int(candidate_pool)
        effective = rates * graph.out_degree
        order = np.lexsort((np.arange(graph.node_count), -effective))
        return np.sort(order[:m]).astype(np.int64)
    pool = np.unique(np.asarray(candidate_pool, dtype=np.int64))
    if pool.size and (pool.min() < 0 or pool.max() >= graph.node_count):
        raise ValueError("candidate pool contains unknown node ids")
    return pool


def _truncate_k(k: int, limit: int, what: str) -> int:
    if k > limit:
        warnings.warn(f"K={k} exceeds {what} ({limit}); truncating")
        return limit
    return k


def greedy_select(graph: SocialGraph, bank: SampleBank, K: int, metric: str = "retweeters",
                  reciprocation: ReciprocationModel = None, lazy: bool = True,
                  candidate_pool=None, threads: int = 1) -> SelectionResult:
    """Marginal-gain greedy over the bank.

    A candidate's score is r_v times its mean marginal reach given the
    committed seed set — v only contributes if he follows back.  The lazy
    path re-evaluates stale priority-queue entries (valid because pathwise
    marginal gains never grow as the seed set grows) and returns exactly
    the eager picks.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    recip = reciprocation if reciprocation is not None else ReciprocationModel.certain()
    rates = recip.rates(graph)
    candidates = _resolve_pool(graph, rates, candidate_pool)
    k_eff = _truncate_k(K, candidates.size, "candidate count")
    pool_size = None if candidate_pool is None else candidates.size

    evaluator = BankEvaluator(bank, metric)
    picks: list = []
    curve: list = []

    if lazy:
        heap = []
        fresh_at = {}
        for v in candidates:
            gain = rates[v] * evaluator.marginal(int(v), threads)
            heap.append((-gain, int(v)))
            fresh_at[int(v)] = 0
        heapq.heapify(heap)
        step = 0
        while len(picks) < k_eff and heap:
            neg_gain, v = heapq.heappop(heap)
            if fresh_at[v] != step:
                gain = rates[v] * evaluator.marginal(v, threads)
                fresh_at[v] = step
                heapq.heappush(heap, (-gain, v))
                continue
            evaluator.commit(v, threads)
            picks.append(v)
            curve.append(evaluator.snapshot())
            step += 1
    else:
        remaining = [int(v) for v in candidates]
        for _ in range(k_eff):
            gains = [rates[v] * evaluator.marginal(v, threads) for v in remaining]
            best = int(np.argmax(gains))
            v = remaining.pop(best)
            evaluator.commit(v, threads)
            picks.append(v)
            curve.append(evaluator.snapshot())

    return SelectionResult(
        strategy_name="greedy",
        K=K,
        picks=picks,
        objective_curve=curve,
        candidate_pool=pool_size,
    )


def high_degree_select(graph: SocialGraph, K: int,
                       reciprocation: ReciprocationModel = None) -> SelectionResult:
    """Rank by effective degree r_v * d_v (follower count weighted by the
    follow-back probability), descending; plain degree order when
    reciprocation is certain."""
    if K < 1:
        raise ValueError("K must be >= 1")
    recip = reciprocation if reciprocation is not None else ReciprocationModel.certain()
    effective = recip.rates(graph) * graph.out_degree
    k_eff = _truncate_k(K, graph.node_count, "node count")
    order = np.lexsort((np.arange(graph.node_count), -effective))
    return SelectionResult(
        strategy_name="high_degree",
        K=K,
        picks=[int(v) for v in order[:k_eff]],
    )


def random_select(graph: SocialGraph, K: int, seed: int) -> SelectionResult:
    """Uniform sample of K distinct nodes; deterministic for a fixed seed."""
    if K < 1:
        raise ValueError("K must be >= 1")
    k_eff = _truncate_k(K, graph.node_count, "node count")
    rng = np.random.default_rng(seed)
    picks = rng.choice(graph.node_count, size=k_eff, replace=False)
    return SelectionResult(
        strategy_name="random",
        K=K,
        picks=[int(v) for v in picks],
    )


def dynamic_greedy_simulate(graph: SocialGraph, bank: SampleBank, K: int,
                            reciprocation: ReciprocationModel = None, seed: int = 0,
                            max_attempts: int = None, metric: str = "retweeters",
                            candidate_pool=None, threads: int = 1) -> SelectionResult:
    """Online greedy without knowing who reciprocates.

    Repeatedly proposes the best-marginal-gain candidate as if he would
    reciprocate, then samples his actual response R_v ~ Bernoulli(r_v) —
    once per node, so a refusal is final and the node is never re-proposed.
    Stops at K acceptances, max_attempts proposals, or candidate exhaustion.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    recip = reciprocation if reciprocation is not None else ReciprocationModel.certain()
    rates = recip.rates(graph)
    responses = recip.sample(graph, seed)
    candidates = _resolve_pool(graph, rates, candidate_pool)
    if max_attempts is None:
        max_attempts = int(candidates.size)
    if max_attempts < K:
        raise ValueError(f"max_attempts={max_attempts} < K={K}")

    evaluator = BankEvaluator(bank, metric)
    heap = []
    fresh_at = {}
    for v in candidates:
        gain = evaluator.marginal(int(v), threads)
        heap.append((-gain, int(v)))
        fresh_at[int(v)] = 0
    heapq.heapify(heap)

    picks: list = []
    curve: list = []
    attempts: list = []
    commits = 0
    while len(picks) < K and len(attempts) < max_attempts and heap:
        neg_gain, v = heapq.heappop(heap)
        if fresh_at[v] != commits:
            gain = evaluator.marginal(v, threads)
            fresh_at[v] = commits
            heapq.heappush(heap, (-gain, v))
            continue
        accepted = bool(responses[v])
        attempts.append((v, accepted))
        if accepted:
            evaluator.commit(v, threads)
            picks.append(v)
            curve.append(evaluator.snapshot())
            commits += 1

    return SelectionResult(
        strategy_name="dynamic_greedy",
        K=K,
        picks=picks,
        objective_curve=curve,
        attempts=attempts,
        candidate_pool=None if candidate_pool is None else candidates.size,
    )


def brute_force_optimal(graph: SocialGraph, K: int, p: float, metric: str = "retweeters",
                        reciprocation: ReciprocationModel = None):
    """Exhaustive exact optimum over all K-subsets; the validation oracle
    for the greedy approximation bound.  Refuses instances with more than
    10^6 candidate subsets."""
    if K < 0 or K > graph.node_count:
        raise ValueError(f"K={K} out of range for {graph.node_count} nodes")
    if comb(graph.node_count, K) > 10 ** 6:
        raise ValueError("brute force refused: more than 10^6 candidate subsets")
    cascade = ExactCascade(graph, p)
    rates = None if reciprocation is None else reciprocation.rates(graph)
    best_set, best_value = (), -1.0
    for combo in combinations(range(graph.node_count), K):
        if rates is None:
            value = cascade.expectation(combo, metric)
        else:
            value = cascade.expectation_with_reciprocation(combo, metric, rates)
        if value > best_value:
            best_set, best_value = combo, value
    return list(best_set), best_value
