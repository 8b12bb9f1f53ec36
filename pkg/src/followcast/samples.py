"""Banks of pruned-and-condensed cascade samples.

A SampleBank fixes (graph, p, base_seed, n) and holds the n condensations;
sample i uses seed base_seed + i.  All estimation and selection work runs
against a shared bank so that strategies are compared under common random
numbers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .condense import CondensedDag, condense
from .graph import SocialGraph
from .prune import prune
from .util import parallel_map


@dataclass(frozen=True)
class SampleBank:
    parent: SocialGraph
    p: float
    base_seed: int
    seeds: np.ndarray
    samples: list  # list[CondensedDag], aligned with seeds
    graph_fingerprint: str

    @property
    def n_samples(self) -> int:
        return len(self.samples)


def _cache_path(cache_dir: str, fingerprint: str, p: float, seed: int) -> str:
    return os.path.join(cache_dir, f"{fingerprint[:16]}_p{p:.10g}_s{seed}.npz")


def save_condensed(dag: CondensedDag, path: str) -> None:
    np.savez_compressed(
        path,
        node_count=np.int64(dag.node_count),
        comp_count=np.int64(dag.comp_count),
        scc_id=dag.scc_id,
        scc_size=dag.scc_size,
        comp_indptr=dag.comp_indptr,
        comp_targets=dag.comp_targets,
    )


def load_condensed(path: str) -> CondensedDag:
    with np.load(path) as data:
        dag = CondensedDag(
            node_count=int(data["node_count"]),
            comp_count=int(data["comp_count"]),
            scc_id=data["scc_id"],
            scc_size=data["scc_size"],
            comp_indptr=data["comp_indptr"],
            comp_targets=data["comp_targets"],
        )
    if dag.scc_id.size != dag.node_count or dag.scc_size.size != dag.comp_count:
        raise ValueError(f"corrupt sample cache file {path}")
    return dag


def build_sample_bank(
    graph: SocialGraph,
    p: float,
    n_samples: int,
    base_seed: int,
    threads: int = 1,
    cache_dir: str = None,
) -> SampleBank:
    """Prune + condense n_samples independent cascade samples.

    With cache_dir set, each sample is loaded from disk when a file for
    (graph fingerprint, p, seed) exists and written there otherwise.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    fingerprint = graph.fingerprint()
    seeds = np.arange(base_seed, base_seed + n_samples, dtype=np.int64)

    def one_sample(seed: int) -> CondensedDag:
        if cache_dir is not None:
            path = _cache_path(cache_dir, fingerprint, p, int(seed))
            if os.path.exists(path):
                return load_condensed(path)
        dag = condense(prune(graph, p, int(seed)))
        if cache_dir is not None:
            os.makedirs(cache_dir, exist_ok=True)
            save_condensed(dag, path)
        return dag

    samples = parallel_map(one_sample, [int(s) for s in seeds], threads)
    return SampleBank(
        parent=graph,
        p=p,
        base_seed=base_seed,
        seeds=seeds,
        samples=samples,
        graph_fingerprint=fingerprint,
    )
