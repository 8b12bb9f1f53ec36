"""Monte Carlo influence estimation over a sample bank.

The two objectives:

* retweeters — |reach_set(B)| per sample: everyone the cascade activates,
  including the initially-active seed set B itself.
* readers — |reader_set(reach_set(B))| per sample: everyone who sees the
  tweet, i.e. the active nodes plus their followers on the original arcs.

Seed-set members are treated as active with probability 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .condense import _as_node_array, _reached_components, neighbors_of
from .exact import METRICS, _check_metric, exact_influence  # noqa: F401  (re-exported)
from .samples import SampleBank
from .util import parallel_map

Z95 = 1.96


@dataclass(frozen=True)
class InfluenceEstimate:
    mean: float
    stderr: float
    n_samples: int
    ci95: tuple
    metric: str


def summarize(values: np.ndarray, metric: str) -> InfluenceEstimate:
    """Mean / stderr / 95% CI of per-sample metric values.

    A single sample carries no variance information, so stderr is reported
    as +inf rather than a misleading 0.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    mean = float(values.mean())
    stderr = float("inf") if n == 1 else float(values.std(ddof=1) / np.sqrt(n))
    return InfluenceEstimate(
        mean=mean,
        stderr=stderr,
        n_samples=n,
        ci95=(mean - Z95 * stderr, mean + Z95 * stderr),
        metric=metric,
    )


def _sample_value(dag, graph, seed_nodes: np.ndarray, metric: str) -> float:
    if seed_nodes.size == 0:
        return 0.0
    reached_comps = _reached_components(dag, dag.scc_id[seed_nodes])
    if metric == "retweeters":
        return float(dag.scc_size[reached_comps].sum())
    mask = reached_comps[dag.scc_id]
    active = np.flatnonzero(mask)
    followers = neighbors_of(graph.indptr, graph.targets, active)
    mask[followers] = True
    return float(np.count_nonzero(mask))


def per_sample_values(bank: SampleBank, seed_set, metric: str = "retweeters",
                      threads: int = 1) -> np.ndarray:
    """The raw per-sample metric values for a fixed seed set."""
    _check_metric(metric)
    seed_nodes = _as_node_array(seed_set, bank.parent.node_count)
    seed_nodes = np.unique(seed_nodes)
    graph = bank.parent
    values = parallel_map(
        lambda dag: _sample_value(dag, graph, seed_nodes, metric), bank.samples, threads
    )
    return np.array(values, dtype=np.float64)


def estimate_influence(bank: SampleBank, seed_set, metric: str = "retweeters",
                       threads: int = 1) -> InfluenceEstimate:
    """Monte Carlo estimate of the expected metric when seed_set starts active.

    Raises for unknown node ids; the bank's samples are evaluated in a fixed
    order so the estimate does not depend on the thread count.
    """
    values = per_sample_values(bank, seed_set, metric, threads)
    return summarize(values, metric)
