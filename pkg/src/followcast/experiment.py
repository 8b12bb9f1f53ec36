"""Configuration-driven experiment runner.

One experiment sweeps (p, metric, strategy) cells over a single graph and
emits a flat CSV of objective-curve points plus a JSON manifest recording
everything needed to reproduce the run.  Elapsed-time columns aside, the
output bytes are a pure function of (config, seed) at any thread count.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import __version__
from .branching import extinction_probability, offspring_distribution, sample_size_estimate
from .estimator import summarize
from .graph import (
    PowerLawSpec,
    SocialGraph,
    degree_stats,
    generate_configuration_graph,
    load_binary_cache,
    load_edgelist,
)
from .reciprocation import parse_reciprocation
from .samples import build_sample_bank
from .strategies import (
    BankEvaluator,
    dynamic_greedy_simulate,
    greedy_select,
    high_degree_select,
    random_select,
)
from .util import stable_offset

CSV_HEADER = "strategy,p,metric,K,mean,stderr,ci_low,ci_high,includes_seed_set,elapsed_ms"
DEFAULT_K_GRID = (1, 2, 5, 10, 20, 50, 100, 200)
STRATEGIES = ("greedy", "high_degree", "random", "dynamic_greedy")
AUTO_FLOOR = 30
AUTO_CAP = 200
AUTO_EPS = 0.2
AUTO_CONFIDENCE = 0.95


@dataclass
class ExperimentConfig:
    graph_path: str = None          # text edgelist
    cache_path: str = None          # binary adjacency cache
    synthetic: str = None           # "exponent,n,minDeg,maxDeg"
    orientation: str = "propagation"
    p_list: tuple = (0.1,)
    k_max: int = 20
    k_grid: tuple = DEFAULT_K_GRID
    strategies: tuple = ("greedy", "high_degree", "random")
    metrics: tuple = ("retweeters",)
    recip: str = "certain"
    samples: str = "auto"           # "auto" or an integer count
    seed: int = 0
    out: str = None
    threads: int = 1
    candidate_pool: int = None      # top-M greedy pool; None = all nodes
    auto_floor: int = AUTO_FLOOR
    auto_cap: int = AUTO_CAP

    def validate(self):
        sources = [s for s in (self.graph_path, self.cache_path, self.synthetic) if s]
        if len(sources) != 1:
            raise ValueError("exactly one graph source (graph|cache|synthetic) is required")
        if not self.p_list:
            raise ValueError("p_list must not be empty")
        for p in self.p_list:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"p values must lie in (0, 1], got {p}")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if not self.strategies or not self.metrics:
            raise ValueError("need at least one strategy and one metric")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}; expected one of {STRATEGIES}")
        for m in self.metrics:
            if m not in ("retweeters", "readers"):
                raise ValueError(f"unknown metric {m!r}")
        if self.samples != "auto":
            if int(self.samples) < 1:
                raise ValueError("samples must be >= 1 or 'auto'")
        parse_reciprocation(self.recip)


_LIST_KEYS = {"p_list", "k_grid", "strategies", "metrics"}
_INT_KEYS = {"k_max", "seed", "threads", "candidate_pool", "auto_floor", "auto_cap"}


def parse_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment; lists are comma-separated."""
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def config_from_mapping(values: dict) -> ExperimentConfig:
    kwargs = {}
    aliases = {"graph": "graph_path", "cache": "cache_path", "p": "p_list"}
    valid = set(ExperimentConfig.__dataclass_fields__)
    for key, value in values.items():
        key = aliases.get(key, key)
        if key not in valid:
            raise ValueError(f"unknown config key {key!r}")
        if value is None:
            continue
        if key in _LIST_KEYS:
            parts = value if isinstance(value, (list, tuple)) else str(value).split(",")
            if key == "p_list":
                value = tuple(float(x) for x in parts)
            elif key == "k_grid":
                value = tuple(int(x) for x in parts)
            else:
                value = tuple(str(x) for x in parts)
        elif key in _INT_KEYS:
            value = int(value)
        kwargs[key] = value
    return ExperimentConfig(**kwargs)


def resolve_graph(config: ExperimentConfig) -> SocialGraph:
    if config.graph_path:
        return load_edgelist(config.graph_path, orientation=config.orientation)
    if config.cache_path:
        return load_binary_cache(config.cache_path)
    parts = config.synthetic.split(",")
    if len(parts) != 4:
        raise ValueError("synthetic spec must be exponent,n,minDeg,maxDeg")
    exponent, n, lo, hi = float(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
    spec = PowerLawSpec(exponent=exponent, min_degree=lo, max_degree=hi)
    return generate_configuration_graph(spec, n, seed=config.seed)


def auto_sample_count(stats, p: float, floor: int = AUTO_FLOOR, cap: int = AUTO_CAP) -> dict:
    """The 'auto' policy: clamp(analytic recommendation, floor, cap).

    The recommendation comes from the two-point cascade model at the
    default precision (20% relative CI half-width, 95% confidence).
    """
    pmf = offspring_distribution(stats, p)
    p_ext = extinction_probability(pmf)
    recommended = sample_size_estimate(
        stats.node_count, p_ext, AUTO_EPS, AUTO_CONFIDENCE
    )
    used = int(min(max(recommended, floor), cap))
    return {"p_ext": p_ext, "recommended": int(recommended), "used": used}


def _run_strategy(graph, bank, strategy, k_eff, metric, recip, cell_seed, config):
    if strategy == "greedy":
        return greedy_select(
            graph, bank, k_eff, metric=metric, reciprocation=recip,
            candidate_pool=config.candidate_pool, threads=config.threads,
        )
    if strategy == "high_degree":
        return high_degree_select(graph, k_eff, reciprocation=recip)
    if strategy == "random":
        return random_select(graph, k_eff, seed=cell_seed)
    return dynamic_greedy_simulate(
        graph, bank, k_eff, reciprocation=recip, seed=cell_seed,
        candidate_pool=config.candidate_pool, threads=config.threads,
    )


def _curve_rows(bank, picks, grid, p, metric, strategy, cell_start):
    """Two CSV rows (seed set counted / not counted) per reported prefix size."""
    evaluator = BankEvaluator(bank, metric)
    rows = []
    committed = 0

    def emit(prefix_len):
        estimate = summarize(evaluator.values(), metric)
        elapsed = int((time.monotonic() - cell_start) * 1000)
        for include in (True, False):
            shift = 0 if include else prefix_len
            rows.append({
                "strategy": strategy,
                "p": p,
                "metric": metric,
                "K": prefix_len,
                "mean": estimate.mean - shift,
                "stderr": estimate.stderr,
                "ci_low": estimate.ci95[0] - shift,
                "ci_high": estimate.ci95[1] - shift,
                "includes_seed_set": include,
                "elapsed_ms": elapsed,
            })

    for k in grid:
        while committed < k:
            evaluator.commit(picks[committed])
            committed += 1
        emit(k)
    return rows


def run_experiment(config: ExperimentConfig, graph: SocialGraph = None) -> dict:
    """Execute every (p, metric, strategy) cell; returns rows + manifest.

    On a mid-run failure the rows produced so far are returned with
    status="partial" and the error recorded in the manifest.
    """
    config.validate()
    if graph is None:
        graph = resolve_graph(config)
    stats = degree_stats(graph)
    recip = parse_reciprocation(config.recip)

    manifest = {
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in asdict(config).items()},
        "graph_fingerprint": graph.fingerprint(),
        "node_count": graph.node_count,
        "arc_count": graph.arc_count,
        "package_version": __version__,
        "base_seed": config.seed,
        "per_p": {},
        "cells": {},
        "status": "complete",
    }
    rows = []
    try:
        for p in config.p_list:
            if config.samples == "auto":
                policy = auto_sample_count(stats, p, config.auto_floor, config.auto_cap)
            else:
                n = int(config.samples)
                policy = {"p_ext": None, "recommended": n, "used": n}
            bank_seed = config.seed + stable_offset("bank", f"{p:.12g}") % (1 << 32)
            bank = build_sample_bank(graph, p, policy["used"], bank_seed,
                                     threads=config.threads)
            manifest["per_p"][f"{p:.12g}"] = {
                "effective_density": stats.mean_out_degree * p,
                "n_samples": policy["used"],
                "n_recommended": policy["recommended"],
                "p_ext": policy["p_ext"],
                "bank_seed": bank_seed,
            }
            grid = sorted({k for k in config.k_grid if 0 <= k <= config.k_max})
            for metric in config.metrics:
                for strategy in config.strategies:
                    cell_start = time.monotonic()
                    cell_seed = config.seed + stable_offset(
                        "cell", f"{p:.12g}", metric, strategy) % (1 << 32)
                    result = _run_strategy(graph, bank, strategy, config.k_max,
                                           metric, recip, cell_seed, config)
                    cell_grid = [k for k in grid if k <= len(result.picks)]
                    rows.extend(_curve_rows(bank, result.picks, cell_grid, p, metric,
                                            strategy, cell_start))
                    manifest["cells"][f"{strategy}/{metric}/p={p:.12g}"] = {
                        "seed": cell_seed,
                        "picks": [int(v) for v in result.picks[:50]],
                        "n_picks": len(result.picks),
                        "candidate_pool": result.candidate_pool,
                    }
            del bank
    except Exception as exc:  # noqa: BLE001 - partial results are part of the contract
        manifest["status"] = "partial"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
    manifest["row_count"] = len(rows)
    return {"rows": rows, "manifest": manifest, "status": manifest["status"]}


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in rows:
        buf.write(
            f"{row['strategy']},{row['p']:.12g},{row['metric']},{row['K']},"
            f"{row['mean']:.10g},{row['stderr']:.10g},{row['ci_low']:.10g},"
            f"{row['ci_high']:.10g},{str(row['includes_seed_set']).lower()},"
            f"{row['elapsed_ms']}\n"
        )
    return buf.getvalue()


def manifest_to_json(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n"
