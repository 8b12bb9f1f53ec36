"""HTTP service exposing the simulation engine.

Graphs and sample banks are expensive, reusable state: the service keeps
them in small in-memory registries keyed by content (graph fingerprint;
(graph, p, n, seed) for banks), so repeated estimates and selections over
the same structures don't pay the build cost again.  The CLI talks to this
app in-process by default and over HTTP with --server.

File paths in requests (edgelist, cache) are resolved on the service's own
filesystem.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import List, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .branching import (
    critical_probability,
    extinction_probability,
    offspring_distribution,
    pmf_mean,
    sample_size_estimate,
)
from .estimator import estimate_influence
from .experiment import (
    ExperimentConfig,
    auto_sample_count,
    config_from_mapping,
    run_experiment,
)
from .graph import (
    PowerLawSpec,
    SocialGraph,
    degree_stats,
    generate_configuration_graph,
    load_binary_cache,
    load_edgelist,
)
from .reciprocation import parse_reciprocation
from .samples import SampleBank, build_sample_bank
from .strategies import (
    BankEvaluator,
    dynamic_greedy_simulate,
    greedy_select,
    high_degree_select,
    random_select,
)

GRAPH_CACHE_SLOTS = 8
BANK_CACHE_SLOTS = 4


class _Registry:
    """Tiny LRU keyed by content identity."""

    def __init__(self, slots: int):
        self.slots = slots
        self._items: OrderedDict = OrderedDict()

    def get(self, key: str):
        if key not in self._items:
            return None
        self._items.move_to_end(key)
        return self._items[key]

    def put(self, key: str, value) -> None:
        self._items[key] = value
        self._items.move_to_end(key)
        while len(self._items) > self.slots:
            self._items.popitem(last=False)


class GraphSource(BaseModel):
    kind: Literal["edgelist", "cache", "synthetic"]
    path: Optional[str] = None
    orientation: Literal["propagation", "follows"] = "propagation"
    exponent: Optional[float] = None
    node_count: Optional[int] = None
    min_degree: Optional[int] = None
    max_degree: Optional[int] = None
    seed: int = 0


class GraphInfo(BaseModel):
    graph_id: str
    node_count: int
    arc_count: int
    mean_out_degree: float
    second_moment_out_degree: float
    max_out_degree: int


class BankRequest(BaseModel):
    graph_id: str
    p: float = Field(gt=0.0, le=1.0)
    n_samples: int = Field(ge=1)
    base_seed: int = 0
    threads: int = 1


class BankInfo(BaseModel):
    bank_id: str
    graph_id: str
    p: float
    n_samples: int
    base_seed: int


class EstimateRequest(BaseModel):
    bank_id: str
    nodes: List[int]
    metric: Literal["retweeters", "readers"] = "retweeters"
    threads: int = 1


class EstimateResponse(BaseModel):
    mean: float
    stderr: float
    n_samples: int
    ci_low: float
    ci_high: float
    metric: str


class SelectRequest(BaseModel):
    graph_id: str
    strategy: Literal["greedy", "high_degree", "random", "dynamic_greedy"]
    k: int = Field(ge=1)
    metric: Literal["retweeters", "readers"] = "retweeters"
    recip: str = "certain"
    seed: int = 0
    p: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    n_samples: Optional[int] = Field(default=None, ge=1)
    candidate_pool: Optional[int] = None
    lazy: bool = True
    threads: int = 1


class CurvePoint(BaseModel):
    k_prefix: int
    mean: float
    stderr: float
    ci_low: float
    ci_high: float


class SelectResponse(BaseModel):
    strategy: str
    picks: List[int]
    curve: Optional[List[CurvePoint]] = None
    attempts: Optional[List[List[int]]] = None  # (node, reciprocated as 0/1)
    candidate_pool: Optional[int] = None


class AnalyzeRequest(BaseModel):
    graph_id: str
    p_list: List[float]
    eps: float = 0.2
    confidence: float = 0.95


class AnalyzeRow(BaseModel):
    p: float
    mean_offspring: float
    p_ext: float
    recommended_n: int
    auto_n: int
    effective_density: float


class AnalyzeResponse(BaseModel):
    graph_id: str
    node_count: int
    arc_count: int
    mean_out_degree: float
    second_moment_out_degree: float
    critical_probability: float
    rows: List[AnalyzeRow]


class ExperimentRequest(BaseModel):
    """Flat experiment config; same keys as the key=value config file."""

    config: dict


def create_app() -> FastAPI:
    app = FastAPI(title="followcast", version=__version__)
    graphs = _Registry(GRAPH_CACHE_SLOTS)
    banks = _Registry(BANK_CACHE_SLOTS)

    def _get_graph(graph_id: str) -> SocialGraph:
        graph = graphs.get(graph_id)
        if graph is None:
            raise HTTPException(status_code=404, detail=f"unknown graph {graph_id!r}")
        return graph

    def _get_bank(bank_id: str) -> SampleBank:
        bank = banks.get(bank_id)
        if bank is None:
            raise HTTPException(status_code=404, detail=f"unknown bank {bank_id!r}")
        return bank

    def _graph_info(graph: SocialGraph) -> GraphInfo:
        stats = degree_stats(graph)
        return GraphInfo(
            graph_id=graph.fingerprint(),
            node_count=graph.node_count,
            arc_count=graph.arc_count,
            mean_out_degree=stats.mean_out_degree,
            second_moment_out_degree=stats.second_moment_out_degree,
            max_out_degree=stats.max_out_degree,
        )

    def _build_bank(graph: SocialGraph, p: float, n_samples: int, base_seed: int,
                    threads: int) -> tuple:
        bank_id = f"{graph.fingerprint()[:16]}:p={p:.12g}:n={n_samples}:s={base_seed}"
        bank = banks.get(bank_id)
        if bank is None:
            bank = build_sample_bank(graph, p, n_samples, base_seed, threads=threads)
            banks.put(bank_id, bank)
        return bank_id, bank

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/graphs", response_model=GraphInfo)
    def register_graph(source: GraphSource):
        try:
            if source.kind == "edgelist":
                if not source.path:
                    raise ValueError("edgelist source needs a path")
                graph = load_edgelist(source.path, orientation=source.orientation)
            elif source.kind == "cache":
                if not source.path:
                    raise ValueError("cache source needs a path")
                graph = load_binary_cache(source.path)
            else:
                if None in (source.exponent, source.node_count,
                            source.min_degree, source.max_degree):
                    raise ValueError(
                        "synthetic source needs exponent, node_count, min_degree, max_degree"
                    )
                spec = PowerLawSpec(source.exponent, source.min_degree, source.max_degree)
                graph = generate_configuration_graph(spec, source.node_count, source.seed)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        info = _graph_info(graph)
        graphs.put(info.graph_id, graph)
        return info

    @app.get("/graphs/{graph_id}/stats", response_model=GraphInfo)
    def graph_stats(graph_id: str):
        return _graph_info(_get_graph(graph_id))

    @app.post("/banks", response_model=BankInfo)
    def make_bank(request: BankRequest):
        graph = _get_graph(request.graph_id)
        bank_id, bank = _build_bank(
            graph, request.p, request.n_samples, request.base_seed, request.threads
        )
        return BankInfo(
            bank_id=bank_id,
            graph_id=request.graph_id,
            p=bank.p,
            n_samples=bank.n_samples,
            base_seed=bank.base_seed,
        )

    @app.post("/estimate", response_model=EstimateResponse)
    def estimate(request: EstimateRequest):
        bank = _get_bank(request.bank_id)
        try:
            result = estimate_influence(bank, request.nodes, request.metric,
                                        threads=request.threads)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return EstimateResponse(
            mean=result.mean,
            stderr=result.stderr,
            n_samples=result.n_samples,
            ci_low=result.ci95[0],
            ci_high=result.ci95[1],
            metric=result.metric,
        )

    @app.post("/select", response_model=SelectResponse)
    def select(request: SelectRequest):
        graph = _get_graph(request.graph_id)
        try:
            recip = parse_reciprocation(request.recip)
            needs_bank = request.strategy in ("greedy", "dynamic_greedy")
            bank = None
            if request.p is not None and request.n_samples is not None:
                _, bank = _build_bank(graph, request.p, request.n_samples,
                                      request.seed, request.threads)
            if needs_bank and bank is None:
                raise ValueError(f"strategy {request.strategy} needs p and n_samples")
            if request.strategy == "greedy":
                result = greedy_select(
                    graph, bank, request.k, metric=request.metric, reciprocation=recip,
                    lazy=request.lazy, candidate_pool=request.candidate_pool,
                    threads=request.threads,
                )
            elif request.strategy == "dynamic_greedy":
                result = dynamic_greedy_simulate(
                    graph, bank, request.k, reciprocation=recip, seed=request.seed,
                    metric=request.metric, candidate_pool=request.candidate_pool,
                    threads=request.threads,
                )
            elif request.strategy == "high_degree":
                result = high_degree_select(graph, request.k, reciprocation=recip)
            else:
                result = random_select(graph, request.k, seed=request.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        curve = result.objective_curve
        if curve is None and bank is not None and result.picks:
            evaluator = BankEvaluator(bank, request.metric)
            curve = []
            for v in result.picks:
                evaluator.commit(v, request.threads)
                curve.append(evaluator.snapshot())
        points = None
        if curve is not None:
            points = [
                CurvePoint(k_prefix=i, mean=est.mean, stderr=est.stderr,
                           ci_low=est.ci95[0], ci_high=est.ci95[1])
                for i, est in enumerate(curve, start=1)
            ]
        attempts = None
        if result.attempts is not None:
            attempts = [[int(node), int(ok)] for node, ok in result.attempts]
        return SelectResponse(
            strategy=result.strategy_name,
            picks=[int(v) for v in result.picks],
            curve=points,
            attempts=attempts,
            candidate_pool=result.candidate_pool,
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest):
        graph = _get_graph(request.graph_id)
        stats = degree_stats(graph)
        try:
            p_c = critical_probability(stats)
            rows = []
            for p in request.p_list:
                pmf = offspring_distribution(stats, p)
                p_ext = extinction_probability(pmf)
                recommended = sample_size_estimate(
                    stats.node_count, p_ext, request.eps, request.confidence
                )
                auto = auto_sample_count(stats, p)
                rows.append(AnalyzeRow(
                    p=p,
                    mean_offspring=pmf_mean(pmf),
                    p_ext=p_ext,
                    recommended_n=recommended,
                    auto_n=auto["used"],
                    effective_density=stats.mean_out_degree * p,
                ))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return AnalyzeResponse(
            graph_id=request.graph_id,
            node_count=stats.node_count,
            arc_count=stats.arc_count,
            mean_out_degree=stats.mean_out_degree,
            second_moment_out_degree=stats.second_moment_out_degree,
            critical_probability=p_c,
            rows=rows,
        )

    @app.post("/experiment")
    def experiment(request: ExperimentRequest):
        try:
            config = config_from_mapping(request.config)
            config.validate()
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        graph = None
        if config.synthetic:
            # synthetic graphs are cheap to fingerprint and worth caching too
            probe = resolve_graph_cached(config)
            graph = probe
        result = run_experiment(config, graph=graph)
        return result

    def resolve_graph_cached(config: ExperimentConfig) -> SocialGraph:
        from .experiment import resolve_graph

        key = f"synthetic:{config.synthetic}:seed={config.seed}"
        graph = graphs.get(key)
        if graph is None:
            graph = resolve_graph(config)
            graphs.put(key, graph)
        return graph

    return app


app = create_app()
