"""Command-line interface.

Every estimation/selection command is a thin client of the HTTP service:
by default the app is driven in-process (no server to start), and with
--server URL the same requests go to a remote instance.  Commands that
only produce local artifacts (generate, prune-cache) call the library
directly.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiment import (
    CSV_HEADER,
    config_from_mapping,
    manifest_to_json,
    parse_config_file,
    rows_to_csv,
)
from .graph import PowerLawSpec, generate_configuration_graph, save_binary_cache, save_edgelist
from .samples import build_sample_bank


class ServiceClient:
    """Uniform JSON transport: in-process app by default, HTTP with a URL."""

    def __init__(self, server: str = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=3600.0)
        else:
            from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def request(self, method: str, path: str, payload=None) -> dict:
        response = self._client.request(method, path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except Exception:  # noqa: BLE001 - error bodies may not be JSON
                detail = response.text
            raise RuntimeError(f"service error {response.status_code}: {detail}")
        return response.json()

    def post(self, path: str, payload: dict) -> dict:
        return self.request("POST", path, payload)

    def get(self, path: str) -> dict:
        return self.request("GET", path)


def _graph_source_payload(args) -> dict:
    sources = [s for s in (args.graph, getattr(args, "cache", None), args.synthetic) if s]
    if len(sources) != 1:
        raise RuntimeError("exactly one of --graph, --cache, --synthetic is required")
    if args.graph:
        return {"kind": "edgelist", "path": args.graph,
                "orientation": getattr(args, "orientation", "propagation")}
    if getattr(args, "cache", None):
        return {"kind": "cache", "path": args.cache}
    parts = args.synthetic.split(",")
    if len(parts) != 4:
        raise RuntimeError("--synthetic takes exponent,n,minDeg,maxDeg")
    return {
        "kind": "synthetic",
        "exponent": float(parts[0]),
        "node_count": int(parts[1]),
        "min_degree": int(parts[2]),
        "max_degree": int(parts[3]),
        "seed": getattr(args, "seed", 0) or 0,
    }


def _register_graph(client: ServiceClient, args) -> dict:
    return client.post("/graphs", _graph_source_payload(args))


def _resolve_samples(client: ServiceClient, graph_id: str, p: float, samples: str) -> int:
    if samples != "auto":
        return int(samples)
    analysis = client.post("/analyze", {"graph_id": graph_id, "p_list": [p]})
    return analysis["rows"][0]["auto_n"]


def _write_or_print(text: str, out: str = None) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_stats(client: ServiceClient, args) -> int:
    info = _register_graph(client, args)
    print(f"N={info['node_count']}")
    print(f"E={info['arc_count']}")
    print(f"<k>={info['mean_out_degree']:.10g}")
    print(f"<k^2>={info['second_moment_out_degree']:.10g}")
    print(f"max_k={info['max_out_degree']}")
    return 0


def cmd_generate(args) -> int:
    parts = args.synthetic.split(",")
    if len(parts) != 4:
        raise RuntimeError("--synthetic takes exponent,n,minDeg,maxDeg")
    spec = PowerLawSpec(float(parts[0]), int(parts[2]), int(parts[3]))
    graph = generate_configuration_graph(spec, int(parts[1]), seed=args.seed)
    if args.out.endswith(".bin"):
        save_binary_cache(graph, args.out)
    else:
        save_edgelist(graph, args.out)
    print(f"wrote {graph.node_count} nodes, {graph.arc_count} arcs to {args.out}")
    return 0


def cmd_prune_cache(args) -> int:
    from .experiment import ExperimentConfig, resolve_graph

    config = ExperimentConfig(graph_path=args.graph, cache_path=args.cache,
                              synthetic=args.synthetic, orientation=args.orientation,
                              seed=args.seed)
    graph = resolve_graph(config)
    bank = build_sample_bank(graph, args.p, int(args.samples), args.seed,
                             threads=args.threads, cache_dir=args.out)
    print(f"cached {bank.n_samples} condensed samples for p={args.p:g} in {args.out}")
    return 0


def cmd_select(client: ServiceClient, args) -> int:
    info = _register_graph(client, args)
    payload = {
        "graph_id": info["graph_id"],
        "strategy": args.strategy,
        "k": args.k,
        "metric": args.metric,
        "recip": args.recip,
        "seed": args.seed,
        "threads": args.threads,
    }
    if args.candidate_pool is not None:
        payload["candidate_pool"] = args.candidate_pool
    if args.p is not None:
        payload["p"] = args.p
        payload["n_samples"] = _resolve_samples(client, info["graph_id"], args.p, args.samples)
    result = client.post("/select", payload)
    print("picks: " + " ".join(str(v) for v in result["picks"]))
    if result.get("attempts"):
        accepted = sum(ok for _, ok in result["attempts"])
        print(f"attempts: {len(result['attempts'])} ({accepted} reciprocated)")
    if result.get("curve"):
        lines = ["strategy,K_prefix,mean,stderr,ci_low,ci_high,picks"]
        for point in result["curve"]:
            prefix = " ".join(str(v) for v in result["picks"][: point["k_prefix"]])
            lines.append(
                f"{result['strategy']},{point['k_prefix']},{point['mean']:.10g},"
                f"{point['stderr']:.10g},{point['ci_low']:.10g},{point['ci_high']:.10g},"
                f"{prefix}"
            )
        _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_estimate(client: ServiceClient, args) -> int:
    info = _register_graph(client, args)
    n_samples = _resolve_samples(client, info["graph_id"], args.p, args.samples)
    bank = client.post("/banks", {
        "graph_id": info["graph_id"],
        "p": args.p,
        "n_samples": n_samples,
        "base_seed": args.seed,
        "threads": args.threads,
    })
    result = client.post("/estimate", {
        "bank_id": bank["bank_id"],
        "nodes": args.nodes,
        "metric": args.metric,
        "threads": args.threads,
    })
    print(f"metric={result['metric']}")
    print(f"mean={result['mean']:.10g}")
    print(f"stderr={result['stderr']:.10g}")
    print(f"ci95=[{result['ci_low']:.10g}, {result['ci_high']:.10g}]")
    print(f"n_samples={result['n_samples']}")
    return 0


def cmd_analyze(client: ServiceClient, args) -> int:
    info = _register_graph(client, args)
    p_list = [float(x) for x in args.p.split(",")]
    result = client.post("/analyze", {
        "graph_id": info["graph_id"],
        "p_list": p_list,
        "eps": args.eps,
        "confidence": args.confidence,
    })
    print(f"N={result['node_count']} E={result['arc_count']} "
          f"<k>={result['mean_out_degree']:.10g} <k^2>={result['second_moment_out_degree']:.10g}")
    print(f"p_c={result['critical_probability']:.10g}")
    header = f"{'p':>12} {'m':>12} {'p_ext':>12} {'rec_n':>8} {'auto_n':>8} {'density':>10}"
    print(header)
    csv_lines = ["p,mean_offspring,p_ext,recommended_n,auto_n,effective_density"]
    for row in result["rows"]:
        print(f"{row['p']:>12.6g} {row['mean_offspring']:>12.6g} {row['p_ext']:>12.6g} "
              f"{row['recommended_n']:>8} {row['auto_n']:>8} {row['effective_density']:>10.4g}")
        csv_lines.append(
            f"{row['p']:.12g},{row['mean_offspring']:.10g},{row['p_ext']:.10g},"
            f"{row['recommended_n']},{row['auto_n']},{row['effective_density']:.10g}"
        )
    if args.out:
        _write_or_print("\n".join(csv_lines) + "\n", args.out)
    return 0


def cmd_experiment(client: ServiceClient, args) -> int:
    values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "graph": args.graph, "cache": args.cache, "synthetic": args.synthetic,
        "orientation": args.orientation, "p": args.p, "k_max": args.k,
        "k_grid": args.k_grid, "strategies": args.strategy, "metrics": args.metric,
        "recip": args.recip, "samples": args.samples, "seed": args.seed,
        "threads": args.threads, "candidate_pool": args.candidate_pool,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    config = config_from_mapping(values)  # validates key names/types early
    result = client.post("/experiment", {"config": values})
    out = args.out or (config.out or "experiment.csv")
    with open(out, "w") as f:
        f.write(rows_to_csv(result["rows"]))
    manifest_path = out + ".manifest.json"
    with open(manifest_path, "w") as f:
        f.write(manifest_to_json(result["manifest"]))
    print(f"wrote {len(result['rows'])} rows to {out} (manifest: {manifest_path})")
    if result["status"] != "complete":
        print(f"experiment incomplete: {result['manifest'].get('error')}", file=sys.stderr)
        return 1
    return 0


def _add_graph_args(sp, synthetic_required: bool = False) -> None:
    sp.add_argument("--graph", help="text edgelist path")
    sp.add_argument("--cache", help="binary adjacency cache path")
    sp.add_argument("--synthetic", required=synthetic_required,
                    help="power-law spec: exponent,n,minDeg,maxDeg")
    sp.add_argument("--orientation", choices=["propagation", "follows"],
                    default="propagation", help="edgelist arc meaning")
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="followcast",
        description="Cascade simulation and following-selection experiments",
    )
    parser.add_argument("--server", help="service URL (default: run in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stats", help="degree statistics of a graph")
    _add_graph_args(sp)

    sp = sub.add_parser("generate", help="write a synthetic graph to disk")
    sp.add_argument("--synthetic", required=True, help="exponent,n,minDeg,maxDeg")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help=".bin for binary cache, else edgelist")

    sp = sub.add_parser("prune-cache", help="precompute condensed cascade samples")
    _add_graph_args(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--samples", required=True)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", required=True, help="cache directory")

    sp = sub.add_parser("select", help="pick a seed set with a strategy")
    _add_graph_args(sp)
    sp.add_argument("--strategy", required=True,
                    choices=["greedy", "high_degree", "random", "dynamic_greedy"])
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--metric", choices=["retweeters", "readers"], default="retweeters")
    sp.add_argument("--recip", default="certain", help="certain | const=R | ratio")
    sp.add_argument("--p", type=float, help="retweet probability (enables curve output)")
    sp.add_argument("--samples", default="auto", help="sample count or 'auto'")
    sp.add_argument("--candidate-pool", type=int, dest="candidate_pool",
                    help="restrict greedy candidates to the top-M by effective degree")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="curve CSV path (default: stdout)")

    sp = sub.add_parser("estimate", help="Monte Carlo influence of a seed set")
    _add_graph_args(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--metric", choices=["retweeters", "readers"], default="retweeters")
    sp.add_argument("--samples", default="auto", help="sample count or 'auto'")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("nodes", type=int, nargs="+", help="seed node ids")

    sp = sub.add_parser("analyze", help="criticality / extinction / sample counts")
    _add_graph_args(sp)
    sp.add_argument("--p", required=True, help="comma-separated probabilities")
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--confidence", type=float, default=0.95)
    sp.add_argument("--out", help="CSV path")

    sp = sub.add_parser("experiment", help="run a full strategy-comparison sweep")
    _add_graph_args(sp)
    sp.add_argument("--config", help="key=value config file (flags win)")
    sp.add_argument("--p", help="comma-separated probabilities")
    sp.add_argument("--k", type=int, help="K_max")
    sp.add_argument("--k-grid", dest="k_grid", help="comma-separated prefix sizes")
    sp.add_argument("--strategy", help="comma-separated strategies")
    sp.add_argument("--metric", help="comma-separated metrics")
    sp.add_argument("--recip", help="certain | const=R | ratio")
    sp.add_argument("--samples", help="sample count or 'auto'")
    sp.add_argument("--candidate-pool", type=int, dest="candidate_pool")
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(seed=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "prune-cache":
            return cmd_prune_cache(args)
        client = ServiceClient(args.server)
        if args.command == "stats":
            return cmd_stats(client, args)
        if args.command == "select":
            return cmd_select(client, args)
        if args.command == "estimate":
            return cmd_estimate(client, args)
        if args.command == "analyze":
            return cmd_analyze(client, args)
        return cmd_experiment(client, args)
    except (RuntimeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
