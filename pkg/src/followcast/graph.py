"""Directed social graphs in tweet-propagation orientation.

An arc u -> v means v follows u: v receives u's tweets, so influence
flows along the arc.  Consequently out_degree(u) is u's follower count
(the d_i that degree-based selection ranks by) and in_degree(v) is v's
number of followings.

Graphs are immutable CSR structures: ``indptr`` (node_count + 1) and
``targets`` (arc_count), both sorted, deduplicated, self-loop free.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Union

import numpy as np

CACHE_MAGIC = b"CBG1"


class EdgelistParseError(ValueError):
    """Raised for malformed edgelist input; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True, eq=False)
class SocialGraph:
    """Immutable directed graph, propagation orientation, CSR adjacency."""

    node_count: int
    indptr: np.ndarray  # int64, len node_count + 1
    targets: np.ndarray  # int64, len arc_count; followers of each node
    external_ids: Optional[np.ndarray] = None  # original ids, when compacted
    dropped_self_loops: int = 0
    collapsed_duplicates: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def arc_count(self) -> int:
        return int(self.indptr[-1])

    @property
    def out_degree(self) -> np.ndarray:
        """Follower count per node (d_i)."""
        return np.diff(self.indptr)

    @property
    def in_degree(self) -> np.ndarray:
        """Followings count per node."""
        if "in_degree" not in self._cache:
            self._cache["in_degree"] = np.bincount(self.targets, minlength=self.node_count)
        return self._cache["in_degree"]

    @property
    def arc_sources(self) -> np.ndarray:
        """Source node of every arc, aligned with ``targets``."""
        if "arc_sources" not in self._cache:
            self._cache["arc_sources"] = np.repeat(
                np.arange(self.node_count, dtype=np.int64), self.out_degree
            )
        return self._cache["arc_sources"]

    def followers(self, node: int) -> np.ndarray:
        """Out-neighbors of ``node``: the users that follow it."""
        return self.targets[self.indptr[node]:self.indptr[node + 1]]

    def fingerprint(self) -> str:
        """Content hash; changes iff node count or arc structure changes."""
        if "fingerprint" not in self._cache:
            h = hashlib.sha256()
            h.update(struct.pack("<Q", self.node_count))
            h.update(np.ascontiguousarray(self.indptr, dtype="<i8").tobytes())
            h.update(np.ascontiguousarray(self.targets, dtype="<i8").tobytes())
            self._cache["fingerprint"] = h.hexdigest()
        return self._cache["fingerprint"]

    def arcs(self) -> Iterable[tuple[int, int]]:
        srcs = self.arc_sources
        for i in range(self.arc_count):
            yield int(srcs[i]), int(self.targets[i])


def from_arc_arrays(node_count: int, sources, targets) -> SocialGraph:
    """Build a graph from parallel arc arrays, dropping self-loops and
    collapsing duplicate arcs."""
    sources = np.asarray(sources, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    if sources.size:
        if sources.min(initial=0) < 0 or targets.min(initial=0) < 0:
            raise ValueError("negative node id")
        hi = max(int(sources.max()), int(targets.max()))
        if hi >= node_count:
            raise ValueError(f"node id {hi} out of range for node_count={node_count}")

    keep = sources != targets
    n_loops = int(sources.size - keep.sum())
    sources, targets = sources[keep], targets[keep]

    packed = sources * np.int64(node_count) + targets
    unique_packed = np.unique(packed)
    n_dups = int(packed.size - unique_packed.size)
    sources = unique_packed // node_count
    targets = unique_packed % node_count

    counts = np.bincount(sources, minlength=node_count)
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return SocialGraph(
        node_count=node_count,
        indptr=indptr,
        targets=targets.astype(np.int64),
        dropped_self_loops=n_loops,
        collapsed_duplicates=n_dups,
    )


def _open_text(source: Union[str, IO[str]]):
    if isinstance(source, (str, bytes)):
        return open(source, "r"), True
    return source, False


def load_edgelist(source: Union[str, IO[str]], orientation: str = "propagation") -> SocialGraph:
    """Parse a whitespace-separated edgelist into a SocialGraph.

    orientation="propagation": a line "a b" means b follows a (arc a -> b).
    orientation="follows":     a line "a b" means a follows b (arc b -> a).

    Node ids may be arbitrary non-negative integers; they are compacted to
    a dense range in ascending id order (so save + load round-trips to the
    identical graph) and the original ids are kept in ``external_ids``.
    Lines starting with '#' are ignored.
    """
    if orientation not in ("propagation", "follows"):
        raise ValueError(f"unknown orientation {orientation!r}")
    stream, owned = _open_text(source)
    srcs: list[int] = []
    dsts: list[int] = []
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgelistParseError(lineno, f"expected two fields, got {len(parts)}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgelistParseError(lineno, f"non-integer field in {line!r}") from None
            if a < 0 or b < 0:
                raise EdgelistParseError(lineno, "negative node id")
            srcs.append(a)
            dsts.append(b)
    finally:
        if owned:
            stream.close()
    if not srcs:
        raise EdgelistParseError(0, "empty edgelist")

    src = np.array(srcs, dtype=np.int64)
    dst = np.array(dsts, dtype=np.int64)
    if orientation == "follows":
        src, dst = dst, src

    # compact ids to 0..n-1 in ascending order
    interleaved = np.empty(src.size * 2, dtype=np.int64)
    interleaved[0::2] = src
    interleaved[1::2] = dst
    ext_ids, inverse = np.unique(interleaved, return_inverse=True)
    node_count = ext_ids.size

    graph = from_arc_arrays(node_count, inverse[0::2], inverse[1::2])
    if not np.array_equal(ext_ids, np.arange(node_count)):
        object.__setattr__(graph, "external_ids", ext_ids)
    return graph


def save_edgelist(graph: SocialGraph, destination: Union[str, IO[str]]) -> None:
    """Write the graph as "src dst" lines in propagation orientation,
    using internal (dense) node ids.

    Nodes touching no arc are written as self-loop lines, which the loader
    drops again — that keeps node_count stable across a save/load cycle
    even though the text format itself can only mention nodes inside arcs.
    """
    stream, owned = (open(destination, "w"), True) if isinstance(destination, str) else (destination, False)
    try:
        srcs = graph.arc_sources
        buf = io.StringIO()
        for i in range(graph.arc_count):
            buf.write(f"{srcs[i]} {graph.targets[i]}\n")
        isolated = np.flatnonzero((graph.out_degree == 0) & (graph.in_degree == 0))
        for v in isolated:
            buf.write(f"{v} {v}\n")
        stream.write(buf.getvalue())
    finally:
        if owned:
            stream.close()


def save_id_map(graph: SocialGraph, path: str) -> None:
    """CSV "external_id,internal_id" recovering the pre-compaction ids."""
    ext = graph.external_ids
    if ext is None:
        ext = np.arange(graph.node_count)
    with open(path, "w") as f:
        f.write("external_id,internal_id\n")
        for internal, external in enumerate(ext):
            f.write(f"{external},{internal}\n")


def save_binary_cache(graph: SocialGraph, path: str) -> None:
    """Versioned little-endian binary adjacency cache for fast reload."""
    with open(path, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(struct.pack("<QQ", graph.node_count, graph.arc_count))
        f.write(np.ascontiguousarray(graph.indptr, dtype="<i8").tobytes())
        f.write(np.ascontiguousarray(graph.targets, dtype="<i8").tobytes())


def load_binary_cache(path: str) -> SocialGraph:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != CACHE_MAGIC:
            raise ValueError(f"not a graph cache file (magic {magic!r})")
        node_count, arc_count = struct.unpack("<QQ", f.read(16))
        indptr = np.frombuffer(f.read(8 * (node_count + 1)), dtype="<i8").astype(np.int64)
        targets = np.frombuffer(f.read(8 * arc_count), dtype="<i8").astype(np.int64)
    if indptr.size != node_count + 1 or targets.size != arc_count:
        raise ValueError("truncated graph cache file")
    return SocialGraph(node_count=int(node_count), indptr=indptr, targets=targets)


@dataclass(frozen=True)
class DegreeStats:
    """Out-degree (follower count) statistics of a graph."""

    mean_out_degree: float  # <k>
    second_moment_out_degree: float  # <k^2>
    degrees: np.ndarray  # distinct degrees with nonzero frequency
    frequencies: np.ndarray  # q_k, same length as degrees, sums to 1
    max_out_degree: int
    node_count: int
    arc_count: int

    @property
    def histogram(self) -> dict[int, float]:
        return {int(k): float(q) for k, q in zip(self.degrees, self.frequencies)}


def degree_stats(graph: SocialGraph) -> DegreeStats:
    """Moments and histogram of the follower-count distribution q_k."""
    if graph.node_count == 0:
        raise ValueError("empty graph")
    deg = graph.out_degree
    counts = np.bincount(deg)
    ks = np.flatnonzero(counts)
    freqs = counts[ks] / graph.node_count
    return DegreeStats(
        mean_out_degree=graph.arc_count / graph.node_count,
        second_moment_out_degree=float(np.dot(deg.astype(np.float64), deg) / graph.node_count),
        degrees=ks.astype(np.int64),
        frequencies=freqs,
        max_out_degree=int(deg.max()),
        node_count=graph.node_count,
        arc_count=graph.arc_count,
    )


@dataclass(frozen=True)
class PowerLawSpec:
    """Truncated power-law out-degree law: P(k) proportional to k^-exponent
    on [min_degree, max_degree]."""

    exponent: float
    min_degree: int
    max_degree: int

    def pmf(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.arange(self.min_degree, self.max_degree + 1, dtype=np.float64)
        w = ks ** (-self.exponent)
        return ks.astype(np.int64), w / w.sum()

    def analytic_mean(self) -> float:
        ks, q = self.pmf()
        return float(np.dot(ks, q))


def generate_configuration_graph(
    degree_spec: Union[PowerLawSpec, dict[int, float]],
    node_count: int,
    seed: int,
) -> SocialGraph:
    """Random graph with i.i.d. out-degrees from ``degree_spec`` and each
    arc head chosen uniformly at random (no self-loops, duplicates collapsed).

    ``degree_spec`` is either a PowerLawSpec or an explicit degree->probability
    histogram.  Deterministic for a fixed seed.
    """
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    if isinstance(degree_spec, PowerLawSpec):
        if degree_spec.exponent <= 1:
            raise ValueError("power-law exponent must be > 1")
        if degree_spec.min_degree > degree_spec.max_degree:
            raise ValueError("min_degree > max_degree")
        if degree_spec.min_degree < 0:
            raise ValueError("negative min_degree")
        if degree_spec.max_degree >= node_count:
            raise ValueError("max_degree must be < node_count")
        ks, q = degree_spec.pmf()
    else:
        ks = np.array(sorted(degree_spec), dtype=np.int64)
        q = np.array([degree_spec[int(k)] for k in ks], dtype=np.float64)
        if (q < 0).any() or q.sum() <= 0:
            raise ValueError("invalid degree histogram")
        q = q / q.sum()
        if ks.min() < 0 or ks.max() >= node_count:
            raise ValueError("histogram degree out of range")

    rng = np.random.default_rng(seed)
    if node_count == 1:
        # no valid targets, so no arcs regardless of the requested degrees
        return from_arc_arrays(1, [], [])
    cdf = np.cumsum(q)
    draws = rng.random(node_count)
    degrees = ks[np.searchsorted(cdf, draws, side="right").clip(max=ks.size - 1)]
    total = int(degrees.sum())
    sources = np.repeat(np.arange(node_count, dtype=np.int64), degrees)
    # uniform over the node_count - 1 non-self heads
    heads = rng.integers(0, node_count - 1, size=total, dtype=np.int64)
    heads[heads >= sources] += 1
    return from_arc_arrays(node_count, sources, heads)
