"""Follow-back response models.

r_v is the probability that user v, once followed, follows back (and then
relays the seed's tweets).  The ratio formula estimates it from degrees:
users who follow many accounts relative to their own audience follow back
more readily, saturating at 1:

    r_v = min(followings_v / (followers_v + 100), 1)

In propagation orientation followings_v = in_degree(v) and
followers_v = out_degree(v).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import SocialGraph
from .rng import node_uniforms, RECIPROCATION

KINDS = ("certain", "constant", "ratio_formula", "table")


@dataclass(frozen=True)
class ReciprocationModel:
    kind: str = "certain"
    r: float = 1.0
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown reciprocation kind {self.kind!r}")
        if self.kind == "constant" and not 0.0 <= self.r <= 1.0:
            raise ValueError(f"constant rate must be in [0, 1], got {self.r}")
        if self.kind == "table":
            if self.table is None:
                raise ValueError("table reciprocation needs a table")
            table = np.asarray(self.table, dtype=np.float64)
            if ((table < 0) | (table > 1)).any():
                raise ValueError("table rates must lie in [0, 1]")
            object.__setattr__(self, "table", table)

    @classmethod
    def certain(cls) -> "ReciprocationModel":
        return cls(kind="certain")

    @classmethod
    def constant(cls, r: float) -> "ReciprocationModel":
        return cls(kind="constant", r=r)

    @classmethod
    def ratio_formula(cls) -> "ReciprocationModel":
        return cls(kind="ratio_formula")

    @classmethod
    def from_table(cls, rates) -> "ReciprocationModel":
        return cls(kind="table", table=np.asarray(rates, dtype=np.float64))

    def rates(self, graph: SocialGraph) -> np.ndarray:
        """Per-node follow-back probabilities r_v."""
        n = graph.node_count
        if self.kind == "certain":
            return np.ones(n)
        if self.kind == "constant":
            return np.full(n, self.r)
        if self.kind == "ratio_formula":
            return np.minimum(graph.in_degree / (graph.out_degree + 100.0), 1.0)
        if self.table.size != n:
            raise ValueError(f"table has {self.table.size} rates for {n} nodes")
        return self.table

    def sample(self, graph: SocialGraph, seed: int) -> np.ndarray:
        """One realization R_v ~ Bernoulli(r_v), drawn once per node."""
        draws = node_uniforms(seed, graph.node_count)
        return draws < self.rates(graph)


def parse_reciprocation(text: str) -> ReciprocationModel:
    """Parse the CLI/config spelling: certain | const=R | ratio."""
    if text == "certain":
        return ReciprocationModel.certain()
    if text == "ratio":
        return ReciprocationModel.ratio_formula()
    if text.startswith("const="):
        return ReciprocationModel.constant(float(text[len("const="):]))
    raise ValueError(f"unknown reciprocation spec {text!r} (use certain | const=R | ratio)")
