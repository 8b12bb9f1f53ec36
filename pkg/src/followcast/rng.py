"""Counter-based randomness helpers.

All stochastic pieces of a simulation (arc retention, reciprocation
outcomes, ...) draw from Philox streams keyed by (seed, purpose).  The
i-th value of a stream always belongs to the same arc or node, so samples
are reproducible regardless of iteration order or worker count.
"""

import numpy as np

_MASK64 = (1 << 64) - 1

# stream purposes; distinct keys keep the draws independent
ARC_RETENTION = 0x61726373  # "arcs"
RECIPROCATION = 0x72656370  # "recp"


def uniforms(seed: int, purpose: int, count: int) -> np.ndarray:
    """Per-index uniform draws in [0, 1) from the (seed, purpose) stream."""
    key = np.array([seed & _MASK64, purpose & _MASK64], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(count)


def arc_uniforms(seed: int, arc_count: int) -> np.ndarray:
    """One uniform per arc index; drives threshold-coupled arc retention."""
    return uniforms(seed, ARC_RETENTION, arc_count)


def node_uniforms(seed: int, node_count: int) -> np.ndarray:
    """One uniform per node id; drives single-draw reciprocation outcomes."""
    return uniforms(seed, RECIPROCATION, node_count)
