"""Branching-process view of the cascade: criticality, extinction, and the
sample count needed for a given estimation precision.

A retweeter was reached along an arc, so his follower count is distributed
like the size-biased law k*q_k/<k>, and each follower retweets with
probability p — the offspring distribution is that size-biased mixture of
Binomial(k, p).  Its mean is m = p*<k^2>/<k>, giving the critical retweet
probability p_c = <k>/<k^2>.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import binom, norm

from .graph import DegreeStats

PGF_TOL = 1e-12
TAIL_MASS = 1e-9


def offspring_distribution(stats: DegreeStats, p: float, tail_mass: float = TAIL_MASS) -> np.ndarray:
    """pmf (indexed by offspring count j) of Binomial(k, p) with k size-biased.

    The far tail (total mass <= tail_mass) is cut and the pmf renormalized,
    keeping downstream fixed-point iterations on a finite support.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    if stats.mean_out_degree <= 0:
        raise ValueError("degree distribution has zero mean; no branching model")
    ks = stats.degrees.astype(np.float64)
    size_biased = ks * stats.frequencies / stats.mean_out_degree
    positive = size_biased > 0
    ks, size_biased = ks[positive], size_biased[positive]

    support = int(ks.max()) + 1
    pmf = np.zeros(support)
    js = np.arange(support)
    for k, w in zip(ks, size_biased):
        pmf[: int(k) + 1] += w * binom.pmf(js[: int(k) + 1], int(k), p)

    # trim the negligible tail, then renormalize
    tail = np.cumsum(pmf[::-1])[::-1]
    keep = np.flatnonzero(tail > tail_mass)
    cut = int(keep.max()) + 1 if keep.size else 1
    pmf = pmf[:cut]
    return pmf / pmf.sum()


def pmf_mean(pmf: np.ndarray) -> float:
    pmf = np.asarray(pmf, dtype=np.float64)
    return float(np.dot(np.arange(pmf.size), pmf))


def critical_probability(stats: DegreeStats) -> float:
    """The p at which the mean offspring count crosses 1: p_c = <k>/<k^2>."""
    if stats.second_moment_out_degree <= 0:
        raise ValueError("degree second moment is zero; criticality undefined")
    return stats.mean_out_degree / stats.second_moment_out_degree


def extinction_probability(pmf, tol: float = PGF_TOL, max_iter: int = 10 ** 6) -> float:
    """Smallest fixed point in [0, 1] of the generating function
    G(s) = sum_j pmf_j s^j, found by iterating s <- G(s) from 0.

    At or below the critical mean the process dies almost surely, so 1 is
    returned outright (the iteration converges there only sublinearly).
    """
    pmf = np.asarray(pmf, dtype=np.float64)
    if pmf.size == 0 or abs(pmf.sum() - 1.0) > 1e-9:
        raise ValueError("offspring pmf must sum to 1")
    if pmf_mean(pmf) <= 1.0:
        return 1.0
    s = 0.0
    for _ in range(max_iter):
        nxt = float(np.polynomial.polynomial.polyval(s, pmf))
        if abs(nxt - s) <= tol:
            return nxt
        s = nxt
    raise RuntimeError("extinction fixed-point iteration did not converge")


def sample_size_estimate(node_count: int, p_ext: float, relative_precision: float,
                         confidence: float = 0.95, minimum: int = 1) -> int:
    """Monte Carlo runs needed so the mean of the two-point cascade model
    (size N with probability 1-p_ext, else 0) has a CI half-width of at
    most relative_precision * mean:

        n = ceil(z^2 * p_ext / ((1 - p_ext) * eps^2))

    N cancels out of the relative bound, so only p_ext matters.  The
    degenerate cases p_ext in {0, 1} (no variance / no survivors) fall back
    to the configured minimum.
    """
    if relative_precision <= 0:
        raise ValueError("relative_precision must be > 0")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    floor = max(int(minimum), 1)
    if p_ext <= 0.0 or p_ext >= 1.0:
        return floor
    z = norm.ppf(0.5 + confidence / 2.0)
    needed = math.ceil(z * z * p_ext / ((1.0 - p_ext) * relative_precision ** 2))
    return max(needed, floor)


def subcritical_mean_size(stats: DegreeStats, p: float, seed_out_degree: int) -> float:
    """Expected retweeter count for a certainly-retweeting seed with
    seed_out_degree followers: d*p / (1 - m).  Defined only below
    criticality; above it the model's expectation diverges."""
    m = p * stats.second_moment_out_degree / stats.mean_out_degree
    if m >= 1.0:
        raise ValueError(f"mean offspring {m:.6g} >= 1; expected size is infinite")
    return seed_out_degree * p / (1.0 - m)


def simulate_extinction(pmf, n_runs: int, seed: int, max_generations: int = 500,
                        population_cap: int = 500) -> float:
    """Direct branching simulation: fraction of runs that die out.

    A run is declared surviving once its population reaches population_cap
    (or is still alive after max_generations); for offspring means away
    from 1 the misclassification probability is vanishingly small.
    """
    pmf = np.asarray(pmf, dtype=np.float64)
    cdf = np.cumsum(pmf)
    rng = np.random.default_rng(seed)
    population = np.ones(n_runs, dtype=np.int64)
    extinct = 0
    for _ in range(max_generations):
        alive = population > 0
        if not alive.any():
            break
        counts = population[alive]
        boundaries = np.cumsum(counts)[:-1]
        draws = np.searchsorted(cdf, rng.random(int(counts.sum())), side="right")
        next_counts = np.add.reduceat(draws, np.concatenate([[0], boundaries]))
        population = np.zeros_like(population)
        population[alive] = np.minimum(next_counts, population_cap)
        died = alive & (population == 0)
        extinct += int(died.sum())
        population[population >= population_cap] = -1  # survived; stop tracking
    return extinct / n_runs
