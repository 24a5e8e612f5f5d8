"""Exact erasure-count distributions over runs of consecutive slots.

``build_table`` computes P(m, n), the probability of m erasures among n
consecutive slots of the Markov channel, by a double induction over m and
n that tracks the state the chain is in at slot n.  ``build_joint_table``
extends this to the joint law of the erasure counts in two consecutive
segments (data, then repair), which block-code analysis needs because the
two segment counts are correlated through the state at the boundary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, derive_stats

__all__ = [
    "N_MAX_LIMIT",
    "ErasureTable",
    "JointErasureTable",
    "build_table",
    "build_joint_table",
    "erasure_count_monte_carlo",
]

# generous cap, far beyond any block size used by the schemes in scope
N_MAX_LIMIT = 4096


@dataclass(frozen=True)
class ErasureTable:
    """P_G(m, n) and P_B(m, n): m erasures over n slots, ending in G or B.

    Arrays are indexed [m, n].  ``prob(m, n)`` returns the marginal
    P(m, n) = P_G(m, n) + P_B(m, n); out-of-range m yields 0.
    """

    n_max: int
    pg: np.ndarray
    pb: np.ndarray

    @property
    def combined(self) -> np.ndarray:
        return self.pg + self.pb

    def prob(self, m: int, n: int) -> float:
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 0..{self.n_max}")
        if m < 0 or m > n:
            return 0.0
        return float(self.pg[m, n] + self.pb[m, n])

    def column(self, n: int) -> np.ndarray:
        """P(0..n, n) as a vector."""
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 0..{self.n_max}")
        return (self.pg[: n + 1, n] + self.pb[: n + 1, n]).copy()

    def write_csv(self, path) -> None:
        """Dump the marginal table as CSV rows n,m,probability."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "m", "probability"])
            total = self.combined
            for n in range(self.n_max + 1):
                for m in range(n + 1):
                    writer.writerow([n, m, repr(float(total[m, n]))])


@dataclass(frozen=True)
class JointErasureTable:
    """Joint law Q[m_d, m_r] of erasure counts in a data segment of
    ``n_data`` slots followed immediately by a repair segment of
    ``n_repair`` slots of the same chain run."""

    n_data: int
    n_repair: int
    q: np.ndarray

    def marginal_total(self) -> np.ndarray:
        """Distribution of m_d + m_r, comparable to P(., n_data + n_repair)."""
        n = self.n_data + self.n_repair
        out = np.zeros(n + 1)
        for md in range(self.n_data + 1):
            out[md : md + self.n_repair + 1] += self.q[md]
        return out


def _induct(params: ChannelParams, n_max: int, w_good: float, w_bad: float):
    """State-split induction with initial state weights (w_good, w_bad).

    Column n holds the joint probability of m erasures over slots 1..n and
    of the chain being in the given state during slot n.  Each step first
    moves the chain one transition, then erases with the new state's
    probability; starting weights are interpreted as the state *before*
    slot 1, so a point mass continues a longer chain seamlessly.
    """
    a, b = params.alpha, params.beta
    eg, eb = params.e_good, params.e_bad
    pg = np.zeros((n_max + 1, n_max + 1))
    pb = np.zeros((n_max + 1, n_max + 1))
    pg[0, 0] = w_good
    pb[0, 0] = w_bad
    for n in range(1, n_max + 1):
        to_g = a * pg[:, n - 1] + (1.0 - b) * pb[:, n - 1]
        to_b = (1.0 - a) * pg[:, n - 1] + b * pb[:, n - 1]
        pg[:, n] = to_g * (1.0 - eg)
        pg[1:, n] += to_g[:-1] * eg
        pb[:, n] = to_b * (1.0 - eb)
        pb[1:, n] += to_b[:-1] * eb
    return pg, pb


def build_table(params: ChannelParams, n_max: int) -> ErasureTable:
    """Erasure-count table for a stationary-start chain, n up to ``n_max``.

    Base case n=1: P_G(0,1) = pi_G*(1-e_G), P_G(1,1) = pi_G*e_G and the
    same for B, which the induction reproduces because one transition from
    the stationary distribution is again stationary.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if n_max > N_MAX_LIMIT:
        raise ValueError(f"n_max={n_max} exceeds supported limit {N_MAX_LIMIT}")
    stats = derive_stats(params)
    pg, pb = _induct(params, n_max, stats.pi_good, stats.pi_bad)
    return ErasureTable(n_max=n_max, pg=pg, pb=pb)


def build_joint_table(
    params: ChannelParams, n_data: int, n_repair: int
) -> JointErasureTable:
    """Exact joint law of (erasures in data segment, erasures in repair segment).

    The induction runs over the data segment from the stationary start,
    then continues over the repair segment from each possible boundary
    state, so the correlation across the segment boundary is kept.
    """
    n_data = int(n_data)
    n_repair = int(n_repair)
    if n_data < 1:
        raise ValueError("n_data must be >= 1")
    if n_repair < 0:
        raise ValueError("n_repair must be >= 0")
    if n_data + n_repair > N_MAX_LIMIT:
        raise ValueError("segment lengths exceed supported limit")
    stats = derive_stats(params)
    pg_d, pb_d = _induct(params, n_data, stats.pi_good, stats.pi_bad)
    end_g = pg_d[: n_data + 1, n_data]
    end_b = pb_d[: n_data + 1, n_data]
    if n_repair == 0:
        q = (end_g + end_b)[:, None].copy()
        return JointErasureTable(n_data=n_data, n_repair=n_repair, q=q)
    kg_g, kb_g = _induct(params, n_repair, 1.0, 0.0)
    kg_b, kb_b = _induct(params, n_repair, 0.0, 1.0)
    from_g = (kg_g + kb_g)[: n_repair + 1, n_repair]
    from_b = (kg_b + kb_b)[: n_repair + 1, n_repair]
    q = np.outer(end_g, from_g) + np.outer(end_b, from_b)
    return JointErasureTable(n_data=n_data, n_repair=n_repair, q=q)


def erasure_count_monte_carlo(
    params: ChannelParams, n: int, m: int, trials: int, seed: int
) -> float:
    """Monte Carlo estimate of P(m, n), independent of the induction.

    Simulates ``trials`` stationary-start chain runs of ``n`` slots by
    stepping slot by slot (vectorized across trials) and returns the
    fraction with exactly ``m`` erasures.  Deliberately shares no code
    with build_table or the sojourn-based sequence generator so it can
    serve as an oracle for both.
    """
    n = int(n)
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    stats = derive_stats(params)
    bad = rng.random(trials) < stats.pi_bad
    counts = np.zeros(trials, dtype=np.int64)
    simplified = params.is_simplified
    for _ in range(n):
        if simplified:
            counts += bad
        else:
            probs = np.where(bad, params.e_bad, params.e_good)
            counts += rng.random(trials) < probs
        u = rng.random(trials)
        stay = np.where(bad, params.beta, params.alpha)
        flip = u >= stay
        bad = bad ^ flip
    return float(np.mean(counts == m))
