"""Two-state Markov (Gilbert-Elliott) erasure channel.

The channel alternates between a Good and a Bad state.  ``alpha`` is the
probability of *staying* in the Good state for one more slot and ``beta``
the probability of staying in the Bad state.  Each slot is erased with the
erasure probability of the state it was transmitted in.  The simplified
channel (``e_good=0``, ``e_bad=1``) erases exactly the Bad slots, which
makes the mean erasure burst length equal to the mean Bad sojourn
1/(1-beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "DerivedChannelStats",
    "ErasureSequence",
    "derive_stats",
    "params_from_targets",
    "interleave",
    "sample_sequence",
]


@dataclass(frozen=True)
class ChannelParams:
    """Parameters of the two-state Markov erasure channel.

    Parameters
    ----------
    alpha : float
        Probability of remaining in the Good state for one slot.
    beta : float
        Probability of remaining in the Bad state for one slot.
    e_good, e_bad : float
        Per-state erasure probabilities.  Defaults give the simplified
        channel where Bad slots are always erased and Good slots never.
    """

    alpha: float
    beta: float
    e_good: float = 0.0
    e_bad: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "e_good", "e_bad"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name}={value!r} must be a probability in [0, 1]")
        if self.alpha + self.beta >= 2.0:
            raise ValueError(
                "alpha + beta must be < 2: with alpha = beta = 1 the chain "
                "never changes state and has no unique stationary distribution"
            )

    @property
    def is_simplified(self) -> bool:
        """True for the e_good=0, e_bad=1 convention."""
        return self.e_good == 0.0 and self.e_bad == 1.0


@dataclass(frozen=True)
class DerivedChannelStats:
    """Stationary statistics of a channel.

    ``p`` is the global erasure probability, ``rho`` the one-slot state
    correlation (alpha + beta - 1), ``mean_burst_len`` the mean Bad-state
    sojourn in slots (infinite when beta = 1).
    """

    p: float
    rho: float
    pi_good: float
    pi_bad: float
    mean_burst_len: float


@dataclass(frozen=True)
class ErasureSequence:
    """A seeded realization of the channel: one boolean per slot (True = erased)."""

    slots: np.ndarray
    seed: object

    def __len__(self) -> int:
        return int(self.slots.size)

    @property
    def erasure_rate(self) -> float:
        return float(self.slots.mean()) if self.slots.size else 0.0


def derive_stats(params: ChannelParams) -> DerivedChannelStats:
    """Stationary occupancies, erasure probability, correlation and burst length.

    pi_good = (1-beta)/(2-alpha-beta), pi_bad = (1-alpha)/(2-alpha-beta),
    p = pi_good*e_good + pi_bad*e_bad, rho = alpha + beta - 1.
    """
    denom = 2.0 - params.alpha - params.beta
    pi_good = (1.0 - params.beta) / denom
    pi_bad = (1.0 - params.alpha) / denom
    p = pi_good * params.e_good + pi_bad * params.e_bad
    rho = params.alpha + params.beta - 1.0
    burst = math.inf if params.beta == 1.0 else 1.0 / (1.0 - params.beta)
    return DerivedChannelStats(
        p=p, rho=rho, pi_good=pi_good, pi_bad=pi_bad, mean_burst_len=burst
    )


def params_from_targets(p: float, mean_burst_len: float) -> ChannelParams:
    """Simplified channel hitting a target erasure rate and mean burst length.

    Inverts p = (1-alpha)/(2-alpha-beta) and t_b = 1/(1-beta):
    beta = 1 - 1/t_b, alpha = 1 - p*(1-beta)/(1-p).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"target erasure probability p={p!r} must be in (0, 1)")
    if mean_burst_len < 1.0:
        raise ValueError(f"mean_burst_len={mean_burst_len!r} must be >= 1 slot")
    beta = 1.0 - 1.0 / mean_burst_len
    alpha = 1.0 - p * (1.0 - beta) / (1.0 - p)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(
            f"infeasible targets (p={p}, mean_burst_len={mean_burst_len}): "
            f"alpha={alpha:.6g} falls outside [0, 1)"
        )
    if not 0.0 <= beta < 1.0:
        raise ValueError(
            f"infeasible targets (p={p}, mean_burst_len={mean_burst_len}): "
            f"beta={beta:.6g} falls outside [0, 1)"
        )
    return ChannelParams(alpha=alpha, beta=beta)


def interleave(params: ChannelParams, depth: int) -> ChannelParams:
    """Channel seen by symbols spaced ``depth`` slots apart.

    Reading every depth-th slot of the chain yields another two-state
    chain with the same erasure probability p and correlation rho**depth:

        alpha_I = (1-p) + rho**depth * p
        beta_I  = p + rho**depth * (1-p)

    Depth 1 returns the parameters unchanged (rho**1 keeps the chain);
    assigning the two expressions the other way round would flip the
    erasure rate to 1-p, so the order above is the only one consistent
    with p being invariant under interleaving.
    """
    if depth < 1:
        raise ValueError(f"interleave depth must be >= 1, got {depth}")
    if not params.is_simplified:
        raise ValueError(
            "interleave is defined for the simplified channel (e_good=0, e_bad=1)"
        )
    if depth == 1:
        return params
    stats = derive_stats(params)
    r = stats.rho ** depth
    alpha_i = (1.0 - stats.p) + r * stats.p
    beta_i = stats.p + r * (1.0 - stats.p)
    return ChannelParams(alpha=alpha_i, beta=beta_i)


def _sample_states(params: ChannelParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stationary-start state path of length ``n`` (0 = Good, 1 = Bad).

    Runs of a state are geometric, so the path is drawn as alternating
    sojourn lengths instead of slot-by-slot steps.  Starting from the
    stationary distribution the remaining sojourn in the initial state is
    geometric with the same parameter (memorylessness), so the two
    constructions are equivalent.
    """
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    stats = derive_stats(params)
    cur = 1 if rng.random() < stats.pi_bad else 0
    p_leave = (1.0 - params.alpha, 1.0 - params.beta)
    if p_leave[cur] == 0.0:
        return np.full(n, cur, dtype=np.uint8)
    other = 1 - cur
    if p_leave[other] == 0.0:
        # the other state is absorbing: one sojourn in cur, then stuck
        run = min(int(rng.geometric(p_leave[cur])), n)
        path = np.full(n, other, dtype=np.uint8)
        path[:run] = cur
        return path
    mean_pair = 1.0 / p_leave[0] + 1.0 / p_leave[1]
    pieces = []
    total = 0
    while total < n:
        k = max(16, int(1.5 * (n - total) / mean_pair) + 1)
        lens = np.empty(2 * k, dtype=np.int64)
        lens[0::2] = rng.geometric(p_leave[cur], size=k)
        lens[1::2] = rng.geometric(p_leave[other], size=k)
        states = np.empty(2 * k, dtype=np.uint8)
        states[0::2] = cur
        states[1::2] = other
        pieces.append(np.repeat(states, lens))
        total += int(lens.sum())
        # each chunk holds an even number of runs, so the next one starts in cur
    return np.concatenate(pieces)[:n]


def sample_sequence(params: ChannelParams, n_slots: int, seed: int) -> ErasureSequence:
    """Generate a deterministic erasure sequence of ``n_slots`` slots.

    The initial state is drawn from the stationary distribution; each slot
    is erased with its state's erasure probability.  Identical
    (params, n_slots, seed) triples produce bit-identical sequences.
    """
    n_slots = int(n_slots)
    if n_slots < 0:
        raise ValueError("n_slots must be >= 0")
    rng = np.random.default_rng(seed)
    states = _sample_states(params, n_slots, rng)
    if params.is_simplified:
        erased = states.astype(bool)
    elif params.e_good == params.e_bad:
        erased = rng.random(n_slots) < params.e_good
    else:
        probs = np.where(states == 1, params.e_bad, params.e_good)
        erased = rng.random(n_slots) < probs
    return ErasureSequence(slots=erased, seed=seed)
