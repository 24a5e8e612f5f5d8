"""Monte-Carlo measurement backend for the analytic scheme models.

Each estimator simulates independent transmission units (codewords for
FEC, LLDUs for ARQ, blocks plus retransmission rounds for HARQ-II) with
the channel restarted from its stationary distribution per unit, i.e.
under the same renewal assumption the closed-form models make.  Results
come back with standard errors so callers can separate model error from
sampling noise.

Delay and efficiency conventions mirror the trace tool: per delivered
data LLDU for FEC, per delivered LLDU for ARQ, per delivered packet for
HARQ-II; efficiency is data LLDUs delivered over LLDU slots consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, derive_stats
from .schemes import ArqConfig, FecConfig, HarqConfig

__all__ = [
    "McResult",
    "fec_monte_carlo",
    "arq_monte_carlo",
    "harq_monte_carlo",
    "monte_carlo_scheme",
]


@dataclass(frozen=True)
class McResult:
    """Point estimates with standard errors; aux carries per-scheme extras."""

    eta: float
    delay_s: float
    residual_loss: float
    eta_se: float
    delay_se: float
    blocks: int
    aux: dict = field(default_factory=dict)


def _sample_blocks(
    params: ChannelParams, blocks: int, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Erasure indicators for `blocks` independent stationary n-slot blocks."""
    stats = derive_stats(params)
    bad = rng.random(blocks) < stats.pi_bad
    out = np.empty((blocks, n), dtype=bool)
    a, b = params.alpha, params.beta
    eg, eb = params.e_good, params.e_bad
    simplified = params.is_simplified
    for k in range(n):
        if k > 0:
            stay = np.where(bad, b, a)
            bad = bad ^ (rng.random(blocks) >= stay)
        if simplified:
            out[:, k] = bad
        else:
            out[:, k] = rng.random(blocks) < np.where(bad, eb, eg)
    return out


def _ratio_se(sums: np.ndarray, counts: np.ndarray) -> tuple[float, float]:
    """Mean and SE of sum(sums)/sum(counts) via ratio-estimator linearization."""
    total = counts.sum()
    if total <= 0:
        return math.nan, math.nan
    mean = float(sums.sum() / total)
    resid = sums - mean * counts
    n = sums.size
    se = float(np.sqrt(np.var(resid) / n) / (total / n))
    return mean, se


def fec_monte_carlo(
    cfg: FecConfig, params: ChannelParams, blocks: int, seed=None
) -> McResult:
    """Simulate independent FEC codewords; interleaving must already be
    folded into `params` (pass the interleaved channel for ifec)."""
    rng = np.random.default_rng(seed)
    n, nd, nr = cfg.n_total, cfg.n_data, cfg.n_repair
    erz = _sample_blocks(params, blocks, n, rng)
    m_d = erz[:, :nd].sum(axis=1)
    m_r = erz[:, nd:].sum(axis=1)
    decode = (m_d + m_r) <= nr
    delivered = np.where(decode, nd, nd - m_d)

    eta, eta_se = _ratio_se(
        delivered.astype(np.float64), np.full(blocks, float(n))
    )

    half_rtt = cfg.rtt / 2.0
    t_p = cfg.t_p
    # waits for recovered data LLDUs: position k decodes (n - k) slots later
    rec_rows = decode & (m_d > 0)
    waits = (n - np.arange(nd, dtype=np.float64)) * t_p
    rec_mask = erz[:, :nd] & rec_rows[:, None]
    delay_sums = (delivered.astype(np.float64) * half_rtt) + (
        rec_mask * waits[None, :]
    ).sum(axis=1)
    delay, delay_se = _ratio_se(delay_sums, delivered.astype(np.float64))

    residual = float(np.mean(~decode))
    return McResult(
        eta=eta,
        delay_s=delay,
        residual_loss=residual,
        eta_se=eta_se,
        delay_se=delay_se,
        blocks=blocks,
        aux={"p_decode": float(np.mean(decode))},
    )


def arq_monte_carlo(
    cfg: ArqConfig, params: ChannelParams, lldus: int, seed=None, t_p: float = 1e-3
) -> McResult:
    """Simulate independent LLDUs; retries see the channel one RTT later."""
    rng = np.random.default_rng(seed)
    stats = derive_stats(params)
    pi_b = stats.pi_bad
    lag = max(1, math.ceil(cfg.rtt / t_p - 1e-9))
    rho = stats.rho
    rho_l = rho**lag
    # state transition over the retransmission lag
    p_bb = pi_b + rho_l * (1.0 - pi_b)
    p_gb = pi_b * (1.0 - rho_l)
    eg, eb = params.e_good, params.e_bad

    bad = rng.random(lldus) < pi_b
    erased = rng.random(lldus) < np.where(bad, eb, eg)
    tries = np.ones(lldus, dtype=np.int64)
    pending = np.nonzero(erased)[0]
    bad = bad[pending]
    attempts = 0
    budget = math.inf if cfg.max_retx is None else cfg.max_retx
    dropped = 0
    while pending.size:
        if attempts >= budget:
            dropped = pending.size
            break
        attempts += 1
        if attempts > 100_000:
            raise RuntimeError("ARQ simulation did not converge")
        bad = rng.random(pending.size) < np.where(bad, p_bb, p_gb)
        erased = rng.random(pending.size) < np.where(bad, eb, eg)
        tries[pending] += 1
        keep = erased
        pending = pending[keep]
        bad = bad[keep]

    delivered = np.ones(lldus, dtype=bool)
    if dropped:
        delivered_idx = np.ones(lldus, dtype=bool)
        delivered_idx[pending] = False
        delivered = delivered_idx

    eta, eta_se = _ratio_se(
        delivered.astype(np.float64), tries.astype(np.float64)
    )
    delay_per = cfg.rtt / 2.0 + tries * cfg.rtt
    delay, delay_se = _ratio_se(
        np.where(delivered, delay_per, 0.0), delivered.astype(np.float64)
    )
    return McResult(
        eta=eta,
        delay_s=delay,
        residual_loss=float(dropped) / float(lldus),
        eta_se=eta_se,
        delay_se=delay_se,
        blocks=lldus,
        aux={"mean_tries": float(tries.mean())},
    )


def harq_monte_carlo(
    cfg: HarqConfig, params: ChannelParams, blocks: int, seed=None
) -> McResult:
    """Simulate HARQ-II blocks with fresh stationary channel state per round.

    aux carries `round_freq` (fraction decoded at round r, r = 0..max_retx)
    and `drop_freq`.
    """
    rng = np.random.default_rng(seed)
    n, nd, nr, ns = cfg.n_total, cfg.n_data, cfg.n_repair, cfg.n_supp
    budget = cfg.max_retx
    t_p = cfg.t_p

    erz = _sample_blocks(params, blocks, n, rng)
    m0 = erz.sum(axis=1)
    m_d0 = erz[:, :nd].sum(axis=1)

    sent = np.full(blocks, float(n))
    decode_round = np.full(blocks, -1, dtype=np.int64)
    extra_delay = np.zeros(blocks)
    decode_round[m0 <= nr] = 0

    active = np.nonzero(m0 > nr)[0]
    deficit = (m0[active] - nr).astype(np.int64)
    for r in range(1, budget + 1):
        if not active.size:
            break
        c = deficit + ns
        e = np.empty(active.size, dtype=np.int64)
        for size in np.unique(c):
            rows = np.nonzero(c == size)[0]
            blk = _sample_blocks(params, rows.size, int(size), rng)
            e[rows] = blk.sum(axis=1)
        sent[active] += c
        extra_delay[active] += cfg.rtt + c * t_p
        ok = e <= ns
        decode_round[active[ok]] = r
        active = active[~ok]
        deficit = (e[~ok] - ns).astype(np.int64)

    decoded = decode_round >= 0
    delivered = np.where(decoded, nd, nd - m_d0).astype(np.float64)
    eta, eta_se = _ratio_se(delivered, sent)

    base = n * t_p + cfg.rtt / 2.0
    delays = base + extra_delay
    delay, delay_se = _ratio_se(
        np.where(decoded, delays, 0.0), decoded.astype(np.float64)
    )

    round_freq = np.array(
        [float(np.mean(decode_round == r)) for r in range(budget + 1)]
    )
    sent_vals, sent_counts = np.unique(sent.astype(np.int64), return_counts=True)
    sent_hist = {int(v): float(c) / blocks for v, c in zip(sent_vals, sent_counts)}
    return McResult(
        eta=eta,
        delay_s=delay,
        residual_loss=float(np.mean(~decoded)),
        eta_se=eta_se,
        delay_se=delay_se,
        blocks=blocks,
        aux={
            "round_freq": round_freq,
            "drop_freq": float(np.mean(~decoded)),
            "mean_sent": float(sent.mean()),
            "sent_hist": sent_hist,
        },
    )


def monte_carlo_scheme(
    scheme: str, cfg, params: ChannelParams, blocks: int, seed=None
) -> McResult:
    """Dispatch by scheme name; `blocks` counts LLDUs for arq."""
    if scheme in ("fec", "ifec"):
        sim_params = params
        if scheme == "ifec" and cfg.interleave_depth > 1:
            from .channel import interleave

            sim_params = interleave(params, cfg.interleave_depth)
        return fec_monte_carlo(cfg, sim_params, blocks, seed)
    if scheme == "arq":
        return arq_monte_carlo(cfg, params, blocks, seed)
    if scheme == "harq2":
        return harq_monte_carlo(cfg, params, blocks, seed)
    raise ValueError(f"unknown scheme {scheme!r}")
