"""Analytic throughput efficiency and recovery delay models.

Four link-layer reliability schemes over the bursty erasure channel:

* FEC: one block of N_D data + N_R repair LLDUs; any N_D received LLDUs
  decode the block (MDS assumption).
* Interleaved FEC: same code, symbols spaced ``interleave_depth`` slots
  apart, modeled by transforming the channel parameters.
* ARQ: every lost data LLDU is retransmitted one RTT later.
* HARQ-II: FEC block first; while decoding fails and the retransmission
  budget allows, a round of (missing + N_S) extra repair LLDUs is sent one
  RTT later.

Efficiency is delivered data LLDUs over LLDUs sent; recovery delay is the
one-way propagation RTT/2 plus the scheme's waiting time.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, derive_stats, interleave, params_from_targets
from .distribution import ErasureTable, build_joint_table, build_table

__all__ = [
    "FecConfig",
    "ArqConfig",
    "HarqConfig",
    "SchemePerformance",
    "fec_efficiency",
    "fec_delay",
    "fec_performance",
    "arq_performance",
    "harq_p_received",
    "harq_p_sent",
    "harq_performance",
    "evaluate_scheme",
    "scheme_sweep",
    "sweep_rows_to_csv",
    "SWEEP_CSV_FIELDS",
]


@dataclass(frozen=True)
class FecConfig:
    """Block code configuration: ``n_data`` data and ``n_repair`` repair LLDUs."""

    n_data: int
    n_repair: int
    rtt: float
    t_p: float
    interleave_depth: int = 1

    def __post_init__(self):
        if self.n_data < 1:
            raise ValueError("n_data must be >= 1")
        if self.n_repair < 0:
            raise ValueError("n_repair must be >= 0")
        if self.rtt <= 0.0 or self.t_p <= 0.0:
            raise ValueError("rtt and t_p must be positive (seconds)")
        if self.interleave_depth < 1:
            raise ValueError("interleave_depth must be >= 1")

    @property
    def n_total(self) -> int:
        return self.n_data + self.n_repair


@dataclass(frozen=True)
class ArqConfig:
    """ARQ configuration; ``max_retx=None`` means unbounded retransmissions."""

    rtt: float
    max_retx: int | None = None

    def __post_init__(self):
        if self.rtt <= 0.0:
            raise ValueError("rtt must be positive (seconds)")
        if self.max_retx is not None and self.max_retx < 0:
            raise ValueError("max_retx must be >= 0 or None")


@dataclass(frozen=True)
class HarqConfig:
    """HARQ-II configuration.

    ``n_supp`` (N_S) is the number of supplementary repair LLDUs added to
    each retransmission round; ``max_retx`` (R) the number of authorized
    retransmission rounds after the initial block.
    """

    n_data: int
    n_repair: int
    rtt: float
    t_p: float
    n_supp: int = 2
    max_retx: int = 2

    def __post_init__(self):
        if self.n_data < 1:
            raise ValueError("n_data must be >= 1")
        if self.n_repair < 0:
            raise ValueError("n_repair must be >= 0")
        if self.n_supp < 0:
            raise ValueError("n_supp must be >= 0")
        if self.max_retx < 0:
            raise ValueError("max_retx must be >= 0")
        if self.rtt <= 0.0 or self.t_p <= 0.0:
            raise ValueError("rtt and t_p must be positive (seconds)")

    @property
    def n_total(self) -> int:
        return self.n_data + self.n_repair


@dataclass(frozen=True)
class SchemePerformance:
    eta: float
    delay: float
    residual_loss: float


def _fec_channel(cfg: FecConfig, ch: ChannelParams) -> ChannelParams:
    if cfg.interleave_depth > 1:
        return interleave(ch, cfg.interleave_depth)
    return ch


def fec_efficiency(cfg: FecConfig, ch: ChannelParams) -> float:
    """Expected delivered data LLDUs per sent LLDU for one FEC block.

    A block decodes when total erasures are at most N_R; otherwise only
    the directly received data LLDUs are delivered.  The expectation runs
    over the exact joint law of (data erasures, repair erasures), which
    keeps the burst correlation between the two segments.
    """
    chan = _fec_channel(cfg, ch)
    joint = build_joint_table(chan, cfg.n_data, cfg.n_repair)
    md = np.arange(cfg.n_data + 1)[:, None]
    mr = np.arange(cfg.n_repair + 1)[None, :]
    delivered = np.where(md + mr <= cfg.n_repair, cfg.n_data, cfg.n_data - md)
    return float((joint.q * delivered).sum() / cfg.n_total)


def fec_delay(cfg: FecConfig, ch: ChannelParams) -> float:
    """Mean recovery delay for one FEC block.

    d = RTT/2 + p * (1 - sum_{i=N_R}^{N-1} P(i, N-1)) * (N/2) * T_P: an
    erased LLDU, taken to sit in the middle of the block on average, waits
    half a block for the decode when recovery is possible.
    """
    chan = _fec_channel(cfg, ch)
    stats = derive_stats(chan)
    n = cfg.n_total
    col = build_table(chan, n - 1).column(n - 1)
    # N_R <= N-1 always holds because n_data >= 1
    tail = float(col[cfg.n_repair :].sum())
    return cfg.rtt / 2.0 + stats.p * (1.0 - tail) * (n / 2.0) * cfg.t_p


def fec_performance(cfg: FecConfig, ch: ChannelParams) -> SchemePerformance:
    chan = _fec_channel(cfg, ch)
    residual = float(build_table(chan, cfg.n_total).column(cfg.n_total)[cfg.n_repair + 1 :].sum())
    return SchemePerformance(
        eta=fec_efficiency(cfg, ch),
        delay=fec_delay(cfg, ch),
        residual_loss=residual,
    )


def arq_performance(cfg: ArqConfig, ch: ChannelParams) -> SchemePerformance:
    """ARQ efficiency and delay from the global erasure probability.

    Retransmissions happen one RTT apart, far beyond the burst coherence
    time, so successive tries are treated as independent with probability
    p each.  Unbounded: d = RTT/2 + RTT/(1-p), the closed form of
    RTT/2 + sum_{i>=1} p^(i-1) (1-p) i RTT.  Bounded at K retransmissions
    the series truncates, the mean is taken over delivered LLDUs, and the
    residual loss is p^(K+1).
    """
    p = derive_stats(ch).p
    if p >= 1.0:
        raise ValueError("ARQ requires p < 1")
    rtt = cfg.rtt
    eta = 1.0 - p
    if cfg.max_retx is None:
        delay = rtt / 2.0 + rtt / (1.0 - p)
        residual = 0.0
    else:
        tries = np.arange(1, cfg.max_retx + 2)
        weights = p ** (tries - 1.0) * (1.0 - p)
        delivered = float(weights.sum())  # = 1 - p^(K+1)
        delay = rtt / 2.0 + rtt * float((weights * tries).sum()) / delivered
        residual = p ** (cfg.max_retx + 1)
    return SchemePerformance(eta=eta, delay=delay, residual_loss=residual)


def _require_r2(cfg: HarqConfig) -> None:
    if cfg.max_retx != 2:
        raise ValueError(
            "the closed-form HARQ expressions are stated for max_retx=2; "
            "use the Monte Carlo path in burstlink.validation for other budgets"
        )


def _harq_table_span(cfg: HarqConfig) -> int:
    """Largest chain length any HARQ expression indexes."""
    return max(cfg.n_total, cfg.n_data + 2 * cfg.n_supp)


def _check_table(cfg: HarqConfig, table: ErasureTable) -> ErasureTable:
    needed = _harq_table_span(cfg)
    if table.n_max < needed:
        raise ValueError(f"table too small: n_max={table.n_max}, need >= {needed}")
    return table


def harq_p_received(cfg: HarqConfig, table: ErasureTable) -> np.ndarray:
    """P_R(i), i = 1..N_D: probability that i data LLDUs end up delivered.

    Literal evaluation of the stated closed form for a budget of two
    retransmission rounds: full delivery carries the mass of decoding in
    rounds 0 or 1, and each partial count i < N_D carries the printed
    triple sum over round-1/round-2 erasure counts.  The lower summation
    bound for the first inner index is 0 when (N_D - i) < N_R (the stated
    difference is negative there and is clamped) and 1 at equality.
    Returned as an array with entry [i-1] = P_R(i).
    """
    _require_r2(cfg)
    table = _check_table(cfg, table)
    nd, nr, ns, n = cfg.n_data, cfg.n_repair, cfg.n_supp, cfg.n_total
    p = table.combined
    out = np.zeros(nd)

    # decoding in round 0 or 1 delivers all N_D data LLDUs
    r0 = float(p[: nr + 1, n].sum())
    r1 = 0.0
    for l0 in range(nr + 1, n + 1):
        c1 = l0 - nr + ns
        r1 += float(p[l0, n]) * float(p[: ns + 1, c1].sum())
    out[nd - 1] = r0 + r1

    # tail sums s3[c2] = sum_{l3=ns+1}^{c2} P(l3, c2)
    c2_max = nd - 1 + 2 * ns
    s3 = np.zeros(max(c2_max + 1, ns + 2))
    for c2 in range(ns + 1, c2_max + 1):
        s3[c2] = float(p[ns + 1 : c2 + 1, c2].sum())

    for i in range(1, nd):
        k = nd - i
        lo = 1 if k == nr else 0
        total = 0.0
        for l1 in range(lo, nr + 1):
            c1 = k + ns - nr + l1
            if c1 < ns + 1:
                continue  # empty l2 range
            inner = 0.0
            for l2 in range(ns + 1, c1 + 1):
                inner += float(p[l2, c1]) * s3[l2 + ns]
            total += float(p[l1, nr]) * inner
        out[i - 1] = float(p[k, nd]) * total
    return out


def harq_p_sent(cfg: HarqConfig, table: ErasureTable) -> np.ndarray:
    """P_S(j): probability that j LLDUs are sent for one IP packet (R=2).

    Mass sits at j = N when round 0 decodes; at j = N + (l0 - N_R + N_S)
    when round 1 is needed and decodes; and at j = N + (l0 - N_R + N_S) + l1
    when round 1 fails with l1 erasures and round 2 (of l1 LLDUs) is sent.
    Returned as a dense array indexed by j; entries sum to 1.
    """
    _require_r2(cfg)
    table = _check_table(cfg, table)
    nd, nr, ns, n = cfg.n_data, cfg.n_repair, cfg.n_supp, cfg.n_total
    p = table.combined
    c1_max = n - nr + ns
    j_max = n + 2 * c1_max
    out = np.zeros(j_max + 1)
    out[n] = float(p[: nr + 1, n].sum())
    for l0 in range(nr + 1, n + 1):
        c1 = l0 - nr + ns
        mass0 = float(p[l0, n])
        out[n + c1] += mass0 * float(p[: ns + 1, c1].sum())
        for l1 in range(ns + 1, c1 + 1):
            out[n + c1 + l1] += mass0 * float(p[l1, c1])
    return out


def _harq_rounds(cfg: HarqConfig, table: ErasureTable):
    """Round-by-round decode masses and conditional round sizes.

    Returns (r_probs, round_sizes, psi_fail, expected_sent, fail_step):
    r_probs[r] is the probability of decoding at round r (0..R),
    round_sizes[r-1] the mean LLDU count of round r given it is reached,
    psi_fail the deficit distribution after the budget is exhausted, and
    fail_step[d'-1, d-1] the one-round deficit transition on failure.
    Each round's erasures come from a fresh stationary chain run: the RTT
    separating rounds dwarfs the burst coherence time.
    """
    nd, nr, ns, budget = cfg.n_data, cfg.n_repair, cfg.n_supp, cfg.max_retx
    n = cfg.n_total
    p = table.combined
    col_n = p[: n + 1, n]
    r_probs = [float(col_n[: nr + 1].sum())]
    # psi[d-1]: probability the receiver still misses d LLDUs (deficit d)
    psi = col_n[nr + 1 : n + 1].copy()
    deficits = np.arange(1, nd + 1)
    sizes = deficits + ns
    expected_sent = float(n)
    round_sizes = []
    dec = np.array([float(p[: ns + 1, c].sum()) for c in sizes])
    fail_step = np.zeros((nd, nd))
    for di, d in enumerate(deficits):
        c = d + ns
        fail_step[:d, di] = p[ns + 1 : c + 1, c]
    for _ in range(budget):
        reach = float(psi.sum())
        if reach <= 0.0:
            r_probs.append(0.0)
            round_sizes.append(0.0)
            psi = np.zeros(nd)
            continue
        sent_this_round = float((psi * sizes).sum())
        expected_sent += sent_this_round
        round_sizes.append(sent_this_round / reach)
        r_probs.append(float((psi * dec).sum()))
        psi = fail_step @ psi
    return r_probs, round_sizes, psi, expected_sent, fail_step


def harq_performance(cfg: HarqConfig, ch: ChannelParams) -> SchemePerformance:
    """HARQ-II efficiency and delay with consistent round accounting.

    eta = E[delivered data LLDUs] / E[LLDUs sent]: a packet that decodes
    at any round within the budget delivers all N_D data LLDUs; one that
    exhausts the budget delivers only the data LLDUs received directly in
    round 0 (the code is all-or-nothing).  Every executed round counts in
    the denominator whether or not it decodes.

    delay = T_R(0) + RTT/2 + sum_{r>=1} R_r * r * (RTT + T_R(r)) with
    T_R(0) = N*t_p and T_R(r) the mean LLDU time of round r given it is
    reached; R_r is the probability of decoding at round r.
    """
    nd, nr = cfg.n_data, cfg.n_repair
    table = build_table(ch, _harq_table_span(cfg))
    r_probs, round_sizes, psi_fail, expected_sent, fail_step = _harq_rounds(cfg, table)
    p_fail = float(psi_fail.sum())

    # failure-path delivery: joint law of round-0 (data, repair) erasures,
    # weighted by the probability that every round in the budget fails
    fail_given_deficit = np.ones(nd)
    for _ in range(cfg.max_retx):
        fail_given_deficit = fail_given_deficit @ fail_step
    joint = build_joint_table(ch, nd, nr)
    delivered_fail = 0.0
    p_fail_check = 0.0
    for md in range(nd + 1):
        for mr in range(nr + 1):
            total = md + mr
            if total <= nr:
                continue
            w = float(joint.q[md, mr]) * float(fail_given_deficit[total - nr - 1])
            delivered_fail += w * (nd - md)
            p_fail_check += w
    if not math.isclose(p_fail, p_fail_check, rel_tol=1e-9, abs_tol=1e-12):
        raise AssertionError(f"internal accounting mismatch: {p_fail} vs {p_fail_check}")

    delivered = nd * (1.0 - p_fail) + delivered_fail
    eta = delivered / expected_sent

    t0 = cfg.n_total * cfg.t_p
    delay = t0 + cfg.rtt / 2.0
    for r in range(1, cfg.max_retx + 1):
        delay += r_probs[r] * r * (cfg.rtt + round_sizes[r - 1] * cfg.t_p)
    return SchemePerformance(eta=eta, delay=delay, residual_loss=p_fail)


def evaluate_scheme(scheme: str, cfg, ch: ChannelParams) -> SchemePerformance:
    """Dispatch a scheme id ('fec', 'ifec', 'arq', 'harq2') to its model."""
    if scheme in ("fec", "ifec"):
        if not isinstance(cfg, FecConfig):
            raise TypeError("fec/ifec expects a FecConfig")
        return fec_performance(cfg, ch)
    if scheme == "arq":
        if not isinstance(cfg, ArqConfig):
            raise TypeError("arq expects an ArqConfig")
        return arq_performance(cfg, ch)
    if scheme == "harq2":
        if not isinstance(cfg, HarqConfig):
            raise TypeError("harq2 expects a HarqConfig")
        return harq_performance(cfg, ch)
    raise ValueError(f"unknown scheme {scheme!r}")


SWEEP_CSV_FIELDS = [
    "scheme",
    "alpha",
    "beta",
    "p",
    "burst_len",
    "eta",
    "delay_s",
    "residual_loss",
    "error",
]


def scheme_sweep(scheme: str, cfg, sweep, kind: str = "alphabeta") -> list[dict]:
    """Evaluate one scheme over a list of channel points.

    ``sweep`` is a list of (alpha, beta) pairs when ``kind='alphabeta'``
    or (p, mean_burst_len) pairs when ``kind='targets'``.  One row per
    point; a failing point yields NaN metrics plus an 'error' note, and
    the sweep continues.
    """
    if kind not in ("alphabeta", "targets"):
        raise ValueError("kind must be 'alphabeta' or 'targets'")
    rows = []
    for point in sweep:
        row = dict.fromkeys(SWEEP_CSV_FIELDS, math.nan)
        row["scheme"] = scheme
        row["error"] = ""
        try:
            if kind == "alphabeta":
                ch = ChannelParams(alpha=float(point[0]), beta=float(point[1]))
            else:
                ch = params_from_targets(float(point[0]), float(point[1]))
            stats = derive_stats(ch)
            row.update(
                alpha=ch.alpha,
                beta=ch.beta,
                p=stats.p,
                burst_len=stats.mean_burst_len,
            )
            perf = evaluate_scheme(scheme, cfg, ch)
            row.update(
                eta=perf.eta, delay_s=perf.delay, residual_loss=perf.residual_loss
            )
        except Exception as exc:  # noqa: BLE001 - sweep must keep going
            row["error"] = str(exc)
        rows.append(row)
    return rows


def sweep_rows_to_csv(rows: list[dict], path) -> None:
    """Write sweep rows with the fixed header; floats use repr for round-trip."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            out = {}
            for key in SWEEP_CSV_FIELDS:
                value = row.get(key, "")
                out[key] = repr(float(value)) if isinstance(value, float) else value
            writer.writerow(out)
