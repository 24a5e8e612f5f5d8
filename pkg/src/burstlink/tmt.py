"""Trace Manager Tool: replay a reliability scheme over a physical trace.

``run_scheme`` walks a physical-layer slot trace, emulates FEC,
interleaved FEC, ARQ or HARQ-II at the link layer, and returns the link
trace (one record per IP packet) plus measured metrics.

Retransmissions read the trace ``ceil(RTT / t_p)`` slots further on, so
their channel state is what the channel actually did one RTT later;
indices wrap modulo the trace length so finite traces stay usable (the
wrap distance is orders of magnitude beyond the burst coherence time).
Retransmitted/extra LLDUs consume those slots in the efficiency
denominator but do not steal slots from later packets: the stream is
pipelined, so packet k+1's first transmission follows packet k's
directly.

Delay conventions (measured side):

* FEC/iFEC: per delivered data LLDU, RTT/2 when received directly,
  RTT/2 + (decode time - own slot time) when recovered by the code;
  metrics average over all delivered data LLDUs.
* ARQ: per delivered LLDU, RTT/2 + transmissions * RTT (each attempt
  costs one acknowledgement cycle).
* HARQ-II: per delivered packet, RTT/2 + (decode time - first slot time).

Times of recovery events are computed arithmetically from the first slot
time, the slot duration and the slot-quantized round trip
``ceil(RTT/t_p) * t_p``, which keeps them exact on uniform traces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .schemes import ArqConfig, FecConfig, HarqConfig
from .trace import PhyTrace

__all__ = [
    "LinkRecord",
    "LinkTrace",
    "Metrics",
    "run_scheme",
    "export_link_trace",
    "load_link_trace",
    "metrics_to_text",
    "write_metrics",
    "LINK_CSV_FIELDS",
]

LINK_CSV_FIELDS = [
    "ip_id",
    "send_time_s",
    "decode_time_s_or_DROP",
    "transmissions",
    "lldus_sent",
    "data_delivered",
]

_DROP = "DROP"


@dataclass(frozen=True)
class LinkRecord:
    """One IP packet at the link layer; ``decode_time`` is None when dropped."""

    ip_id: int
    first_slot_time: float
    decode_time: float | None
    transmissions: int
    lldus_sent: int
    data_delivered: int


@dataclass
class LinkTrace:
    """Column-oriented sequence of LinkRecord (NaN decode time = dropped)."""

    ip_id: np.ndarray
    first_slot_time: np.ndarray
    decode_time: np.ndarray
    transmissions: np.ndarray
    lldus_sent: np.ndarray
    data_delivered: np.ndarray

    def __post_init__(self):
        self.ip_id = np.asarray(self.ip_id, dtype=np.int64)
        self.first_slot_time = np.asarray(self.first_slot_time, dtype=np.float64)
        self.decode_time = np.asarray(self.decode_time, dtype=np.float64)
        self.transmissions = np.asarray(self.transmissions, dtype=np.int64)
        self.lldus_sent = np.asarray(self.lldus_sent, dtype=np.int64)
        self.data_delivered = np.asarray(self.data_delivered, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.ip_id.size)

    def __getitem__(self, k) -> LinkRecord:
        if isinstance(k, slice):
            raise TypeError("slicing not supported; index records individually")
        k = int(k)
        dt = float(self.decode_time[k])
        return LinkRecord(
            ip_id=int(self.ip_id[k]),
            first_slot_time=float(self.first_slot_time[k]),
            decode_time=None if math.isnan(dt) else dt,
            transmissions=int(self.transmissions[k]),
            lldus_sent=int(self.lldus_sent[k]),
            data_delivered=int(self.data_delivered[k]),
        )

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def delivered_mask(self) -> np.ndarray:
        return ~np.isnan(self.decode_time)


@dataclass(frozen=True)
class Metrics:
    """Measured link-layer metrics.

    ``eta_measured`` is delivered data LLDUs over LLDU slots consumed;
    delays follow the per-scheme conventions in the module docstring;
    ``retx_histogram`` maps transmission counts to frequencies (sums to 1
    over all records, dropped ones included); ``warnings`` counts
    discarded partial trailing blocks.
    """

    eta_measured: float
    mean_delay_s: float
    p95_delay_s: float
    drop_rate: float
    retx_histogram: dict = field(default_factory=dict)
    warnings: int = 0


def _rtt_slots(rtt: float, t_p: float) -> int:
    return max(1, math.ceil(rtt / t_p - 1e-9))


def _histogram(transmissions: np.ndarray) -> dict:
    values, counts = np.unique(transmissions, return_counts=True)
    total = float(transmissions.size)
    return {int(v): float(c) / total for v, c in zip(values, counts)}


def _finish_metrics(
    link: LinkTrace, delays: np.ndarray, slots_consumed: int, warnings: int
) -> Metrics:
    delivered = link.delivered_mask
    eta = float(link.data_delivered.sum()) / float(slots_consumed)
    if delays.size:
        mean_delay = float(delays.mean())
        p95 = float(np.percentile(delays, 95.0))
    else:
        mean_delay = math.nan
        p95 = math.nan
    return Metrics(
        eta_measured=eta,
        mean_delay_s=mean_delay,
        p95_delay_s=p95,
        drop_rate=1.0 - float(delivered.mean()) if len(link) else math.nan,
        retx_histogram=_histogram(link.transmissions),
        warnings=warnings,
    )


def _run_fec(trace: PhyTrace, cfg: FecConfig):
    n = cfg.n_total
    nd = cfg.n_data
    depth = cfg.interleave_depth
    t_p = trace.t_p
    frame = n * depth
    n_frames = trace.n_slots // frame
    if n_frames < 1:
        raise ValueError(
            f"trace too short: {trace.n_slots} slots < one frame of {frame}"
        )
    leftover = trace.n_slots - n_frames * frame
    warnings = 1 if leftover else 0
    used = n_frames * frame
    # slot f*frame + k*depth + j belongs to codeword j at position k
    erz = trace.erased[:used].reshape(n_frames, n, depth)
    times = trace.times[:used].reshape(n_frames, n, depth)

    m_total = erz.sum(axis=1)
    m_data = erz[:, :nd, :].sum(axis=1)
    decode_ok = m_total <= cfg.n_repair
    block_end = times[:, n - 1, :] + t_p
    data_end = times[:, nd - 1, :] + t_p
    delivered_mask = (m_data == 0) | decode_ok
    decode_time = np.where(
        m_data == 0, data_end, np.where(decode_ok, block_end, np.nan)
    )
    data_delivered = np.where(decode_ok, nd, nd - m_data)

    n_blocks = n_frames * depth
    link = LinkTrace(
        ip_id=np.arange(n_blocks, dtype=np.int64),
        first_slot_time=times[:, 0, :].reshape(-1),
        decode_time=decode_time.reshape(-1),
        transmissions=np.ones(n_blocks, dtype=np.int64),
        lldus_sent=np.full(n_blocks, n, dtype=np.int64),
        data_delivered=data_delivered.reshape(-1),
    )

    half_rtt = cfg.rtt / 2.0
    direct_count = int((nd * n_blocks) - m_data.sum())
    recovered_mask = erz[:, :nd, :] & (decode_ok & (m_data > 0))[:, None, :]
    recovered_wait = (np.broadcast_to(block_end[:, None, :], times[:, :nd, :].shape) - times[:, :nd, :])[recovered_mask]
    delays = np.concatenate(
        [np.full(direct_count, half_rtt), half_rtt + recovered_wait]
    )
    return link, _finish_metrics(link, delays, used, warnings)


def _run_arq(trace: PhyTrace, cfg: ArqConfig):
    n = trace.n_slots
    if n < 1:
        raise ValueError("empty trace")
    t_p = trace.t_p
    lag = _rtt_slots(cfg.rtt, t_p)
    rtt_eff = lag * t_p

    tries = np.ones(n, dtype=np.int64)
    pending = trace.erased.copy()
    positions = np.arange(n, dtype=np.int64)
    attempt = 0
    budget = math.inf if cfg.max_retx is None else cfg.max_retx
    while pending.any():
        if attempt >= budget:
            break
        attempt += 1
        if attempt > 100_000:
            raise RuntimeError("ARQ retransmission loop did not converge")
        active = np.nonzero(pending)[0]
        idx = (active + attempt * lag) % n
        still = trace.erased[idx]
        tries[active] += 1
        pending[active] = still

    delivered = ~pending
    decode_time = np.where(
        delivered, trace.times + (tries - 1) * rtt_eff + t_p, np.nan
    )
    link = LinkTrace(
        ip_id=positions,
        first_slot_time=trace.times,
        decode_time=decode_time,
        transmissions=tries,
        lldus_sent=tries,
        data_delivered=delivered.astype(np.int64),
    )
    delays = cfg.rtt / 2.0 + tries[delivered] * cfg.rtt
    return link, _finish_metrics(link, delays, int(tries.sum()), 0)


def _run_harq(trace: PhyTrace, cfg: HarqConfig):
    n = cfg.n_total
    nd, nr, ns = cfg.n_data, cfg.n_repair, cfg.n_supp
    budget = cfg.max_retx
    t_p = trace.t_p
    lag = _rtt_slots(cfg.rtt, t_p)
    rtt_eff = lag * t_p
    n_trace = trace.n_slots
    n_blocks = n_trace // n
    if n_blocks < 1:
        raise ValueError(f"trace too short: {n_trace} slots < one block of {n}")
    warnings = 1 if n_trace % n else 0
    erased = trace.erased

    ip_id = np.arange(n_blocks, dtype=np.int64)
    first_t = trace.times[np.arange(n_blocks) * n]
    decode_time = np.full(n_blocks, np.nan)
    transmissions = np.ones(n_blocks, dtype=np.int64)
    lldus_sent = np.full(n_blocks, n, dtype=np.int64)
    data_delivered = np.zeros(n_blocks, dtype=np.int64)

    blocks = erased[: n_blocks * n].reshape(n_blocks, n)
    m0 = blocks.sum(axis=1)
    m_data0 = blocks[:, :nd].sum(axis=1)

    for b in range(n_blocks):
        base_wait = n * t_p
        if m0[b] <= nr:
            decode_time[b] = first_t[b] + base_wait
            data_delivered[b] = nd
            continue
        deficit = int(m0[b]) - nr
        consumed = 0
        extra = 0.0
        decoded = False
        for r in range(1, budget + 1):
            c = deficit + ns
            start = b * n + n + consumed + r * lag
            idx = (start + np.arange(c)) % n_trace
            e = int(erased[idx].sum())
            consumed += c
            lldus_sent[b] += c
            transmissions[b] += 1
            extra += rtt_eff + c * t_p
            if e <= ns:
                decoded = True
                break
            deficit = e - ns
        if decoded:
            decode_time[b] = first_t[b] + base_wait + extra
            data_delivered[b] = nd
        else:
            data_delivered[b] = nd - int(m_data0[b])

    link = LinkTrace(
        ip_id=ip_id,
        first_slot_time=first_t,
        decode_time=decode_time,
        transmissions=transmissions,
        lldus_sent=lldus_sent,
        data_delivered=data_delivered,
    )
    delivered = link.delivered_mask
    delays = cfg.rtt / 2.0 + (decode_time[delivered] - first_t[delivered])
    return link, _finish_metrics(link, delays, int(lldus_sent.sum()), warnings)


def run_scheme(trace: PhyTrace, scheme: str, cfg):
    """Run one reliability scheme over a trace.

    Returns (LinkTrace, Metrics).  The RTT comes from the config; the slot
    duration from the trace itself.
    """
    if scheme in ("fec", "ifec"):
        if not isinstance(cfg, FecConfig):
            raise TypeError("fec/ifec expects a FecConfig")
        return _run_fec(trace, cfg)
    if scheme == "arq":
        if not isinstance(cfg, ArqConfig):
            raise TypeError("arq expects an ArqConfig")
        return _run_arq(trace, cfg)
    if scheme == "harq2":
        if not isinstance(cfg, HarqConfig):
            raise TypeError("harq2 expects a HarqConfig")
        return _run_harq(trace, cfg)
    raise ValueError(f"unknown scheme {scheme!r}")


def export_link_trace(link: LinkTrace, path) -> None:
    """Write the link trace as CSV, sorted by ip_id; dropped packets show DROP."""
    order = np.argsort(link.ip_id, kind="stable")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LINK_CSV_FIELDS)
        for k in order:
            dt = link.decode_time[k]
            writer.writerow(
                [
                    int(link.ip_id[k]),
                    repr(float(link.first_slot_time[k])),
                    _DROP if math.isnan(dt) else repr(float(dt)),
                    int(link.transmissions[k]),
                    int(link.lldus_sent[k]),
                    int(link.data_delivered[k]),
                ]
            )


def load_link_trace(path) -> LinkTrace:
    """Parse a link trace CSV written by export_link_trace."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != LINK_CSV_FIELDS:
            raise ValueError(f"unexpected link trace header: {header!r}")
        rows = list(reader)
    n = len(rows)
    ip_id = np.empty(n, dtype=np.int64)
    first = np.empty(n, dtype=np.float64)
    decode = np.empty(n, dtype=np.float64)
    trans = np.empty(n, dtype=np.int64)
    sent = np.empty(n, dtype=np.int64)
    delivered = np.empty(n, dtype=np.int64)
    for k, row in enumerate(rows):
        if len(row) != 6:
            raise ValueError(f"link trace row {k + 2}: expected 6 fields, got {len(row)}")
        ip_id[k] = int(row[0])
        first[k] = float(row[1])
        decode[k] = math.nan if row[2] == _DROP else float(row[2])
        trans[k] = int(row[3])
        sent[k] = int(row[4])
        delivered[k] = int(row[5])
    return LinkTrace(
        ip_id=ip_id,
        first_slot_time=first,
        decode_time=decode,
        transmissions=trans,
        lldus_sent=sent,
        data_delivered=delivered,
    )


def metrics_to_text(metrics: Metrics) -> str:
    """Flat key=value rendering (one pair per line) for files and stdout."""
    lines = [
        f"eta={metrics.eta_measured!r}",
        f"mean_delay_s={metrics.mean_delay_s!r}",
        f"p95_delay_s={metrics.p95_delay_s!r}",
        f"drop_rate={metrics.drop_rate!r}",
    ]
    for k in sorted(metrics.retx_histogram):
        lines.append(f"retx_{k}={metrics.retx_histogram[k]!r}")
    lines.append(f"warnings={metrics.warnings}")
    return "\n".join(lines) + "\n"


def write_metrics(metrics: Metrics, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(metrics_to_text(metrics))
