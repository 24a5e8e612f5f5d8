"""Physical-layer slot traces: generation, erasure injection, file I/O.

A trace file holds header lines ``# key=value`` (``tp`` is mandatory and
gives the slot duration in seconds) followed by one slot per line::

    <index> <time_s> <0|1> [opaque]

with 1 meaning the slot was erased.  Any trailing text after the third
field is preserved verbatim on a round trip, so foreign columns survive
processing.  Times must be strictly increasing; spacing other than ``tp``
is allowed but flagged via the ``uniform`` attribute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, sample_sequence

__all__ = [
    "PhyTrace",
    "TRACE_FORMAT_VERSION",
    "gen_error_free_trace",
    "inject_erasures",
    "load_phy_trace",
    "write_phy_trace",
]

TRACE_FORMAT_VERSION = "1"


@dataclass
class PhyTrace:
    """In-memory physical-layer trace.

    ``opaque`` is either None (no extra columns anywhere) or a list of
    per-slot strings ('' where a slot had none).
    """

    t_p: float
    index: np.ndarray
    times: np.ndarray
    erased: np.ndarray
    metadata: dict = field(default_factory=dict)
    opaque: list | None = None
    uniform: bool = True

    def __post_init__(self):
        self.index = np.asarray(self.index, dtype=np.int64)
        self.times = np.asarray(self.times, dtype=np.float64)
        self.erased = np.asarray(self.erased, dtype=bool)
        if not (self.index.size == self.times.size == self.erased.size):
            raise ValueError("index, times and erased must have equal length")
        if self.opaque is not None and len(self.opaque) != self.times.size:
            raise ValueError("opaque column length mismatch")
        if self.t_p <= 0.0:
            raise ValueError("t_p must be positive (seconds)")
        if self.times.size > 1:
            dt = np.diff(self.times)
            if not (dt > 0.0).all():
                bad = int(np.argmin(dt > 0.0))
                raise ValueError(
                    f"slot times must be strictly increasing (violated after row {bad})"
                )
            self.uniform = bool(np.abs(dt - self.t_p).max() <= 1e-9)
        else:
            self.uniform = True

    @property
    def n_slots(self) -> int:
        return int(self.times.size)

    @property
    def erasure_rate(self) -> float:
        return float(self.erased.mean()) if self.n_slots else 0.0


def gen_error_free_trace(duration_s: float, t_p: float) -> PhyTrace:
    """Error-free trace of floor(duration/t_p) uniformly spaced slots.

    The ratio is nudged by 1e-9 before flooring so that exact multiples
    survive binary floating point (500 s at 1 ms gives 500000 slots).
    """
    if duration_s <= 0.0:
        raise ValueError("duration_s must be positive (seconds)")
    if t_p <= 0.0:
        raise ValueError("t_p must be positive (seconds)")
    n = int(duration_s / t_p + 1e-9)
    if n < 1:
        raise ValueError("duration shorter than one slot")
    index = np.arange(n, dtype=np.int64)
    times = index * t_p
    erased = np.zeros(n, dtype=bool)
    metadata = {
        "source": "error-free",
        "duration_s": repr(float(duration_s)),
    }
    return PhyTrace(t_p=t_p, index=index, times=times, erased=erased, metadata=metadata)


def inject_erasures(trace: PhyTrace, ch: ChannelParams, seed: int) -> PhyTrace:
    """Overlay Markov-channel erasures on a trace (existing erasures are kept).

    Returns a new trace whose erased flags are the OR of the input flags
    and a seeded channel realization; the header records the channel
    parameters and seed for reproducibility.
    """
    seq = sample_sequence(ch, trace.n_slots, seed)
    metadata = dict(trace.metadata)
    metadata.update(
        injected="markov-2state",
        alpha=repr(float(ch.alpha)),
        beta=repr(float(ch.beta)),
        e_good=repr(float(ch.e_good)),
        e_bad=repr(float(ch.e_bad)),
        seed=str(int(seed)),
    )
    return PhyTrace(
        t_p=trace.t_p,
        index=trace.index.copy(),
        times=trace.times.copy(),
        erased=trace.erased | seq.slots,
        metadata=metadata,
        opaque=list(trace.opaque) if trace.opaque is not None else None,
    )


def write_phy_trace(trace: PhyTrace, path) -> None:
    """Write a trace file; floats use repr so a reload is bit-identical."""
    lines = [f"# version={TRACE_FORMAT_VERSION}", f"# tp={float(trace.t_p)!r}"]
    for key, value in trace.metadata.items():
        lines.append(f"# {key}={value}")
    index = trace.index.tolist()
    times = trace.times.tolist()
    erased = trace.erased.astype(np.int8).tolist()
    if trace.opaque is None:
        lines.extend(
            f"{index[k]} {times[k]!r} {erased[k]}" for k in range(trace.n_slots)
        )
    else:
        opaque = trace.opaque
        for k in range(trace.n_slots):
            extra = opaque[k]
            base = f"{index[k]} {times[k]!r} {erased[k]}"
            lines.append(f"{base} {extra}" if extra else base)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def load_phy_trace(path) -> PhyTrace:
    """Parse a trace file; malformed lines report their 1-based line number."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    metadata: dict = {}
    body_start = 0
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped:
            body_start = lineno
            continue
        if not stripped.startswith("#"):
            body_start = lineno - 1
            break
        body_start = lineno
        entry = stripped.lstrip("#").strip()
        if "=" not in entry:
            raise ValueError(f"line {lineno}: malformed header {line!r}")
        key, value = entry.split("=", 1)
        metadata[key.strip()] = value
    else:
        body_start = len(raw)

    tp_text = metadata.pop("tp", None)
    if tp_text is None:
        raise ValueError("missing mandatory 'tp' header")
    metadata.pop("version", None)
    try:
        t_p = float(tp_text)
    except ValueError as exc:
        raise ValueError(f"bad tp header value {tp_text!r}") from exc

    body = raw[body_start:]
    n = len(body)
    index = np.empty(n, dtype=np.int64)
    times = np.empty(n, dtype=np.float64)
    erased = np.empty(n, dtype=bool)
    opaque: list | None = None
    for k, line in enumerate(body):
        parts = line.split(" ", 3)
        if len(parts) < 3:
            raise ValueError(f"line {body_start + k + 1}: malformed slot line {line!r}")
        try:
            index[k] = int(parts[0])
            times[k] = float(parts[1])
            flag = int(parts[2])
        except ValueError as exc:
            raise ValueError(
                f"line {body_start + k + 1}: malformed slot line {line!r}"
            ) from exc
        if flag not in (0, 1):
            raise ValueError(
                f"line {body_start + k + 1}: erased flag must be 0 or 1, got {parts[2]!r}"
            )
        erased[k] = bool(flag)
        if len(parts) == 4:
            if opaque is None:
                opaque = [""] * n
            opaque[k] = parts[3]
    try:
        return PhyTrace(
            t_p=t_p,
            index=index,
            times=times,
            erased=erased,
            metadata=metadata,
            opaque=opaque,
        )
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
