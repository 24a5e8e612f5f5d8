"""Cross-validation harness and scheme comparison.

``validate_scheme`` sweeps a channel parameter, evaluates the closed-form
models and an independent Monte-Carlo measurement at every point, and
reports relative errors against configurable tolerances.  At least two
sweep points are additionally replayed through the trace tool so the fast
Monte-Carlo path and the trace path are checked against each other.

``compare_schemes`` evaluates several schemes on a common channel grid
and reports delay/efficiency orderings at the sweep extremes plus any
delay crossovers between ARQ and HARQ-II.

Reports are deterministic: per-point seeds are spawned from the master
seed and the point index, so serial and parallel evaluation orders give
bit-identical results.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, derive_stats, sample_sequence
from .montecarlo import McResult, monte_carlo_scheme
from .montecarlo import harq_monte_carlo as _harq_mc
from .schemes import ArqConfig, FecConfig, HarqConfig, evaluate_scheme
from .tmt import run_scheme
from .trace import PhyTrace

__all__ = [
    "SweepSpec",
    "ValidationReport",
    "ComparisonSpec",
    "ComparisonResult",
    "beta_range",
    "validate_scheme",
    "report_passed",
    "harq_monte_carlo",
    "compare_schemes",
    "validation_report_to_csv",
    "validation_summary",
    "comparison_to_csv",
    "comparison_summary",
    "REPORT_CSV_FIELDS",
    "COMPARISON_CSV_FIELDS",
]

REPORT_CSV_FIELDS = [
    "scheme",
    "alpha",
    "beta",
    "p",
    "t_b",
    "eta_analytic",
    "eta_measured",
    "delay_analytic",
    "delay_measured",
    "rel_err_eta",
    "rel_err_delay",
    "eta_ci95",
    "delay_ci95",
    "note",
]

COMPARISON_CSV_FIELDS = [
    "scheme",
    "alpha",
    "beta",
    "p",
    "eta",
    "delay_s",
    "residual_loss",
]


def beta_range(start: float, stop: float, step: float) -> tuple:
    """Inclusive β grid; step must be positive and the range nonempty."""
    if step <= 0:
        raise ValueError("step must be > 0")
    if stop < start:
        raise ValueError("empty range")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(start + k * step) for k in range(n))


@dataclass(frozen=True)
class SweepSpec:
    """One validation sweep: fixed α, varying β.

    `blocks` is the Monte-Carlo sample size per point (transmission units:
    codewords for fec/ifec, LLDUs for arq, blocks for harq2).  `t_p` is
    only consulted for schemes whose config carries no slot duration
    (arq).  Trace spot checks replay `spot_points` sweep points through
    the trace tool with `spot_blocks` blocks and require agreement with
    the Monte-Carlo measurement within `spot_tol` relative.
    """

    scheme: str
    config: object
    alpha: float
    betas: tuple
    e_good: float = 0.0
    e_bad: float = 1.0
    blocks: int = 200_000
    seed: int = 1729
    t_p: float = 1e-3
    spot_points: int = 2
    spot_blocks: int = 150_000
    spot_tol: float = 0.01

    def __post_init__(self):
        if not self.betas:
            raise ValueError("betas must be nonempty")
        if self.blocks < 1:
            raise ValueError("blocks must be >= 1")


@dataclass
class ValidationReport:
    scheme: str
    rows: list
    tol_eta: float
    tol_delay: float
    max_rel_err_eta: float
    mean_rel_err_eta: float
    max_rel_err_delay: float
    mean_rel_err_delay: float
    passed: bool
    spot_checks: list = field(default_factory=list)
    spot_checks_ok: bool = True
    notes: list = field(default_factory=list)


def _rel_err(measured: float, analytic: float) -> float:
    if math.isnan(measured) or math.isnan(analytic):
        return math.nan
    if analytic == 0.0:
        return 0.0 if measured == 0.0 else math.inf
    return abs(measured - analytic) / abs(analytic)


def report_passed(rows: list, tol_eta: float, tol_delay: float) -> bool:
    """Pure pass/fail decision from report rows and tolerances."""
    for row in rows:
        if row.get("note"):
            return False
        re_eta = row["rel_err_eta"]
        re_delay = row["rel_err_delay"]
        if math.isnan(re_eta) or math.isnan(re_delay):
            return False
        if re_eta > tol_eta or re_delay > tol_delay:
            return False
    return bool(rows)


def _config_tp(config, fallback: float) -> float:
    return float(getattr(config, "t_p", fallback))


def _block_slots(scheme: str, config) -> int:
    if scheme in ("fec", "ifec"):
        return config.n_total * config.interleave_depth
    if scheme == "arq":
        return 1
    return config.n_total


def _spot_check(spec: SweepSpec, beta: float, point_index: int, mc_row: dict) -> dict:
    """Replay one sweep point through the trace tool and compare."""
    ch = ChannelParams(spec.alpha, beta, spec.e_good, spec.e_bad)
    t_p = _config_tp(spec.config, spec.t_p)
    n_slots = spec.spot_blocks * _block_slots(spec.scheme, spec.config)
    seq = sample_sequence(
        ch, n_slots, seed=np.random.SeedSequence([spec.seed, 10_000 + point_index])
    )
    trace = PhyTrace(
        t_p=t_p,
        index=np.arange(n_slots, dtype=np.int64),
        times=np.arange(n_slots, dtype=np.float64) * t_p,
        erased=seq.slots,
        metadata={"source": "spot-check", "alpha": repr(spec.alpha), "beta": repr(beta)},
    )
    _, metrics = run_scheme(trace, spec.scheme, spec.config)
    rel_eta = _rel_err(metrics.eta_measured, mc_row["eta_measured"])
    rel_delay = _rel_err(metrics.mean_delay_s, mc_row["delay_measured"])
    return {
        "beta": float(beta),
        "eta_mc": mc_row["eta_measured"],
        "eta_tmt": metrics.eta_measured,
        "delay_mc": mc_row["delay_measured"],
        "delay_tmt": metrics.mean_delay_s,
        "rel_eta": rel_eta,
        "rel_delay": rel_delay,
        "agrees": bool(rel_eta <= spec.spot_tol and rel_delay <= spec.spot_tol),
    }


def validate_scheme(
    spec: SweepSpec, tol_eta: float = 0.02, tol_delay: float = 0.05
) -> ValidationReport:
    """Analytic-vs-measured sweep; per-point failures are recorded as
    annotated NaN rows and fail the report rather than aborting it."""
    rows = []
    notes = []
    for i, beta in enumerate(spec.betas):
        row = dict.fromkeys(REPORT_CSV_FIELDS, math.nan)
        row["scheme"] = spec.scheme
        row["alpha"] = float(spec.alpha)
        row["beta"] = float(beta)
        row["note"] = ""
        try:
            ch = ChannelParams(spec.alpha, beta, spec.e_good, spec.e_bad)
            stats = derive_stats(ch)
            perf = evaluate_scheme(spec.scheme, spec.config, ch)
            mc = monte_carlo_scheme(
                spec.scheme,
                spec.config,
                ch,
                spec.blocks,
                seed=np.random.SeedSequence([spec.seed, i]),
            )
            row["p"] = stats.p
            row["t_b"] = stats.mean_burst_len
            row["eta_analytic"] = perf.eta
            row["eta_measured"] = mc.eta
            row["delay_analytic"] = perf.delay
            row["delay_measured"] = mc.delay_s
            row["rel_err_eta"] = _rel_err(mc.eta, perf.eta)
            row["rel_err_delay"] = _rel_err(mc.delay_s, perf.delay)
            row["eta_ci95"] = 1.96 * mc.eta_se
            row["delay_ci95"] = 1.96 * mc.delay_se
        except Exception as exc:  # recorded, sweep continues
            row["note"] = f"error: {exc}"
            notes.append(f"beta={beta}: {exc}")
        rows.append(row)

    valid_eta = [r["rel_err_eta"] for r in rows if not r["note"]]
    valid_delay = [r["rel_err_delay"] for r in rows if not r["note"]]
    passed = report_passed(rows, tol_eta, tol_delay)

    spot_checks = []
    if spec.spot_points > 0:
        k = min(spec.spot_points, len(spec.betas))
        picks = sorted(
            {int(round(j * (len(spec.betas) - 1) / max(1, k - 1))) for j in range(k)}
        )
        for idx in picks:
            if rows[idx]["note"]:
                continue
            try:
                spot_checks.append(_spot_check(spec, spec.betas[idx], idx, rows[idx]))
            except Exception as exc:
                notes.append(f"spot check beta={spec.betas[idx]}: {exc}")
                spot_checks.append(
                    {"beta": float(spec.betas[idx]), "agrees": False, "error": str(exc)}
                )

    return ValidationReport(
        scheme=spec.scheme,
        rows=rows,
        tol_eta=tol_eta,
        tol_delay=tol_delay,
        max_rel_err_eta=max(valid_eta) if valid_eta else math.nan,
        mean_rel_err_eta=float(np.mean(valid_eta)) if valid_eta else math.nan,
        max_rel_err_delay=max(valid_delay) if valid_delay else math.nan,
        mean_rel_err_delay=float(np.mean(valid_delay)) if valid_delay else math.nan,
        passed=passed,
        spot_checks=spot_checks,
        spot_checks_ok=all(c.get("agrees", False) for c in spot_checks),
        notes=notes,
    )


def harq_monte_carlo(cfg: HarqConfig, params: ChannelParams, blocks: int, seed=None):
    """General-R HARQ-II simulation oracle.

    Returns (eta, delay_s, round_hist, sent_hist).  round_hist maps the
    decoding round (0..max_retx, -1 for dropped) to its frequency;
    sent_hist maps total LLDUs sent per block to its frequency; both sum
    to 1.
    """
    res = _harq_mc(cfg, params, blocks, seed)
    round_freq = res.aux["round_freq"]
    round_hist = {int(r): float(f) for r, f in enumerate(round_freq)}
    round_hist[-1] = res.aux["drop_freq"]
    return res.eta, res.delay_s, round_hist, res.aux["sent_hist"]


@dataclass(frozen=True)
class ComparisonSpec:
    """Multi-scheme analytic comparison on a common channel grid."""

    alpha: float
    betas: tuple
    n_data: int
    n_repair: int
    rtt: float
    t_p: float
    n_supp: int = 2
    max_retx: int = 2
    arq_max_retx: int | None = None
    e_good: float = 0.0
    e_bad: float = 1.0
    schemes: tuple = ("arq", "fec", "harq2")

    def __post_init__(self):
        if not self.betas:
            raise ValueError("betas must be nonempty")

    def config_for(self, scheme: str):
        if scheme in ("fec", "ifec"):
            return FecConfig(self.n_data, self.n_repair, self.rtt, self.t_p)
        if scheme == "arq":
            return ArqConfig(self.rtt, self.arq_max_retx)
        if scheme == "harq2":
            return HarqConfig(
                self.n_data, self.n_repair, self.rtt, self.t_p,
                n_supp=self.n_supp, max_retx=self.max_retx,
            )
        raise ValueError(f"unknown scheme {scheme!r}")


@dataclass
class ComparisonResult:
    rows: list
    findings: dict


def _sign_changes(diff: list) -> list:
    """Index pairs (i, j) between which the sign of diff flips (zeros and
    NaNs are skipped, so i is the last point with the previous sign)."""
    out = []
    prev_idx = None
    prev_sign = 0
    for k, v in enumerate(diff):
        if math.isnan(v) or v == 0.0:
            continue
        sign = 1 if v > 0 else -1
        if prev_sign and sign != prev_sign:
            out.append((prev_idx, k))
        prev_sign, prev_idx = sign, k
    return out


def compare_schemes(spec: ComparisonSpec) -> ComparisonResult:
    """Evaluate every scheme at every grid point (analytic models only).

    Findings cover the ARQ/HARQ-II delay comparison: values and ordering
    at the extreme erasure rates, crossover intervals on the grid, and
    whether the pattern "ARQ faster at low p, HARQ-II faster at high p
    with a single crossover" holds.
    """
    betas = sorted(spec.betas, key=lambda b: derive_stats(
        ChannelParams(spec.alpha, b, spec.e_good, spec.e_bad)).p)
    rows = []
    by_scheme: dict = {s: [] for s in spec.schemes}
    ps = []
    for beta in betas:
        ch = ChannelParams(spec.alpha, beta, spec.e_good, spec.e_bad)
        p = derive_stats(ch).p
        ps.append(p)
        for scheme in spec.schemes:
            perf = evaluate_scheme(scheme, spec.config_for(scheme), ch)
            rows.append(
                {
                    "scheme": scheme,
                    "alpha": float(spec.alpha),
                    "beta": float(beta),
                    "p": p,
                    "eta": perf.eta,
                    "delay_s": perf.delay,
                    "residual_loss": perf.residual_loss,
                }
            )
            by_scheme[scheme].append(perf)

    findings: dict = {"p_min": ps[0], "p_max": ps[-1]}
    for scheme in spec.schemes:
        findings[f"{scheme}_eta_at_p_min"] = by_scheme[scheme][0].eta
        findings[f"{scheme}_eta_at_p_max"] = by_scheme[scheme][-1].eta
        findings[f"{scheme}_delay_at_p_min"] = by_scheme[scheme][0].delay
        findings[f"{scheme}_delay_at_p_max"] = by_scheme[scheme][-1].delay

    if "arq" in by_scheme and "harq2" in by_scheme:
        diff = [
            a.delay - h.delay
            for a, h in zip(by_scheme["arq"], by_scheme["harq2"])
        ]
        changes = _sign_changes(diff)
        findings["arq_faster_at_low_p"] = diff[0] < 0
        findings["harq_faster_at_high_p"] = diff[-1] > 0
        findings["delay_crossovers"] = [
            {
                "beta_low": betas[i],
                "beta_high": betas[j],
                "p_low": ps[i],
                "p_high": ps[j],
            }
            for i, j in changes
        ]
        findings["crossover_count"] = len(changes)
        findings["claim_holds"] = bool(
            diff[0] < 0 and diff[-1] > 0 and len(changes) == 1
        )
    return ComparisonResult(rows=rows, findings=findings)


def validation_report_to_csv(report: ValidationReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in report.rows:
            writer.writerow({k: row.get(k, "") for k in REPORT_CSV_FIELDS})


def validation_summary(report: ValidationReport) -> str:
    lines = [
        f"scheme={report.scheme}",
        f"points={len(report.rows)}",
        f"max_rel_err_eta={report.max_rel_err_eta!r}",
        f"mean_rel_err_eta={report.mean_rel_err_eta!r}",
        f"max_rel_err_delay={report.max_rel_err_delay!r}",
        f"mean_rel_err_delay={report.mean_rel_err_delay!r}",
        f"tol_eta={report.tol_eta!r}",
        f"tol_delay={report.tol_delay!r}",
        f"passed={report.passed}",
        f"spot_checks={len(report.spot_checks)}",
        f"spot_checks_ok={report.spot_checks_ok}",
    ]
    for note in report.notes:
        lines.append(f"note={note}")
    return "\n".join(lines) + "\n"


def comparison_to_csv(result: ComparisonResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=COMPARISON_CSV_FIELDS, extrasaction="ignore"
        )
        writer.writeheader()
        for row in result.rows:
            writer.writerow(row)


def comparison_summary(result: ComparisonResult) -> str:
    lines = []
    for key, value in result.findings.items():
        if key == "delay_crossovers":
            for c in value:
                lines.append(
                    "delay_crossover="
                    f"beta:[{c['beta_low']!r},{c['beta_high']!r}]"
                    f",p:[{c['p_low']!r},{c['p_high']!r}]"
                )
            continue
        lines.append(f"{key}={value!r}")
    return "\n".join(lines) + "\n"
