"""Command-line front end.

Subcommands: gen-phy, inject, run, analytic, validate, compare.  All
times are in seconds, all probabilities unitless in [0, 1].  Every
command is deterministic: random seeds default to the fixed constant
DEFAULT_SEED (never the wall clock) and can be overridden with --seed.

Exit codes: 0 success (validation pass), 1 runtime or validation
failure, 2 usage error.  Each command prints a one-line key=value
summary to standard output.
"""

from __future__ import annotations

import argparse
import sys

from .channel import ChannelParams, params_from_targets
from .schemes import (
    ArqConfig,
    FecConfig,
    HarqConfig,
    scheme_sweep,
    sweep_rows_to_csv,
)
from .tmt import export_link_trace, run_scheme, write_metrics
from .trace import gen_error_free_trace, inject_erasures, load_phy_trace, write_phy_trace
from .validation import (
    ComparisonSpec,
    SweepSpec,
    beta_range,
    compare_schemes,
    comparison_summary,
    comparison_to_csv,
    validate_scheme,
    validation_report_to_csv,
    validation_summary,
)

__all__ = ["main", "build_parser", "DEFAULT_SEED"]

DEFAULT_SEED = 1729

_SCHEMES = ("fec", "ifec", "arq", "harq2")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _parse_sweep(text: str):
    """beta=0.1:0.9:0.1 or p=0.01:0.3:0.01 -> (key, values tuple)."""
    try:
        key, _, rng = text.partition("=")
        start_s, stop_s, step_s = rng.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected key=start:stop:step, got {text!r}"
        ) from exc
    if key not in ("beta", "p"):
        raise argparse.ArgumentTypeError("sweep key must be 'beta' or 'p'")
    try:
        values = beta_range(start, stop, step)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not values:
        raise argparse.ArgumentTypeError("empty sweep")
    return key, values


def _parse_betas(text: str):
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad beta list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty beta list")
    return values


def _parse_beta_range(text: str):
    try:
        start_s, stop_s, step_s = text.split(":")
        return beta_range(float(start_s), float(stop_s), float(step_s))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected start:stop:step, got {text!r}"
        ) from exc


def _add_channel_flags(sub, with_targets: bool = True):
    sub.add_argument("--alpha", type=_probability,
                     help="P(stay Good) per slot, unitless in [0,1]")
    sub.add_argument("--beta", type=_probability,
                     help="P(stay Bad) per slot, unitless in [0,1]")
    sub.add_argument("--pg", type=_probability, default=None,
                     help="erasure probability in Good state (default 0)")
    sub.add_argument("--pb", type=_probability, default=None,
                     help="erasure probability in Bad state (default 1)")
    if with_targets:
        sub.add_argument("--p", type=_probability, default=None,
                         help="target mean erasure probability, unitless")
        sub.add_argument("--burst", type=_positive_float, default=None,
                         help="target mean erasure burst length, slots")


def _add_scheme_flags(sub, include_tp: bool):
    sub.add_argument("--scheme", required=True, choices=_SCHEMES,
                     help="reliability scheme")
    sub.add_argument("--nd", type=_positive_int, default=None,
                     help="data LLDUs per block (fec/ifec/harq2)")
    sub.add_argument("--nr", type=_nonneg_int, default=None,
                     help="repair LLDUs per block (fec/ifec/harq2)")
    sub.add_argument("--ns", type=_nonneg_int, default=2,
                     help="supplementary repair LLDUs per HARQ round (default 2)")
    sub.add_argument("--max-retx", type=_nonneg_int, default=None,
                     help="retransmission budget: default unbounded for arq, 2 for harq2")
    sub.add_argument("--depth", type=_positive_int, default=1,
                     help="interleaving depth in codewords (ifec; default 1)")
    sub.add_argument("--rtt", type=_positive_float, required=True,
                     help="round-trip time, seconds")
    if include_tp:
        sub.add_argument("--tp", type=_positive_float, default=1e-3,
                         help="physical slot duration, seconds (default 0.001)")


def _scheme_config(args, parser, t_p: float):
    scheme = args.scheme
    if scheme in ("fec", "ifec", "harq2"):
        if args.nd is None or args.nr is None:
            parser.error(f"--nd and --nr are required for --scheme {scheme}")
    if scheme in ("fec", "ifec"):
        return FecConfig(args.nd, args.nr, args.rtt, t_p,
                         interleave_depth=args.depth)
    if scheme == "arq":
        return ArqConfig(args.rtt, args.max_retx)
    budget = 2 if args.max_retx is None else args.max_retx
    return HarqConfig(args.nd, args.nr, args.rtt, t_p,
                      n_supp=args.ns, max_retx=budget)


def _channel_from_args(args, parser) -> ChannelParams:
    markov = args.alpha is not None or args.beta is not None
    targets = getattr(args, "p", None) is not None or getattr(args, "burst", None) is not None
    if markov and targets:
        parser.error("give either --alpha/--beta or --p/--burst, not both")
    if markov:
        if args.alpha is None or args.beta is None:
            parser.error("--alpha and --beta must be given together")
        pg = 0.0 if args.pg is None else args.pg
        pb = 1.0 if args.pb is None else args.pb
        return ChannelParams(args.alpha, args.beta, pg, pb)
    if targets:
        if args.p is None or args.burst is None:
            parser.error("--p and --burst must be given together")
        if args.pg is not None or args.pb is not None:
            parser.error("--pg/--pb apply only to the --alpha/--beta form")
        return params_from_targets(args.p, args.burst)
    parser.error("channel parameters required (--alpha/--beta or --p/--burst)")


def _cmd_gen_phy(args, parser) -> int:
    trace = gen_error_free_trace(args.duration, args.tp)
    write_phy_trace(trace, args.out)
    print(f"slots={trace.n_slots} t_p={trace.t_p!r} out={args.out}")
    return 0


def _cmd_inject(args, parser) -> int:
    ch = _channel_from_args(args, parser)
    trace = load_phy_trace(args.inp)
    out = inject_erasures(trace, ch, args.seed)
    write_phy_trace(out, args.out)
    print(
        f"slots={out.n_slots} erasure_rate={out.erasure_rate!r} "
        f"alpha={ch.alpha!r} beta={ch.beta!r} seed={args.seed} out={args.out}"
    )
    return 0


def _cmd_run(args, parser) -> int:
    trace = load_phy_trace(args.inp)
    cfg = _scheme_config(args, parser, trace.t_p)
    link, metrics = run_scheme(trace, args.scheme, cfg)
    export_link_trace(link, args.out_link)
    write_metrics(metrics, args.out_metrics)
    print(
        f"scheme={args.scheme} records={len(link)} "
        f"eta={metrics.eta_measured!r} mean_delay_s={metrics.mean_delay_s!r} "
        f"p95_delay_s={metrics.p95_delay_s!r} drop_rate={metrics.drop_rate!r} "
        f"warnings={metrics.warnings}"
    )
    return 0


def _cmd_analytic(args, parser) -> int:
    cfg = _scheme_config(args, parser, args.tp)
    key, values = args.sweep
    if key == "beta":
        if args.alpha is None:
            parser.error("--alpha is required for a beta sweep")
        points = [(args.alpha, b) for b in values]
        kind = "alphabeta"
    else:
        if args.burst is None:
            parser.error("--burst is required for a p sweep")
        points = [(p, args.burst) for p in values]
        kind = "targets"
    rows = scheme_sweep(args.scheme, cfg, points, kind=kind)
    sweep_rows_to_csv(rows, args.out)
    errors = sum(1 for r in rows if r.get("error"))
    print(f"scheme={args.scheme} points={len(rows)} errors={errors} out={args.out}")
    return 0 if errors == 0 else 1


def _betas_from_args(args, parser):
    if args.betas is not None and args.beta_range is not None:
        parser.error("give either --betas or --beta-range, not both")
    if args.betas is not None:
        return args.betas
    if args.beta_range is not None:
        return args.beta_range
    parser.error("a beta grid is required (--betas or --beta-range)")


def _cmd_validate(args, parser) -> int:
    betas = _betas_from_args(args, parser)
    cfg = _scheme_config(args, parser, args.tp)
    spec = SweepSpec(
        scheme=args.scheme,
        config=cfg,
        alpha=args.alpha,
        betas=tuple(betas),
        blocks=args.blocks,
        seed=args.seed,
        t_p=args.tp,
        spot_points=args.spot_points,
        spot_blocks=args.spot_blocks,
    )
    report = validate_scheme(spec, tol_eta=args.tol_eta, tol_delay=args.tol_delay)
    if args.out:
        validation_report_to_csv(report, args.out)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(validation_summary(report))
    print(
        f"scheme={report.scheme} points={len(report.rows)} "
        f"max_rel_err_eta={report.max_rel_err_eta!r} "
        f"max_rel_err_delay={report.max_rel_err_delay!r} "
        f"spot_checks_ok={report.spot_checks_ok} passed={report.passed}"
    )
    return 0 if report.passed and report.spot_checks_ok else 1


def _cmd_compare(args, parser) -> int:
    betas = _betas_from_args(args, parser)
    if args.nd is None or args.nr is None:
        parser.error("--nd and --nr are required for compare")
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    for s in schemes:
        if s not in _SCHEMES:
            parser.error(f"unknown scheme {s!r} in --schemes")
    spec = ComparisonSpec(
        alpha=args.alpha,
        betas=tuple(betas),
        n_data=args.nd,
        n_repair=args.nr,
        rtt=args.rtt,
        t_p=args.tp,
        n_supp=args.ns,
        max_retx=args.max_retx if args.max_retx is not None else 2,
        schemes=schemes,
    )
    result = compare_schemes(spec)
    if args.out:
        comparison_to_csv(result, args.out)
    f = result.findings
    parts = [f"points={len(spec.betas)}", f"schemes={','.join(schemes)}"]
    for key in ("arq_faster_at_low_p", "harq_faster_at_high_p",
                "crossover_count", "claim_holds"):
        if key in f:
            parts.append(f"{key}={f[key]}")
    print(" ".join(parts))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burstlink",
        description="Bursty-erasure link modeling: trace generation, "
        "reliability-scheme emulation, analytic models and validation. "
        "Times are seconds; probabilities are unitless in [0,1].",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-phy", help="generate an error-free physical trace")
    p.add_argument("--duration", type=_positive_float, required=True,
                   help="trace duration, seconds")
    p.add_argument("--tp", type=_positive_float, required=True,
                   help="physical slot duration, seconds")
    p.add_argument("--out", required=True, help="output trace path")
    p.set_defaults(func=_cmd_gen_phy)

    p = sub.add_parser("inject", help="inject Markov-modeled erasures into a trace")
    p.add_argument("--in", dest="inp", required=True, help="input trace path")
    p.add_argument("--out", required=True, help="output trace path")
    _add_channel_flags(p)
    p.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED,
                   help=f"RNG seed (default {DEFAULT_SEED}, never wall-clock)")
    p.set_defaults(func=_cmd_inject)

    p = sub.add_parser("run", help="replay a reliability scheme over a trace")
    p.add_argument("--in", dest="inp", required=True, help="input trace path")
    _add_scheme_flags(p, include_tp=False)
    p.add_argument("--out-link", required=True, help="output link trace CSV path")
    p.add_argument("--out-metrics", required=True, help="output metrics text path")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("analytic", help="closed-form sweep to CSV")
    _add_scheme_flags(p, include_tp=True)
    p.add_argument("--sweep", type=_parse_sweep, required=True,
                   help="beta=start:stop:step (with --alpha) or p=start:stop:step (with --burst)")
    p.add_argument("--alpha", type=_probability, default=None,
                   help="P(stay Good) per slot, unitless (beta sweeps)")
    p.add_argument("--burst", type=_positive_float, default=None,
                   help="mean erasure burst length, slots (p sweeps)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("validate", help="analytic vs measured cross-validation")
    _add_scheme_flags(p, include_tp=True)
    p.add_argument("--alpha", type=_probability, required=True,
                   help="P(stay Good) per slot, unitless")
    p.add_argument("--betas", type=_parse_betas, default=None,
                   help="comma-separated beta grid, unitless")
    p.add_argument("--beta-range", type=_parse_beta_range, default=None,
                   help="beta grid as start:stop:step, unitless")
    p.add_argument("--blocks", type=_positive_int, default=200_000,
                   help="Monte-Carlo sample size per point (default 200000)")
    p.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED,
                   help=f"master RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--tol-eta", type=_positive_float, default=0.02,
                   help="relative tolerance on efficiency (default 0.02)")
    p.add_argument("--tol-delay", type=_positive_float, default=0.05,
                   help="relative tolerance on delay (default 0.05)")
    p.add_argument("--spot-points", type=_nonneg_int, default=2,
                   help="sweep points replayed through the trace tool (default 2)")
    p.add_argument("--spot-blocks", type=_positive_int, default=150_000,
                   help="blocks per trace spot check (default 150000)")
    p.add_argument("--out", default=None, help="report CSV path")
    p.add_argument("--summary", default=None, help="plain-text summary path")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compare", help="multi-scheme analytic comparison")
    p.add_argument("--alpha", type=_probability, required=True,
                   help="P(stay Good) per slot, unitless")
    p.add_argument("--betas", type=_parse_betas, default=None,
                   help="comma-separated beta grid, unitless")
    p.add_argument("--beta-range", type=_parse_beta_range, default=None,
                   help="beta grid as start:stop:step, unitless")
    p.add_argument("--nd", type=_positive_int, default=None,
                   help="data LLDUs per block")
    p.add_argument("--nr", type=_nonneg_int, default=None,
                   help="repair LLDUs per block")
    p.add_argument("--ns", type=_nonneg_int, default=2,
                   help="supplementary repair LLDUs per HARQ round (default 2)")
    p.add_argument("--max-retx", type=_nonneg_int, default=None,
                   help="HARQ retransmission budget (default 2)")
    p.add_argument("--rtt", type=_positive_float, required=True,
                   help="round-trip time, seconds")
    p.add_argument("--tp", type=_positive_float, default=1e-3,
                   help="physical slot duration, seconds (default 0.001)")
    p.add_argument("--schemes", default="arq,fec,harq2",
                   help="comma-separated scheme list (default arq,fec,harq2)")
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError, RuntimeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
