"""burstlink: bursty packet-erasure link modeling and measurement.

Building blocks:

* channel — 2-state Markov (Gilbert) erasure channel: parameters,
  derived statistics, interleaving transform, sequence sampling.
* distribution — exact erasure-count distributions P(m erased out of n)
  by double induction, plus joint data/repair-segment tables.
* schemes — closed-form throughput efficiency and recovery delay for
  FEC, interleaved FEC, ARQ and HARQ type II.
* trace / tmt — physical-layer trace files, erasure injection, and the
  trace tool that replays a reliability scheme into a link-layer trace
  with measured metrics.
* montecarlo / validation — measurement backends and the analytic-vs-
  measured cross-validation harness and scheme comparison.
* cli — the `burstlink` command-line front end.
"""

from .channel import (
    ChannelParams,
    DerivedChannelStats,
    ErasureSequence,
    derive_stats,
    interleave,
    params_from_targets,
    sample_sequence,
)
from .distribution import (
    ErasureTable,
    JointErasureTable,
    build_joint_table,
    build_table,
    erasure_count_monte_carlo,
)
from .montecarlo import (
    McResult,
    arq_monte_carlo,
    fec_monte_carlo,
    monte_carlo_scheme,
)
from .schemes import (
    ArqConfig,
    FecConfig,
    HarqConfig,
    SchemePerformance,
    arq_performance,
    evaluate_scheme,
    fec_delay,
    fec_efficiency,
    fec_performance,
    harq_p_received,
    harq_p_sent,
    harq_performance,
    scheme_sweep,
    sweep_rows_to_csv,
)
from .tmt import (
    LinkRecord,
    LinkTrace,
    Metrics,
    export_link_trace,
    load_link_trace,
    metrics_to_text,
    run_scheme,
    write_metrics,
)
from .trace import (
    PhyTrace,
    gen_error_free_trace,
    inject_erasures,
    load_phy_trace,
    write_phy_trace,
)
from .validation import (
    ComparisonResult,
    ComparisonSpec,
    SweepSpec,
    ValidationReport,
    beta_range,
    compare_schemes,
    harq_monte_carlo,
    validate_scheme,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "DerivedChannelStats",
    "ErasureSequence",
    "derive_stats",
    "interleave",
    "params_from_targets",
    "sample_sequence",
    "ErasureTable",
    "JointErasureTable",
    "build_table",
    "build_joint_table",
    "erasure_count_monte_carlo",
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
    "PhyTrace",
    "gen_error_free_trace",
    "inject_erasures",
    "write_phy_trace",
    "load_phy_trace",
    "LinkRecord",
    "LinkTrace",
    "Metrics",
    "run_scheme",
    "export_link_trace",
    "load_link_trace",
    "metrics_to_text",
    "write_metrics",
    "McResult",
    "fec_monte_carlo",
    "arq_monte_carlo",
    "harq_monte_carlo",
    "monte_carlo_scheme",
    "SweepSpec",
    "ValidationReport",
    "ComparisonSpec",
    "ComparisonResult",
    "beta_range",
    "validate_scheme",
    "compare_schemes",
    "__version__",
]
