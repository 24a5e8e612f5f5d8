import csv
import math

import numpy as np
import pytest

from burstlink.channel import ChannelParams, interleave
from burstlink.distribution import build_table
from burstlink.montecarlo import harq_monte_carlo
from burstlink.schemes import (
    ArqConfig,
    FecConfig,
    HarqConfig,
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

BURSTY = ChannelParams(0.98, 0.92)  # p = 0.2, mean burst 12.5
CLEAN = ChannelParams(1.0, 0.0)  # p = 0


def test_config_validation():
    with pytest.raises(ValueError):
        FecConfig(0, 3, 0.5, 1e-3)
    with pytest.raises(ValueError):
        FecConfig(10, -1, 0.5, 1e-3)
    with pytest.raises(ValueError):
        FecConfig(10, 3, -0.5, 1e-3)
    with pytest.raises(ValueError):
        HarqConfig(10, 20, 0.5, 1e-3, n_supp=-1)
    with pytest.raises(ValueError):
        ArqConfig(0.5, max_retx=-1)


# ---------------------------------------------------------------- FEC


def test_fec_error_free_limits():
    cfg = FecConfig(10, 12, 0.5, 1e-3)
    perf = fec_performance(cfg, CLEAN)
    assert perf.eta == pytest.approx(10 / 22, abs=1e-12)
    assert perf.delay == pytest.approx(0.25, abs=1e-12)
    assert perf.residual_loss == pytest.approx(0.0, abs=1e-15)


def test_fec_efficiency_memoryless_hand_enumeration():
    # iid slots (rho=0, p=0.2), N_D=2, N_R=1: delivered = 2 unless the
    # block fails, then 2 - m_d.  Enumerating the six (m_d, m_r) cells:
    cfg = FecConfig(2, 1, 0.5, 0.01)
    ch = ChannelParams(0.8, 0.2)
    e_delivered = (
        2 * (0.512 + 0.128 + 0.256)  # decodable cells
        + 1 * 0.064  # (m_d=1, m_r=1) fails, one data LLDU arrived
        + 0 * (0.032 + 0.008)  # m_d=2 cells deliver nothing
    )
    assert fec_efficiency(cfg, ch) == pytest.approx(e_delivered / 3, abs=1e-12)


def test_fec_delay_memoryless_hand_value():
    cfg = FecConfig(2, 1, 0.5, 0.01)
    ch = ChannelParams(0.8, 0.2)
    # tail = P(1,2) + P(2,2) for Binomial(2, 0.2) = 0.36
    expected = 0.25 + 0.2 * (1 - 0.36) * 1.5 * 0.01
    assert fec_delay(cfg, ch) == pytest.approx(expected, abs=1e-12)


def test_fec_residual_memoryless_hand_value():
    cfg = FecConfig(2, 1, 0.5, 0.01)
    ch = ChannelParams(0.8, 0.2)
    residual = 3 * 0.04 * 0.8 + 0.008  # P(2 of 3) + P(3 of 3), Binomial(3, 0.2)
    assert fec_performance(cfg, ch).residual_loss == pytest.approx(
        residual, abs=1e-12
    )


def test_fec_delay_bounded_by_block_wait():
    cfg = FecConfig(10, 12, 0.5, 1e-3)
    d = fec_delay(cfg, BURSTY)
    p = 0.2
    assert 0.25 <= d <= 0.25 + p * (22 / 2) * 1e-3 + 1e-15


def test_ifec_matches_interleaved_channel():
    cfg_i = FecConfig(10, 12, 0.5, 1e-3, interleave_depth=8)
    cfg_1 = FecConfig(10, 12, 0.5, 1e-3)
    ch = ChannelParams(0.99, 0.95)
    direct = fec_performance(cfg_1, interleave(ch, 8))
    assert evaluate_scheme("ifec", cfg_i, ch) == direct


def test_interleaving_helps_on_bursty_channel():
    ch = ChannelParams(0.99, 0.95)
    base = fec_performance(FecConfig(10, 12, 0.5, 1e-3), ch)
    deep = fec_performance(FecConfig(10, 12, 0.5, 1e-3, interleave_depth=20), ch)
    assert deep.residual_loss < base.residual_loss
    assert deep.eta > base.eta


# ---------------------------------------------------------------- ARQ


def test_arq_unbounded_closed_form():
    perf = arq_performance(ArqConfig(0.5), BURSTY)
    assert perf.eta == pytest.approx(0.8, abs=1e-12)
    assert perf.delay == pytest.approx(0.25 + 0.5 / 0.8, abs=1e-12)
    assert perf.residual_loss == 0.0


def test_arq_closed_form_vs_series():
    rtt = 0.5
    for p in (0.05, 0.2, 0.5, 0.9):
        # state-independent erasures give exactly this p for any chain
        ch = ChannelParams(0.5, 0.5, e_good=p, e_bad=p)
        perf = arq_performance(ArqConfig(rtt), ch)
        i = np.arange(1, 10_001, dtype=np.float64)
        series = rtt / 2.0 + rtt * float((i * p ** (i - 1) * (1 - p)).sum())
        assert perf.delay == pytest.approx(series, abs=1e-12)


def test_arq_bounded_truncation():
    k = 3
    perf = arq_performance(ArqConfig(0.5, max_retx=k), BURSTY)
    p = 0.2
    assert perf.residual_loss == pytest.approx(p ** (k + 1), abs=1e-15)
    tries = np.arange(1, k + 2)
    w = p ** (tries - 1.0) * (1 - p)
    expected = 0.25 + 0.5 * float((w * tries).sum()) / float(w.sum())
    assert perf.delay == pytest.approx(expected, abs=1e-12)
    assert perf.eta == pytest.approx(0.8, abs=1e-12)


def test_arq_rejects_certain_erasure():
    with pytest.raises(ValueError):
        arq_performance(ArqConfig(0.5), ChannelParams(0.0, 1.0))


# ---------------------------------------------------------------- HARQ-II


def test_harq_closed_forms_require_two_rounds():
    table = build_table(BURSTY, 64)
    for budget in (0, 1, 3):
        cfg = HarqConfig(10, 20, 0.5, 1e-3, max_retx=budget)
        with pytest.raises(ValueError):
            harq_p_received(cfg, table)
        with pytest.raises(ValueError):
            harq_p_sent(cfg, table)


def test_harq_p_sent_normalizes_and_round0_mass():
    grid = [
        (1, 0, 0),
        (2, 1, 1),
        (5, 7, 2),
        (10, 20, 2),
        (20, 20, 5),
        (13, 17, 4),
    ]
    for ch in (BURSTY, ChannelParams(0.9, 0.5), ChannelParams(0.8, 0.2)):
        for nd, nr, ns in grid:
            cfg = HarqConfig(nd, nr, 0.5, 1e-3, n_supp=ns, max_retx=2)
            table = build_table(ch, max(nd + nr, nd + 2 * ns))
            ps = harq_p_sent(cfg, table)
            assert ps.sum() == pytest.approx(1.0, abs=1e-9)
            assert (ps >= -1e-15).all()
            round0 = float(table.column(nd + nr)[: nr + 1].sum())
            assert ps[nd + nr] == pytest.approx(round0, abs=1e-12)


def test_harq_p_sent_matches_simulation():
    cfg = HarqConfig(10, 20, 0.5, 1e-3)
    table = build_table(BURSTY, 64)
    ps = harq_p_sent(cfg, table)
    res = harq_monte_carlo(cfg, BURSTY, 150_000, seed=42)
    sent_hist = res.aux["sent_hist"]
    for j, freq in sent_hist.items():
        assert ps[j] == pytest.approx(freq, abs=0.01)


def test_harq_p_received_full_delivery_mass():
    cfg = HarqConfig(5, 7, 0.5, 1e-3)
    ch = ChannelParams(0.99, 0.8)
    table = build_table(ch, 32)
    pr = harq_p_received(cfg, table)
    assert pr.shape == (5,)
    assert (pr >= -1e-15).all()
    assert pr.sum() <= 1.0 + 1e-9
    res = harq_monte_carlo(cfg, ch, 200_000, seed=7)
    first_two = float(res.aux["round_freq"][0] + res.aux["round_freq"][1])
    assert pr[-1] == pytest.approx(first_two, rel=0.02)


def test_harq_performance_error_free():
    cfg = HarqConfig(10, 20, 0.5, 1e-3)
    perf = harq_performance(cfg, CLEAN)
    assert perf.eta == pytest.approx(10 / 30, abs=1e-12)
    assert perf.delay == pytest.approx(30 * 1e-3 + 0.25, abs=1e-12)
    assert perf.residual_loss == pytest.approx(0.0, abs=1e-15)


def test_harq_performance_matches_simulation():
    cfg = HarqConfig(10, 20, 0.5, 1e-3)
    perf = harq_performance(cfg, BURSTY)
    res = harq_monte_carlo(cfg, BURSTY, 300_000, seed=11)
    assert res.eta == pytest.approx(perf.eta, rel=0.01)
    assert res.delay_s == pytest.approx(perf.delay, rel=0.01)
    assert res.residual_loss == pytest.approx(perf.residual_loss, abs=0.002)


def test_harq_performance_general_budget():
    cfg = HarqConfig(5, 7, 0.5, 1e-3, max_retx=3)
    perf = harq_performance(cfg, ChannelParams(0.98, 0.9))
    res = harq_monte_carlo(cfg, ChannelParams(0.98, 0.9), 300_000, seed=13)
    assert res.eta == pytest.approx(perf.eta, rel=0.01)
    assert res.delay_s == pytest.approx(perf.delay, rel=0.01)
    # a larger budget can only reduce residual loss
    tighter = harq_performance(HarqConfig(5, 7, 0.5, 1e-3, max_retx=1),
                               ChannelParams(0.98, 0.9))
    assert perf.residual_loss < tighter.residual_loss


# ------------------------------------------------------- dispatch & sweeps


def test_evaluate_scheme_dispatch():
    assert evaluate_scheme("fec", FecConfig(10, 12, 0.5, 1e-3), BURSTY).eta > 0
    with pytest.raises(TypeError):
        evaluate_scheme("fec", ArqConfig(0.5), BURSTY)
    with pytest.raises(TypeError):
        evaluate_scheme("harq2", FecConfig(10, 12, 0.5, 1e-3), BURSTY)
    with pytest.raises(ValueError):
        evaluate_scheme("nope", ArqConfig(0.5), BURSTY)


def test_scheme_sweep_alphabeta_and_errors():
    rows = scheme_sweep("arq", ArqConfig(0.5), [(0.98, 0.92), (1.2, 0.5)])
    assert rows[0]["eta"] == pytest.approx(0.8, abs=1e-12)
    assert rows[0]["p"] == pytest.approx(0.2, abs=1e-12)
    assert "error" in rows[1] and math.isnan(rows[1]["eta"])


def test_scheme_sweep_targets_kind():
    rows = scheme_sweep("arq", ArqConfig(0.5), [(0.2, 12.5)], kind="targets")
    assert rows[0]["alpha"] == pytest.approx(0.98, abs=1e-12)
    assert rows[0]["beta"] == pytest.approx(0.92, abs=1e-12)
    assert rows[0]["burst_len"] == pytest.approx(12.5, abs=1e-9)


def test_sweep_csv_round_trip(tmp_path):
    rows = scheme_sweep(
        "fec", FecConfig(10, 12, 0.5, 1e-3), [(0.99, b) for b in (0.1, 0.9)]
    )
    path = tmp_path / "sweep.csv"
    sweep_rows_to_csv(rows, path)
    with open(path, newline="") as fh:
        parsed = list(csv.DictReader(fh))
    assert len(parsed) == 2
    assert float(parsed[0]["eta"]) == pytest.approx(rows[0]["eta"], abs=0.0)
    assert parsed[0]["scheme"] == "fec"
