import numpy as np
import pytest

from burstlink.channel import ChannelParams
from burstlink.trace import (
    PhyTrace,
    gen_error_free_trace,
    inject_erasures,
    load_phy_trace,
    write_phy_trace,
)


def test_gen_error_free_slot_counts():
    tr = gen_error_free_trace(500.0, 1e-3)
    assert tr.n_slots == 500_000
    assert not tr.erased.any()
    assert tr.t_p == 1e-3
    assert gen_error_free_trace(1.0, 0.4).n_slots == 2
    assert tr.metadata["source"] == "error-free"


def test_gen_error_free_validates():
    with pytest.raises(ValueError):
        gen_error_free_trace(0.0, 1e-3)
    with pytest.raises(ValueError):
        gen_error_free_trace(10.0, 0.0)


def test_inject_reference_channel_statistics():
    tr = gen_error_free_trace(500.0, 1e-3)
    out = inject_erasures(tr, ChannelParams(0.98, 0.92), seed=7)
    assert out.erasure_rate == pytest.approx(0.2, abs=0.005)
    slots = out.erased.astype(np.int8)
    edges = np.diff(np.concatenate(([0], slots, [0])))
    bursts = np.nonzero(edges == -1)[0] - np.nonzero(edges == 1)[0]
    assert float(bursts.mean()) == pytest.approx(12.5, abs=0.5)
    # original untouched, metadata records the channel
    assert not tr.erased.any()
    assert out.metadata["alpha"] == "0.98"
    assert out.metadata["seed"] == "7"


def test_inject_is_deterministic_and_or_combines():
    tr = gen_error_free_trace(2.0, 1e-3)
    a = inject_erasures(tr, ChannelParams(0.98, 0.92), seed=3)
    b = inject_erasures(tr, ChannelParams(0.98, 0.92), seed=3)
    assert np.array_equal(a.erased, b.erased)
    # pre-existing erasures survive injection (OR overlay)
    again = inject_erasures(a, ChannelParams(0.99, 0.1), seed=4)
    assert (again.erased | ~a.erased).all()
    assert again.erased.sum() >= a.erased.sum()


def test_inject_noop_channel_keeps_trace():
    tr = gen_error_free_trace(1.0, 1e-3)
    out = inject_erasures(tr, ChannelParams(0.98, 0.92, e_good=0.0, e_bad=0.0), seed=5)
    assert not out.erased.any()


def test_write_load_round_trip(tmp_path):
    tr = gen_error_free_trace(0.5, 1e-3)
    out = inject_erasures(tr, ChannelParams(0.98, 0.92), seed=9)
    path = tmp_path / "t.tr"
    write_phy_trace(out, path)
    back = load_phy_trace(path)
    assert back.t_p == out.t_p
    assert np.array_equal(back.index, out.index)
    assert np.array_equal(back.times, out.times)
    assert np.array_equal(back.erased, out.erased)
    for key, value in out.metadata.items():
        assert back.metadata[key] == str(value)


def test_round_trip_with_opaque_columns(tmp_path):
    n = 1000
    tr = PhyTrace(
        t_p=0.25,
        index=np.arange(n),
        times=np.arange(n) * 0.25,
        erased=np.arange(n) % 3 == 0,
        metadata={"station": "alpha=7"},
        opaque=["" if k % 2 else f"x{k} y{k}" for k in range(n)],
    )
    path = tmp_path / "op.tr"
    write_phy_trace(tr, path)
    back = load_phy_trace(path)
    assert back.opaque == tr.opaque
    assert back.metadata["station"] == "alpha=7"
    # second cycle is byte-stable
    path2 = tmp_path / "op2.tr"
    write_phy_trace(back, path2)
    assert path2.read_bytes().splitlines()[2:] == path.read_bytes().splitlines()[2:]


def test_empty_body_with_header(tmp_path):
    path = tmp_path / "empty.tr"
    path.write_text("# version=1\n# tp=0.001\n")
    back = load_phy_trace(path)
    assert back.n_slots == 0
    assert back.t_p == 0.001


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "bad.tr"
    path.write_text("# tp=0.001\n0 0.0 0\n1 not-a-time 0\n")
    with pytest.raises(ValueError, match="line 3"):
        load_phy_trace(path)


def test_bad_erasure_flag_rejected(tmp_path):
    path = tmp_path / "flag.tr"
    path.write_text("# tp=0.001\n0 0.0 2\n")
    with pytest.raises(ValueError, match="line 2"):
        load_phy_trace(path)


def test_missing_tp_header_rejected(tmp_path):
    path = tmp_path / "notp.tr"
    path.write_text("# version=1\n0 0.0 0\n")
    with pytest.raises(ValueError, match="tp"):
        load_phy_trace(path)


def test_non_monotonic_time_rejected(tmp_path):
    path = tmp_path / "mono.tr"
    path.write_text("# tp=0.001\n0 0.0 0\n1 0.002 0\n2 0.001 0\n")
    with pytest.raises(ValueError, match="increasing"):
        load_phy_trace(path)


def test_phytrace_validation():
    with pytest.raises(ValueError):
        PhyTrace(t_p=1e-3, index=np.arange(3), times=np.arange(2.0), erased=np.zeros(3, bool))
    with pytest.raises(ValueError):
        PhyTrace(t_p=0.0, index=np.arange(1), times=np.zeros(1), erased=np.zeros(1, bool))
    with pytest.raises(ValueError):
        PhyTrace(
            t_p=1e-3,
            index=np.arange(2),
            times=np.array([0.0, 0.0]),
            erased=np.zeros(2, bool),
            )
