import os

import numpy as np
import pytest

from clblock import fileio as io
from clblock.cli import main


def _csv_columns(path):
    with open(path) as fh:
        lines = fh.read().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header, data


def _rel_bw_from_csv(data, threshold_db):
    f = data[:, 0]
    s11 = data[:, 1]
    ok = s11 <= -threshold_db
    ic = int(np.argmin(np.abs(f - 1.0)))
    if not ok[ic]:
        return 0.0
    i0 = ic
    while i0 > 0 and ok[i0 - 1]:
        i0 -= 1
    i1 = ic
    while i1 < len(f) - 1 and ok[i1 + 1]:
        i1 += 1
    return (f[i1] - f[i0]) / ((f[i0] + f[i1]) / 2.0)


def test_sweep_preset_table2(tmp_path, capsys):
    out = tmp_path / "t2.csv"
    code = main(["sweep", "--preset", "table2", "--fmin", "0.5", "--fmax", "1.5",
                 "--points", "1001", "--out", str(out)])
    assert code == 0
    header, data = _csv_columns(out)
    assert header == io.SWEEP_CSV_HEADER.split(",")
    assert data.shape == (1001, 7)
    assert _rel_bw_from_csv(data, 10.0) >= 0.45


def test_sweep_usage_error_reversed_range(tmp_path, capsys):
    code = main(["sweep", "--preset", "table1", "--fmin", "1.5", "--fmax", "0.5",
                 "--points", "11", "--out", str(tmp_path / "x.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "usage error" in err
    assert not (tmp_path / "x.csv").exists()


def test_sweep_requires_design_source(tmp_path, capsys):
    code = main(["sweep", "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_sweep_rejects_conflicting_sources(tmp_path, capsys):
    code = main(["sweep", "--preset", "table1", "--config", "x.cfg",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_sweep_from_config_file(tmp_path):
    cfg = tmp_path / "design.cfg"
    cfg.write_text(
        "zcl1_ohm = 43.3\nzcl2_ohm = 43.3\ncr1 = 0.58\ncr2 = 0.58\n"
        "theta1_deg = 22.5\ntheta2_deg = 45\ntheta_d1_deg = 0\ntheta_d2_deg = 0\n"
    )
    out = tmp_path / "t1.csv"
    assert main(["sweep", "--config", str(cfg), "--points", "101", "--out", str(out)]) == 0
    _, data = _csv_columns(out)
    assert data.shape == (101, 7)


def test_sweep_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("zcl1_ohm = 43.3\ncr1 = 2.0\n")
    code = main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "input error" in capsys.readouterr().err


def test_sweep_missing_config_file_exits_2(tmp_path, capsys):
    code = main(["sweep", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_metrics_prints_band(capsys):
    code = main(["metrics", "--preset", "table2", "--threshold-db", "10"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("f1=") and "rel_bw=" in out
    rel = float(out.strip().split("rel_bw=")[1])
    assert 0.5 < rel < 0.6


def test_metrics_rejects_nonpositive_threshold(capsys):
    assert main(["metrics", "--preset", "table1", "--threshold-db", "-3"]) == 1


def test_contour_csv(tmp_path):
    out = tmp_path / "fig4.csv"
    code = main(["contour", "--cr", "0.5", "--zratio", "2,1,0.5,0.25",
                 "--points", "51", "--out", str(out)])
    assert code == 0
    header, data = _csv_columns(out)
    assert header == io.CONTOUR_CSV_HEADER.split(",")
    assert data.shape == (4 * 51, 4)
    assert 0.0 < data[:, 0].min() and data[:, 0].max() < 1.0


def test_contour_rejects_bad_cr(tmp_path, capsys):
    code = main(["contour", "--cr", "1.2", "--zratio", "1", "--out",
                 str(tmp_path / "x.csv")])
    assert code == 1


def test_contour_rejects_garbled_list(tmp_path):
    code = main(["contour", "--cr", "0.5,abc", "--zratio", "1", "--out",
                 str(tmp_path / "x.csv")])
    assert code == 1


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1


def test_synth_cal_writes_deterministic_set(tmp_path, capsys):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    d3 = tmp_path / "c"
    assert main(["synth-cal", "--seed", "7", "--out-dir", str(d1)]) == 0
    assert main(["synth-cal", "--seed", "7", "--out-dir", str(d2)]) == 0
    assert main(["synth-cal", "--seed", "8", "--out-dir", str(d3)]) == 0
    for name in ("through.s2p", "line.s2p", "test.s2p", "dut_truth.s2p", "cal_info.txt"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    assert (d1 / "through.s2p").read_bytes() != (d3 / "through.s2p").read_bytes()


def _read_cal_info(path):
    info = {}
    for line in path.read_text().splitlines():
        key, _, val = line.partition("=")
        info[key.strip()] = val.strip()
    return info


def test_deembed_recovers_ground_truth(tmp_path):
    cal_dir = tmp_path / "cal"
    assert main(["synth-cal", "--seed", "3", "--out-dir", str(cal_dir)]) == 0
    info = _read_cal_info(cal_dir / "cal_info.txt")
    out = tmp_path / "recovered.s2p"
    code = main([
        "deembed",
        "--through", str(cal_dir / "through.s2p"),
        "--line", str(cal_dir / "line.s2p"),
        "--test", str(cal_dir / "test.s2p"),
        "--line-deg", info["line_deg_at_fref"],
        "--fref", info["fref_hz"],
        "--out", str(out),
    ])
    assert code == 0
    recovered = io.parse_touchstone(out.read_text(), n_ports=2)
    truth = io.parse_touchstone((cal_dir / "dut_truth.s2p").read_text(), n_ports=2)
    assert np.allclose(recovered.freq_hz, truth.freq_hz, rtol=1e-9)
    assert np.abs(recovered.s - truth.s).max() < 1e-8


def test_deembed_degenerate_line_exits_3(tmp_path, capsys):
    cal_dir = tmp_path / "cal"
    assert main(["synth-cal", "--seed", "3", "--out-dir", str(cal_dir)]) == 0
    out = tmp_path / "recovered.s2p"
    # 180 degrees at 6 GHz puts theta exactly at pi inside the 2-10 GHz grid
    code = main([
        "deembed",
        "--through", str(cal_dir / "through.s2p"),
        "--line", str(cal_dir / "line.s2p"),
        "--test", str(cal_dir / "test.s2p"),
        "--line-deg", "180", "--fref", "6e9",
        "--out", str(out),
    ])
    assert code == 3
    err = capsys.readouterr().err
    assert "numerical error" in err and err.count("\n") == 1
    assert not out.exists()          # no partial output left behind


def test_deembed_misaligned_frequencies_exits_2(tmp_path, capsys):
    cal_dir = tmp_path / "cal"
    assert main(["synth-cal", "--seed", "3", "--out-dir", str(cal_dir)]) == 0
    trimmed = cal_dir / "line_trimmed.s2p"
    lines = (cal_dir / "line.s2p").read_text().splitlines()
    trimmed.write_text("\n".join(lines[:-1]) + "\n")
    code = main([
        "deembed",
        "--through", str(cal_dir / "through.s2p"),
        "--line", str(trimmed),
        "--test", str(cal_dir / "test.s2p"),
        "--line-deg", "90", "--fref", "6e9",
        "--out", str(tmp_path / "x.s2p"),
    ])
    assert code == 2


def test_no_temp_files_left_behind(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["sweep", "--preset", "table1", "--points", "11", "--out", str(out)]) == 0
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".clblock-")]
    assert not leftovers
