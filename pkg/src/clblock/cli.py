"""Command-line interface.

Subcommands
-----------
sweep      frequency sweep of a blocker design -> CSV
contour    single-stage |S11| contours over electrical length -> CSV
metrics    band edges / relative bandwidth of a design at a threshold
deembed    Through-Line error-box extraction and device de-embedding
synth-cal  synthetic calibration set plus ground-truth device

Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 numerical
error (singular or degenerate systems).  Output files are written to a
temporary name and renamed on success, so failed runs leave nothing
behind.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile

import numpy as np

from . import calibration, dcblocker, fileio
from .errors import (
    ClblockError,
    ConfigError,
    FrequencyAlignmentError,
    NumericalError,
    TouchstoneError,
)
from .network import cascade_t, line_t

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line diagnostics, exit code 1
        raise UsageError(message)


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".clblock-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path: str) -> str:
    with open(path, "r") as fh:
        return fh.read()


def _float_list(text: str, flag: str):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated list of numbers") from None
    if not values:
        raise UsageError(f"{flag} list is empty")
    return values


def _load_params(args) -> dcblocker.DcBlockerParams:
    if args.preset is not None:
        return dcblocker.PRESETS[args.preset]
    return fileio.parse_design_config(_read_text(args.config))


def _add_design_source(p: _Parser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="design configuration file")
    group.add_argument("--preset", choices=sorted(dcblocker.PRESETS),
                       help="built-in design preset")


def _add_grid(p: _Parser, points_default: int) -> None:
    p.add_argument("--fmin", type=float, default=0.5, help="lower f/f0 (default 0.5)")
    p.add_argument("--fmax", type=float, default=1.5, help="upper f/f0 (default 1.5)")
    p.add_argument("--points", type=int, default=points_default,
                   help=f"grid size (default {points_default})")


def _grid(args) -> np.ndarray:
    if not args.fmin > 0.0:
        raise UsageError("--fmin must be positive")
    if not args.fmin < args.fmax:
        raise UsageError("--fmin must be below --fmax")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    return np.linspace(args.fmin, args.fmax, args.points)


def build_parser() -> _Parser:
    parser = _Parser(prog="clblock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[], help="frequency sweep -> CSV")
    _add_design_source(p)
    _add_grid(p, 1001)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("contour", help="single-stage |S11| contours -> CSV")
    p.add_argument("--cr", required=True, help="comma list of coupling ratios")
    p.add_argument("--zratio", required=True, help="comma list of Z0/Z_CL values")
    p.add_argument("--points", type=int, default=721, help="theta grid size (default 721)")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("metrics", help="band edges and relative bandwidth")
    _add_design_source(p)
    _add_grid(p, 1001)
    p.add_argument("--threshold-db", type=float, required=True,
                   help="return-loss threshold in dB (positive)")

    p = sub.add_parser("deembed", help="Through-Line de-embedding")
    p.add_argument("--through", required=True, help="Through standard .s2p")
    p.add_argument("--line", required=True, help="Line standard .s2p")
    p.add_argument("--test", required=True, help="embedded device .s2p")
    p.add_argument("--line-deg", type=float, required=True,
                   help="line electrical length in degrees at --fref")
    p.add_argument("--fref", type=float, required=True,
                   help="frequency (Hz) at which --line-deg applies")
    p.add_argument("--out", required=True, help="recovered device .s2p path")

    p = sub.add_parser("synth-cal", help="synthetic calibration set")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out-dir", required=True, help="output directory")
    p.add_argument("--points", type=int, default=201,
                   help="frequency points over 2-10 GHz (default 201)")
    return parser


def _cmd_sweep(args) -> int:
    params = _load_params(args)
    sw = dcblocker.sweep(params, _grid(args))
    _write_text(args.out, fileio.write_sweep_csv(sw))
    return EXIT_OK


def _cmd_contour(args) -> int:
    crs = _float_list(args.cr, "--cr")
    zrs = _float_list(args.zratio, "--zratio")
    for cr in crs:
        if not 0.0 <= cr < 1.0:
            raise UsageError(f"--cr values must be in [0, 1), got {cr}")
    for zr in zrs:
        if not zr > 0.0:
            raise UsageError(f"--zratio values must be positive, got {zr}")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    k = np.arange(1, args.points + 1)
    thetas = k * math.pi / (args.points + 1)
    contour = dcblocker.single_stage_contour(crs, zrs, thetas)
    _write_text(args.out, fileio.write_contour_csv(contour))
    return EXIT_OK


def _cmd_metrics(args) -> int:
    if not args.threshold_db > 0.0:
        raise UsageError("--threshold-db must be positive")
    params = _load_params(args)
    sw = dcblocker.sweep(params, _grid(args))
    band = dcblocker.bandwidth_metric(sw, args.threshold_db)
    print(f"f1={band.f1:.6g} f2={band.f2:.6g} rel_bw={band.rel_bw:.6g}")
    return EXIT_OK


def _load_two_port(path: str) -> fileio.TouchstoneNetwork:
    return fileio.parse_touchstone(_read_text(path), n_ports=2)


def _cmd_deembed(args) -> int:
    if not args.fref > 0.0:
        raise UsageError("--fref must be positive")
    thru = _load_two_port(args.through)
    line = _load_two_port(args.line)
    test = _load_two_port(args.test)
    for name, net in (("line", line), ("test", test)):
        if len(net.freq_hz) != len(thru.freq_hz) or not np.allclose(
            net.freq_hz, thru.freq_hz, rtol=1e-9, atol=0.0
        ):
            raise FrequencyAlignmentError(
                f"{name} file frequencies do not match the through file"
            )
        if not math.isclose(net.z_ref, thru.z_ref, rel_tol=1e-9):
            raise TouchstoneError(
                f"{name} file reference impedance {net.z_ref} does not match "
                f"the through file ({thru.z_ref})"
            )
    freq_hz = thru.freq_hz
    theta = np.radians(args.line_deg) * freq_hz / args.fref

    # drop non-transmitting points up front so the test set stays aligned
    keep = (np.abs(thru.s[:, 1, 0]) > calibration.TRANSMISSION_FLOOR) & (
        np.abs(line.s[:, 1, 0]) > calibration.TRANSMISSION_FLOOR
    )
    cal = calibration.CalStandardSet(
        freq_hz[keep], thru.s[keep], line.s[keep], theta[keep], thru.z_ref
    )
    eb = calibration.extract_error_box(cal)
    s_dut = calibration.deembed(freq_hz[keep], test.s[keep], eb)
    out = fileio.two_port_network(
        eb.freq_hz, s_dut, thru.z_ref, freq_unit=test.freq_unit, data_format="RI"
    )
    _write_text(args.out, fileio.write_touchstone(out))
    return EXIT_OK


SYNTH_FREQ_RANGE = (2e9, 10e9)
SYNTH_FREF = 6e9
SYNTH_Z0 = 50.0


def _cmd_synth_cal(args) -> int:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    rng = np.random.default_rng(args.seed)
    freq_hz = np.linspace(*SYNTH_FREQ_RANGE, args.points)

    line_deg = rng.uniform(80.0, 100.0)
    theta_line = np.radians(line_deg) * freq_hz / SYNTH_FREF

    # smooth, passive fixture: two mismatched line segments in cascade
    za, zb = rng.uniform(30.0, 80.0, size=2)
    tha, thb = np.radians(rng.uniform(30.0, 150.0, size=2))
    t_x = np.array([
        cascade_t([
            line_t(tha * f / SYNTH_FREF, za, SYNTH_Z0),
            line_t(thb * f / SYNTH_FREF, zb, SYNTH_Z0),
        ]).t
        for f in freq_hz
    ])

    # ground-truth device: the compressed blocker design in differential mode
    preset = dcblocker.TABLE2
    s_dut = np.array([
        dcblocker.diff_mode_s(preset, f / preset.f0).s for f in freq_hz
    ])

    cal, s_test = calibration.synth_cal_data(freq_hz, t_x, theta_line, s_dut, SYNTH_Z0)

    os.makedirs(args.out_dir, exist_ok=True)

    def _net(s):
        return fileio.two_port_network(freq_hz, s, SYNTH_Z0, "GHZ", "RI")

    _write_text(os.path.join(args.out_dir, "through.s2p"),
                fileio.write_touchstone(_net(cal.s_through)))
    _write_text(os.path.join(args.out_dir, "line.s2p"),
                fileio.write_touchstone(_net(cal.s_line)))
    _write_text(os.path.join(args.out_dir, "test.s2p"),
                fileio.write_touchstone(_net(s_test)))
    _write_text(os.path.join(args.out_dir, "dut_truth.s2p"),
                fileio.write_touchstone(_net(s_dut)))
    info = (
        f"line_deg_at_fref = {line_deg:.12g}\n"
        f"fref_hz = {SYNTH_FREF:.12g}\n"
        f"seed = {args.seed}\n"
    )
    _write_text(os.path.join(args.out_dir, "cal_info.txt"), info)
    print(f"wrote through/line/test/dut_truth/cal_info to {args.out_dir}")
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "contour": _cmd_contour,
    "metrics": _cmd_metrics,
    "deembed": _cmd_deembed,
    "synth-cal": _cmd_synth_cal,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"clblock: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TouchstoneError, ConfigError, FrequencyAlignmentError) as exc:
        print(f"clblock: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"clblock: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ClblockError) as exc:
        print(f"clblock: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
