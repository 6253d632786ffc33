"""Touchstone v1 reading/writing, sweep CSV export, and design configs.

Touchstone support covers 1-, 2- and 4-port S-parameter files in RI, MA
and DB formats.  The 2-port data row order is the v1 quirk
(f S11 S21 S12 S22); 4-port frequencies span four wrapped sub-rows in
row-major order.  Files must carry an option line ('#'); fields omitted
from it fall back to the v1 defaults (GHZ, S, MA, R 50).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dcblocker import (
    ContourResult,
    DcBlockerParams,
    SweepResult,
    db20,
)
from .errors import ConfigError, TouchstoneError

UNIT_SCALE = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
DATA_FORMATS = ("RI", "MA", "DB")

#: dB floor used when serializing zero magnitudes in DB format
_DB_WRITE_FLOOR = -300.0

GENERATOR_TAG = "! clblock S-parameter export"


@dataclass(frozen=True, eq=False)
class TouchstoneNetwork:
    """Parsed S-parameter table: frequencies in file units plus a stack of
    complex n_ports x n_ports matrices."""

    n_ports: int
    freq_unit: str
    data_format: str
    z_ref: float
    freq: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        if self.n_ports not in (1, 2, 4):
            raise ValueError("n_ports must be 1, 2 or 4")
        if self.freq_unit not in UNIT_SCALE:
            raise ValueError(f"unknown frequency unit {self.freq_unit!r}")
        if self.data_format not in DATA_FORMATS:
            raise ValueError(f"unknown data format {self.data_format!r}")
        if not self.z_ref > 0.0:
            raise ValueError("z_ref must be positive")
        object.__setattr__(self, "freq", np.asarray(self.freq, dtype=float))
        object.__setattr__(self, "s", np.asarray(self.s, dtype=complex))
        n = len(self.freq)
        if self.s.shape != (n, self.n_ports, self.n_ports):
            raise ValueError("S data shape does not match frequency count")
        if n > 1 and np.any(np.diff(self.freq) <= 0.0):
            raise ValueError("frequencies must be strictly increasing")

    @property
    def freq_hz(self) -> np.ndarray:
        return self.freq * UNIT_SCALE[self.freq_unit]


def two_port_network(freq_hz, s, z_ref: float, freq_unit: str = "GHZ",
                     data_format: str = "RI") -> TouchstoneNetwork:
    """Wrap a stack of 2x2 S matrices (frequencies in Hz) as a network."""
    freq = np.asarray(freq_hz, dtype=float) / UNIT_SCALE[freq_unit]
    return TouchstoneNetwork(2, freq_unit, data_format, z_ref, freq, s)


def _pair_to_complex(fmt, x, y, line_no):
    if fmt == "RI":
        return complex(x, y)
    if fmt == "MA":
        return x * complex(math.cos(math.radians(y)), math.sin(math.radians(y)))
    if fmt == "DB":
        mag = 10.0 ** (x / 20.0)
        return mag * complex(math.cos(math.radians(y)), math.sin(math.radians(y)))
    raise TouchstoneError(f"unknown data format {fmt!r}", line_no)


def _complex_to_pair(fmt, value):
    if fmt == "RI":
        return value.real, value.imag
    mag = abs(value)
    ang = math.degrees(math.atan2(value.imag, value.real))
    if fmt == "MA":
        return mag, ang
    db = _DB_WRITE_FLOOR if mag <= 0.0 else max(20.0 * math.log10(mag), _DB_WRITE_FLOOR)
    return db, ang


def _parse_option_line(tokens, line_no):
    unit, fmt, z_ref = "GHZ", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in UNIT_SCALE:
            unit = tok
        elif tok in DATA_FORMATS:
            fmt = tok
        elif tok == "S":
            pass
        elif tok in ("Y", "Z", "H", "G"):
            raise TouchstoneError(f"only S-parameters are supported, got {tok}", line_no)
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option 'R' missing impedance value", line_no)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneError(
                    f"invalid reference impedance {tokens[i + 1]!r}", line_no
                ) from None
            if not z_ref > 0.0:
                raise TouchstoneError(f"reference impedance must be positive, got {z_ref}", line_no)
            i += 1
        else:
            raise TouchstoneError(f"unknown option token {tokens[i]!r}", line_no)
        i += 1
    return unit, fmt, z_ref


def parse_touchstone(text: str, n_ports: int | None = None) -> TouchstoneNetwork:
    """Parse Touchstone v1 text.

    When n_ports is None the port count is inferred from the row shapes
    (3 values: 1-port; 9 values per row: 2-port; 9/8/8/8 groups: 4-port).
    All structural errors report the offending 1-based line number.
    """
    option = None
    rows = []  # (line_no, [floats])
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError("duplicate option line", line_no)
            if rows:
                raise TouchstoneError("option line must precede data", line_no)
            option = _parse_option_line(line[1:].split(), line_no)
            continue
        if option is None:
            raise TouchstoneError("data before option line", line_no)
        values = []
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise TouchstoneError(f"non-numeric field {tok!r}", line_no) from None
        if not all(math.isfinite(v) for v in values):
            raise TouchstoneError("non-finite field", line_no)
        rows.append((line_no, values))

    if option is None:
        last = text.count("\n") + 1 if text else 1
        raise TouchstoneError("missing option line", last)
    unit, fmt, z_ref = option

    if n_ports is None:
        n_ports = _infer_ports(rows)
    if n_ports not in (1, 2, 4):
        raise TouchstoneError(f"unsupported port count {n_ports}")

    if n_ports in (1, 2):
        freqs, mats = _parse_flat_rows(rows, n_ports, fmt)
    else:
        freqs, mats = _parse_four_port_rows(rows, fmt)

    for idx in range(1, len(freqs)):
        if freqs[idx][1] <= freqs[idx - 1][1]:
            raise TouchstoneError(
                f"frequency {freqs[idx][1]:g} not above previous {freqs[idx - 1][1]:g}",
                freqs[idx][0],
            )
    freq = np.array([f for (_, f) in freqs])
    s = np.array(mats) if mats else np.zeros((0, n_ports, n_ports), dtype=complex)
    return TouchstoneNetwork(n_ports, unit, fmt, z_ref, freq, s)


def _infer_ports(rows):
    if not rows:
        raise TouchstoneError("cannot infer port count from an empty file")
    first = len(rows[0][1])
    if first == 3:
        return 1
    if first == 9:
        if len(rows) > 1 and len(rows[1][1]) == 8:
            return 4
        return 2
    raise TouchstoneError(
        f"unrecognized data row of {first} values", rows[0][0]
    )


def _parse_flat_rows(rows, n_ports, fmt):
    expected = 1 + 2 * n_ports * n_ports
    freqs, mats = [], []
    for line_no, values in rows:
        if len(values) != expected:
            raise TouchstoneError(
                f"expected {expected} values per row, got {len(values)}", line_no
            )
        freqs.append((line_no, values[0]))
        pairs = [
            _pair_to_complex(fmt, values[k], values[k + 1], line_no)
            for k in range(1, len(values), 2)
        ]
        if n_ports == 1:
            mats.append(np.array([[pairs[0]]]))
        else:
            # v1 two-port order: S11 S21 S12 S22
            mats.append(np.array([[pairs[0], pairs[2]], [pairs[1], pairs[3]]]))
    return freqs, mats


def _parse_four_port_rows(rows, fmt):
    if len(rows) % 4 != 0:
        raise TouchstoneError(
            "four-port data must come in groups of four rows", rows[-1][0]
        )
    freqs, mats = [], []
    for g in range(0, len(rows), 4):
        line_no, values = rows[g]
        if len(values) != 9:
            raise TouchstoneError(
                f"expected frequency plus 8 values, got {len(values)}", line_no
            )
        freqs.append((line_no, values[0]))
        entries = list(values[1:])
        for sub in range(1, 4):
            sub_no, sub_vals = rows[g + sub]
            if len(sub_vals) != 8:
                raise TouchstoneError(
                    f"expected 8 values in continuation row, got {len(sub_vals)}", sub_no
                )
            entries.extend(sub_vals)
        cplx = [
            _pair_to_complex(fmt, entries[k], entries[k + 1], line_no)
            for k in range(0, len(entries), 2)
        ]
        mats.append(np.array(cplx).reshape(4, 4))
    return freqs, mats


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_touchstone(net: TouchstoneNetwork) -> str:
    """Serialize a network back to Touchstone v1 text."""
    lines = [GENERATOR_TAG]
    lines.append(f"# {net.freq_unit} S {net.data_format} R {_fmt(net.z_ref)}")
    for i, f in enumerate(net.freq):
        pairs = [
            _complex_to_pair(net.data_format, complex(v))
            for v in net.s[i].reshape(-1)
        ]
        if net.n_ports in (1, 2):
            if net.n_ports == 2:  # v1 order: S11 S21 S12 S22
                pairs = [pairs[0], pairs[2], pairs[1], pairs[3]]
            flat = [x for pair in pairs for x in pair]
            lines.append(" ".join([_fmt(f)] + [_fmt(x) for x in flat]))
        else:
            for r in range(4):
                row_pairs = pairs[4 * r:4 * r + 4]
                flat = [x for pair in row_pairs for x in pair]
                head = [_fmt(f)] if r == 0 else []
                lines.append(" ".join(head + [_fmt(x) for x in flat]))
    return "\n".join(lines) + "\n"


SWEEP_CSV_HEADER = "f_norm,s11_diff_db,s21_diff_db,s11_comm_db,s21_comm_db,cmrr_db,s21_diff_deg"


def write_sweep_csv(sw: SweepResult) -> str:
    """CSV of a mode sweep; dB columns floored at -200 for zero magnitudes."""
    lines = [SWEEP_CSV_HEADER]
    s11d = db20(sw.s11_diff)
    s21d = db20(sw.s21_diff)
    s11c = db20(sw.s11_comm)
    s21c = db20(sw.s21_comm)
    deg = np.degrees(np.angle(sw.s21_diff))
    for i in range(len(sw.f_norm)):
        lines.append(",".join(_fmt(x) for x in (
            sw.f_norm[i], s11d[i], s21d[i], s11c[i], s21c[i], sw.cmrr_db[i], deg[i],
        )))
    return "\n".join(lines) + "\n"


CONTOUR_CSV_HEADER = "theta_over_pi,cr,z_ratio,s11_db"


def write_contour_csv(contour: ContourResult) -> str:
    """Long-format CSV of single-stage |S11| contours."""
    lines = [CONTOUR_CSV_HEADER]
    x = contour.thetas / math.pi
    for trace in contour.traces:
        s11_db = db20(trace.s11_mag)
        for i in range(len(x)):
            lines.append(",".join(_fmt(v) for v in (
                x[i], trace.cr, trace.z_ratio, s11_db[i],
            )))
    return "\n".join(lines) + "\n"


_REQUIRED_KEYS = (
    "zcl1_ohm", "zcl2_ohm", "cr1", "cr2",
    "theta1_deg", "theta2_deg", "theta_d1_deg", "theta_d2_deg",
)
_OPTIONAL_KEYS = ("theta3_deg", "f0_hz", "zdiff_ohm", "zcomm_ohm", "zdelay_ohm")


def parse_design_config(text: str) -> DcBlockerParams:
    """Parse a flat key = value design description.

    Missing theta3_deg falls back to theta1_deg, zcomm_ohm/zdelay_ohm to
    zdiff_ohm, zdiff_ohm to 50 and f0_hz to 7.2e9.
    """
    values: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
            raise ConfigError(f"line {line_no}: unknown key '{key}'", key)
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'", key)
        try:
            parsed = float(val.strip())
        except ValueError:
            raise ConfigError(
                f"line {line_no}: value for '{key}' is not a number: {val.strip()!r}", key
            ) from None
        if not math.isfinite(parsed):
            raise ConfigError(f"line {line_no}: value for '{key}' is not finite", key)
        values[key] = parsed

    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key '{missing[0]}'", missing[0])

    for key in ("cr1", "cr2"):
        if not 0.0 <= values[key] < 1.0:
            raise ConfigError(f"'{key}' must be in [0, 1), got {values[key]}", key)
    for key in ("zcl1_ohm", "zcl2_ohm", "zdiff_ohm", "zcomm_ohm", "zdelay_ohm", "f0_hz"):
        if key in values and not values[key] > 0.0:
            raise ConfigError(f"'{key}' must be positive, got {values[key]}", key)
    for key in ("theta1_deg", "theta2_deg", "theta3_deg", "theta_d1_deg", "theta_d2_deg"):
        if key in values and values[key] < 0.0:
            raise ConfigError(f"'{key}' must be >= 0, got {values[key]}", key)

    zdiff = values.get("zdiff_ohm", 50.0)
    return DcBlockerParams(
        z_cl1=values["zcl1_ohm"],
        z_cl2=values["zcl2_ohm"],
        cr1=values["cr1"],
        cr2=values["cr2"],
        theta1=math.radians(values["theta1_deg"]),
        theta2=math.radians(values["theta2_deg"]),
        theta3=math.radians(values["theta3_deg"]) if "theta3_deg" in values else None,
        theta_d1=math.radians(values["theta_d1_deg"]),
        theta_d2=math.radians(values["theta_d2_deg"]),
        f0=values.get("f0_hz", 7.2e9),
        z_diff=zdiff,
        z_comm=values.get("zcomm_ohm"),
        z_delay=values.get("zdelay_ohm"),
    )
