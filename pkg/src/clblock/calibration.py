"""Through-Line error-box extraction and de-embedding.

A device is measured through two identical but mirrored fixtures:

    T_test = T_x T_dut T_y,      T_y = (E2 T_x E2)^{-1}

Two calibration standards share the fixtures: a Through (T_x T_y) and a
Line (T_x T_l T_y) with T_l = diag(e^{j theta_l}, e^{-j theta_l}) for a
lossless, matched line.  The similarity T_line T_through^{-1} = T_x T_l
T_x^{-1} yields T_l's entries as eigenvalues and T_x's columns as
eigenvectors; the remaining per-column scales are pinned by re-imposing
the Through measurement, which determines the column ratio exactly and
leaves one common complex factor that cancels in de-embedding.

The pipeline drops (with a warning) frequencies where either standard has
no transmission, and refuses lines whose electrical length is within 1e-3
radian of a multiple of pi, where the eigenvalues coincide.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import matrixkit as mk
from .errors import (
    CalibrationDegenerateError,
    DegenerateEigenError,
    FrequencyAlignmentError,
)
from .network import E2, TwoPortS, TwoPortT, s_from_t, t_from_s

#: |sin(theta_line)| below which the line standard is degenerate
LINE_DEGENERACY_FLOOR = 1e-3

#: |S21| at or below which a standard is considered non-transmitting
TRANSMISSION_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class CalStandardSet:
    """Through and Line S-parameters on a shared frequency grid, plus the
    nominal line electrical length (radians) per frequency."""

    freq_hz: np.ndarray
    s_through: np.ndarray
    s_line: np.ndarray
    theta_line: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "freq_hz", np.asarray(self.freq_hz, dtype=float))
        object.__setattr__(self, "s_through", np.asarray(self.s_through, dtype=complex))
        object.__setattr__(self, "s_line", np.asarray(self.s_line, dtype=complex))
        object.__setattr__(self, "theta_line", np.asarray(self.theta_line, dtype=float))
        n = len(self.freq_hz)
        if self.s_through.shape != (n, 2, 2) or self.s_line.shape != (n, 2, 2):
            raise ValueError("standards must be stacks of 2x2 matrices matching the grid")
        if self.theta_line.shape != (n,):
            raise ValueError("theta_line must match the frequency grid")
        if n > 1 and np.any(np.diff(self.freq_hz) <= 0.0):
            raise ValueError("frequencies must be strictly increasing")


@dataclass(frozen=True, eq=False)
class ErrorBox:
    """Left fixture transfer matrix per retained frequency."""

    freq_hz: np.ndarray
    t_x: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "freq_hz", np.asarray(self.freq_hz, dtype=float))
        object.__setattr__(self, "t_x", np.asarray(self.t_x, dtype=complex))
        if self.t_x.shape != (len(self.freq_hz), 2, 2):
            raise ValueError("t_x must be a stack of 2x2 matrices matching the grid")


def _wrap(angle):
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def extract_error_box(cal: CalStandardSet) -> ErrorBox:
    """Recover the left fixture from Through and Line measurements."""
    kept_freqs = []
    kept_tx = []
    for i, f in enumerate(cal.freq_hz):
        theta = cal.theta_line[i]
        if abs(math.sin(theta)) < LINE_DEGENERACY_FLOOR:
            raise CalibrationDegenerateError(f)
        if (
            abs(cal.s_through[i][1, 0]) <= TRANSMISSION_FLOOR
            or abs(cal.s_line[i][1, 0]) <= TRANSMISSION_FLOOR
        ):
            warnings.warn(
                f"dropping {f:g} Hz: calibration standard has no transmission",
                stacklevel=2,
            )
            continue
        t_thru = t_from_s(TwoPortS(cal.s_through[i], cal.z0)).t
        t_line = t_from_s(TwoPortS(cal.s_line[i], cal.z0)).t
        t_tl = t_line @ mk.mat_inv(t_thru)
        try:
            (lam1, v1), (lam2, v2) = mk.eig_2x2(t_tl)
        except DegenerateEigenError as exc:
            raise CalibrationDegenerateError(f, f"{f:g} Hz: {exc}") from exc
        # first column pairs with the eigenvalue whose phase is nearer +theta
        if abs(_wrap(cmath.phase(lam2) - theta)) < abs(_wrap(cmath.phase(lam1) - theta)):
            v1, v2 = v2, v1
        a = np.column_stack([v1, v2])
        # re-impose the Through: K = A^{-1} T_through E2 A E2 must equal
        # diag(t, 1/t); scaling column 1 by t restores consistency
        k = mk.mat_inv(a) @ t_thru @ E2 @ a @ E2
        off = max(abs(k[0, 1]), abs(k[1, 0]))
        if off > 1e-6 * mk.norm_inf(k):
            warnings.warn(
                f"{f:g} Hz: measurements deviate from the through-line model "
                f"(residual {off:.2e})",
                stacklevel=2,
            )
        t_scale = k[0, 0]
        kept_freqs.append(f)
        kept_tx.append(a @ np.diag([t_scale, 1.0]))

    t_x = np.array(kept_tx)
    # cosmetic overall-sign continuity: anchor the transmission phase of the
    # lowest retained frequency inside (-90, 90) degrees and keep it from
    # jumping by more than 90 degrees between neighbors.  De-embedding is
    # invariant to this choice.
    prev = None
    for i in range(len(t_x)):
        ang = cmath.phase(1.0 / t_x[i][0, 0])
        if prev is None:
            if abs(ang) >= math.pi / 2.0:
                t_x[i] = -t_x[i]
                ang = cmath.phase(1.0 / t_x[i][0, 0])
        elif abs(_wrap(ang - prev)) > math.pi / 2.0:
            t_x[i] = -t_x[i]
            ang = cmath.phase(1.0 / t_x[i][0, 0])
        prev = ang
    return ErrorBox(np.array(kept_freqs), t_x, cal.z0)


def _check_aligned(freq_a, freq_b):
    freq_a = np.asarray(freq_a, dtype=float)
    freq_b = np.asarray(freq_b, dtype=float)
    if freq_a.shape != freq_b.shape or not np.allclose(freq_a, freq_b, rtol=1e-9, atol=0.0):
        raise FrequencyAlignmentError("frequency grids do not match")


def deembed(freq_hz, s_test, eb: ErrorBox) -> np.ndarray:
    """Remove both fixtures from a measured cascade.

    T_dut = T_x^{-1} T_test E2 T_x E2, returned as a stack of S matrices.
    Invariant under any common rescaling of T_x.
    """
    _check_aligned(freq_hz, eb.freq_hz)
    s_test = np.asarray(s_test, dtype=complex)
    if s_test.shape != (len(eb.freq_hz), 2, 2):
        raise ValueError("s_test must be a stack of 2x2 matrices matching the grid")
    out = np.empty_like(s_test)
    for i in range(len(eb.freq_hz)):
        t_test = t_from_s(TwoPortS(s_test[i], eb.z0)).t
        t_x = eb.t_x[i]
        t_dut = mk.mat_inv(t_x) @ t_test @ E2 @ t_x @ E2
        out[i] = s_from_t(TwoPortT(t_dut, eb.z0)).s
    return out


def synth_cal_data(freq_hz, t_x, theta_line, s_dut=None, z0: float = 50.0):
    """Generate Through/Line (and optionally embedded-device) measurements
    from a known fixture; the oracle generator for the extraction pipeline.

    Returns (CalStandardSet, s_test) where s_test is None when no device
    is supplied.
    """
    freq_hz = np.asarray(freq_hz, dtype=float)
    t_x = np.asarray(t_x, dtype=complex)
    theta_line = np.asarray(theta_line, dtype=float)
    n = len(freq_hz)
    if t_x.shape != (n, 2, 2) or theta_line.shape != (n,):
        raise ValueError("t_x and theta_line must match the frequency grid")
    s_through = np.empty((n, 2, 2), dtype=complex)
    s_line = np.empty((n, 2, 2), dtype=complex)
    s_test = np.empty((n, 2, 2), dtype=complex) if s_dut is not None else None
    for i in range(n):
        t_y = mk.mat_inv(E2 @ t_x[i] @ E2)
        t_l = np.diag([np.exp(1j * theta_line[i]), np.exp(-1j * theta_line[i])])
        s_through[i] = s_from_t(TwoPortT(t_x[i] @ t_y, z0)).s
        s_line[i] = s_from_t(TwoPortT(t_x[i] @ t_l @ t_y, z0)).s
        if s_test is not None:
            t_dut = t_from_s(TwoPortS(np.asarray(s_dut)[i], z0)).t
            s_test[i] = s_from_t(TwoPortT(t_x[i] @ t_dut @ t_y, z0)).s
    cal = CalStandardSet(freq_hz, s_through, s_line, theta_line, z0)
    return cal, s_test
