"""Five-section balanced phase-inverted DC-blocker model.

One path of the blocker is the cascade

    cpl1 . delay1 . cpl2 . rot(delay1) . rot(cpl1')

where rot() is the physical-reversal rotation and cpl1' is a cpl1-type
section of length theta3 (theta3 = theta1 reproduces the exact
rotated-copy structure).  Differential-mode excitation of the balanced
pair is equivalent to the single path evaluated at half the differential
port reference, cascaded with an ideal phase inverter; common-mode
excitation is equivalent to the single path evaluated at twice the
common-mode port reference.

Delay lines are modeled as single-conductor lines of fixed characteristic
impedance z_delay (default: the nominal differential reference).  They are
therefore mismatched at the mode-halved/doubled evaluation references,
which is what makes the parallel/series pair equivalences hold for one
physical network across both modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupled import CoupledSectionSpec, section_m, section_m_at
from .errors import SingularCouplingError
from .network import (
    FourPortM,
    OpenReduction,
    TwoPortS,
    cascade,
    cascade_t,
    ideal_inverter,
    m_line_pair,
    reduce_open_2_3,
    reduction_to_s,
    rotate_m,
    s_from_t,
    t_from_s,
)

#: dB floor applied to zero magnitudes
DB_FLOOR = -200.0


def db20(x):
    """20 log10 |x| with a floor of -200 dB for vanishing magnitudes."""
    mag = np.abs(np.asarray(x, dtype=complex))
    out = np.full(mag.shape, DB_FLOOR)
    nz = mag > 10.0 ** (DB_FLOOR / 20.0)
    out[nz] = 20.0 * np.log10(mag[nz])
    if out.shape == ():
        return float(out)
    return out


@dataclass(frozen=True)
class DcBlockerParams:
    """Full design of the five-section blocker.

    Electrical lengths are in radians at the reference frequency f0 and
    scale linearly with frequency.  theta3, z_comm and z_delay default to
    theta1, z_diff and z_diff respectively.
    """

    z_cl1: float
    z_cl2: float
    cr1: float
    cr2: float
    theta1: float
    theta2: float
    theta3: float | None = None
    theta_d1: float = 0.0
    theta_d2: float = 0.0
    f0: float = 7.2e9
    z_diff: float = 50.0
    z_comm: float | None = None
    z_delay: float | None = None

    def __post_init__(self):
        if self.theta3 is None:
            object.__setattr__(self, "theta3", self.theta1)
        if self.z_comm is None:
            object.__setattr__(self, "z_comm", self.z_diff)
        if self.z_delay is None:
            object.__setattr__(self, "z_delay", self.z_diff)
        for name in ("z_cl1", "z_cl2", "f0", "z_diff", "z_comm", "z_delay"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("cr1", "cr2"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise SingularCouplingError(f"{name} must be in [0, 1)")
        for name in ("theta1", "theta2", "theta3", "theta_d1", "theta_d2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def cpl1(self) -> CoupledSectionSpec:
        return CoupledSectionSpec(self.cr1, self.z_cl1, self.theta1)

    @property
    def cpl2(self) -> CoupledSectionSpec:
        return CoupledSectionSpec(self.cr2, self.z_cl2, self.theta2)

    @property
    def cpl3(self) -> CoupledSectionSpec:
        """The rotated end section: cpl1's coupling and impedance with its
        own length."""
        return CoupledSectionSpec(self.cr1, self.z_cl1, self.theta3)


def _deg(x):
    return math.radians(x)


#: unoptimized equal-impedance design (three coupled sections totalling 90
#: degrees, no delay lines)
TABLE1 = DcBlockerParams(
    z_cl1=43.3, z_cl2=43.3, cr1=0.58, cr2=0.58,
    theta1=_deg(22.5), theta2=_deg(45.0),
)

#: compressed design with mixed impedances and nonzero delay lines
TABLE2 = DcBlockerParams(
    z_cl1=100.0, z_cl2=65.0, cr1=0.3, cr2=0.75,
    theta1=_deg(14.4), theta2=_deg(22.4),
    theta_d1=_deg(12.0), theta_d2=_deg(16.0),
)

PRESETS = {"table1": TABLE1, "table2": TABLE2}


def build_path_m(p: DcBlockerParams, f_norm: float, z_ref: float) -> FourPortM:
    """Transfer matrix of one blocker path at normalized frequency f_norm,
    expressed at reference z_ref."""
    if not f_norm > 0.0:
        raise ValueError("f_norm must be positive")
    cpl1 = section_m_at(p.cpl1, f_norm, z_ref)
    cpl2 = section_m_at(p.cpl2, f_norm, z_ref)
    cpl3 = rotate_m(section_m_at(p.cpl3, f_norm, z_ref))
    delay1 = m_line_pair(p.theta_d1 * f_norm, p.theta_d2 * f_norm, p.z_delay, z_ref)
    delay2 = rotate_m(delay1)
    return cascade([cpl1, delay1, cpl2, delay2, cpl3])


def _reduced(p: DcBlockerParams, f_norm: float, z_ref: float) -> OpenReduction:
    return reduce_open_2_3(build_path_m(p, f_norm, z_ref))


def diff_mode_s(p: DcBlockerParams, f_norm: float) -> TwoPortS:
    """Differential-mode S at the z_diff differential ports.

    Series-pair equivalence: the balanced pair at z_diff equals the single
    path at z_diff / 2; the ideal inverter is then cascaded.  Degenerate
    (full-reflection) points stay full-reflection through the inverter.
    """
    freq = f_norm * p.f0
    red = _reduced(p, f_norm, p.z_diff / 2.0)
    if red.degenerate:
        return TwoPortS(np.eye(2, dtype=complex), p.z_diff, freq)
    t_inv = t_from_s(ideal_inverter(red.z0))
    s = s_from_t(cascade_t([red.t, t_inv]), freq)
    return TwoPortS(s.s, p.z_diff, freq)


def common_mode_s(p: DcBlockerParams, f_norm: float) -> TwoPortS:
    """Common-mode S at the z_comm ports.

    Parallel-pair equivalence: the pair at z_comm equals the single path
    at 2 z_comm (admittance doubling); no inverter.
    """
    freq = f_norm * p.f0
    red = _reduced(p, f_norm, 2.0 * p.z_comm)
    s = reduction_to_s(red, freq)
    return TwoPortS(s.s, p.z_comm, freq)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Per-frequency differential and common mode responses."""

    f_norm: np.ndarray
    s11_diff: np.ndarray
    s21_diff: np.ndarray
    s11_comm: np.ndarray
    s21_comm: np.ndarray
    cmrr_db: np.ndarray

    def __post_init__(self):
        n = len(self.f_norm)
        for name in ("s11_diff", "s21_diff", "s11_comm", "s21_comm", "cmrr_db"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match frequency grid")


def sweep(p: DcBlockerParams, f_norms) -> SweepResult:
    """Evaluate both modes over a strictly increasing normalized grid."""
    f = np.asarray(f_norms, dtype=float)
    if f.ndim != 1 or len(f) == 0:
        raise ValueError("frequency grid must be a nonempty 1-D array")
    if np.any(f <= 0.0):
        raise ValueError("frequency grid must be positive")
    if np.any(np.diff(f) <= 0.0):
        raise ValueError("frequency grid must be strictly increasing")
    s11d = np.empty(len(f), dtype=complex)
    s21d = np.empty(len(f), dtype=complex)
    s11c = np.empty(len(f), dtype=complex)
    s21c = np.empty(len(f), dtype=complex)
    for i, fn in enumerate(f):
        sd = diff_mode_s(p, fn)
        sc = common_mode_s(p, fn)
        s11d[i] = sd.s[0, 0]
        s21d[i] = sd.s[1, 0]
        s11c[i] = sc.s[0, 0]
        s21c[i] = sc.s[1, 0]
    cmrr = db20(s21d) - db20(s21c)
    return SweepResult(f, s11d, s21d, s11c, s21c, cmrr)


@dataclass(frozen=True)
class BandwidthResult:
    """Band edges and relative width; rel_bw = 0 with NaN edges when no
    band containing f_norm = 1 meets the threshold."""

    f1: float
    f2: float
    rel_bw: float


EMPTY_BAND = BandwidthResult(math.nan, math.nan, 0.0)


def bandwidth_metric(sw: SweepResult, threshold_db: float) -> BandwidthResult:
    """Largest contiguous band containing f_norm = 1 where the differential
    return loss meets threshold_db; edges refined by linear interpolation
    in (f_norm, dB)."""
    if not threshold_db > 0.0:
        raise ValueError("threshold_db must be positive")
    f = sw.f_norm
    if len(f) == 0:
        raise ValueError("empty sweep")
    if f[0] > 1.0 or f[-1] < 1.0:
        raise ValueError("sweep grid must span f_norm = 1")
    level = -threshold_db
    s11_db = db20(sw.s11_diff)
    ok = s11_db <= level

    j = int(np.searchsorted(f, 1.0))
    if j < len(f) and f[j] == 1.0:
        anchors = [j]
    else:
        anchors = [j - 1, j]
    if not all(ok[k] for k in anchors):
        return EMPTY_BAND

    i0 = anchors[0]
    while i0 > 0 and ok[i0 - 1]:
        i0 -= 1
    i1 = anchors[-1]
    while i1 < len(f) - 1 and ok[i1 + 1]:
        i1 += 1

    if i0 == 0:
        f1 = float(f[0])
    else:
        f1 = _cross(f[i0 - 1], s11_db[i0 - 1], f[i0], s11_db[i0], level)
    if i1 == len(f) - 1:
        f2 = float(f[-1])
    else:
        f2 = _cross(f[i1], s11_db[i1], f[i1 + 1], s11_db[i1 + 1], level)
    return BandwidthResult(f1, f2, (f2 - f1) / ((f1 + f2) / 2.0))


def _cross(fa, da, fb, db_, level):
    # linear interpolation of the level crossing between two grid points
    return float(fa + (fb - fa) * (level - da) / (db_ - da))


@dataclass(frozen=True, eq=False)
class ContourTrace:
    """|S11| versus electrical length for one (cr, z_ratio) combination."""

    cr: float
    z_ratio: float
    s11_mag: np.ndarray


@dataclass(frozen=True, eq=False)
class ContourResult:
    thetas: np.ndarray
    traces: tuple[ContourTrace, ...]


def single_stage_contour(crs, z_ratios, thetas) -> ContourResult:
    """Single open-terminated coupled section: |S11|(theta) for each
    (cr, z_ratio) combination over a theta grid inside (0, pi)."""
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas <= 0.0) or np.any(thetas >= np.pi):
        raise ValueError("theta grid must lie strictly inside (0, pi)")
    traces = []
    for cr in crs:
        for zr in z_ratios:
            if not zr > 0.0:
                raise ValueError("z_ratio values must be positive")
            mag = np.empty(len(thetas))
            for i, th in enumerate(thetas):
                red = reduce_open_2_3(section_m(cr, 1.0 / zr, th, 1.0))
                mag[i] = 1.0 if red.degenerate else abs(s_from_t(red.t).s[0, 0])
            traces.append(ContourTrace(float(cr), float(zr), mag))
    return ContourResult(thetas, tuple(traces))
