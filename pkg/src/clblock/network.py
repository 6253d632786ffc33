"""Wave scattering transfer matrices and structural network operations.

Conventions
-----------
Four-port M relates power waves as (a1, a2, b1, b2)^T = M (b3, b4, a3, a4)^T
with ports 1, 2 on the left and 3, 4 on the right; conductor 1 owns ports
1 and 3, conductor 2 owns ports 2 and 4.  Two-port T relates
(a1, b1)^T = T (b2, a2)^T.  Power waves are defined at a real reference
impedance z0.  Cascading is left-to-right matrix multiplication in both
sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit as mk
from .errors import (
    ConversionSingularError,
    MixedReferenceError,
    NoTransmissionError,
)

#: 4x4 anti-diagonal permutation used for rotated (physically reversed) copies
E4 = np.fliplr(np.eye(4))

#: 2x2 port-exchange permutation
E2 = np.array([[0.0, 1.0], [1.0, 0.0]])

#: relative threshold on the reduction denominator for the degenerate branch
DEGENERATE_REDUCTION_FLOOR = 1e-9


def _check_z0(z0):
    z0 = float(z0)
    if not z0 > 0.0:
        raise ValueError(f"reference impedance must be positive, got {z0}")
    return z0


@dataclass(frozen=True, eq=False)
class FourPortM:
    """4x4 wave scattering transfer matrix at a real reference impedance."""

    m: np.ndarray
    z0: float

    def __post_init__(self):
        object.__setattr__(self, "m", np.asarray(self.m, dtype=complex))
        object.__setattr__(self, "z0", _check_z0(self.z0))
        if self.m.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {self.m.shape}")


@dataclass(frozen=True, eq=False)
class TwoPortT:
    """2x2 wave scattering transfer matrix, (a1, b1)^T = T (b2, a2)^T."""

    t: np.ndarray
    z0: float

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=complex))
        object.__setattr__(self, "z0", _check_z0(self.z0))
        if self.t.shape != (2, 2):
            raise ValueError(f"expected 2x2 matrix, got {self.t.shape}")


@dataclass(frozen=True, eq=False)
class TwoPortS:
    """2x2 scattering matrix with reference impedance and optional frequency tag."""

    s: np.ndarray
    z0: float
    freq: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "s", np.asarray(self.s, dtype=complex))
        object.__setattr__(self, "z0", _check_z0(self.z0))
        if self.s.shape != (2, 2):
            raise ValueError(f"expected 2x2 matrix, got {self.s.shape}")


@dataclass(frozen=True, eq=False)
class FourPortS:
    """4x4 scattering matrix with reference impedance."""

    s: np.ndarray
    z0: float

    def __post_init__(self):
        object.__setattr__(self, "s", np.asarray(self.s, dtype=complex))
        object.__setattr__(self, "z0", _check_z0(self.z0))
        if self.s.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {self.s.shape}")


# ---------------------------------------------------------------------------
# four-port constructors and structural operations
# ---------------------------------------------------------------------------

def m_delay(theta_d1: float, theta_d2: float, z0: float) -> FourPortM:
    """Pair of isolated delay lines matched to z0.

    diag(e^{j t1}, e^{j t2}, e^{-j t1}, e^{-j t2}); conductor 1 carries
    theta_d1, conductor 2 carries theta_d2.
    """
    d = np.diag([
        np.exp(1j * theta_d1),
        np.exp(1j * theta_d2),
        np.exp(-1j * theta_d1),
        np.exp(-1j * theta_d2),
    ])
    return FourPortM(d, z0)


def m_line_pair(theta_d1: float, theta_d2: float, z_line: float, z0: float) -> FourPortM:
    """Pair of isolated single-conductor lines of characteristic impedance
    z_line, expressed at reference z0.  Reduces to m_delay when z_line == z0.
    """
    ta = line_t(theta_d1, z_line, z0).t
    tb = line_t(theta_d2, z_line, z0).t
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[0, 2] = ta[0, 0], ta[0, 1]
    m[2, 0], m[2, 2] = ta[1, 0], ta[1, 1]
    m[1, 1], m[1, 3] = tb[0, 0], tb[0, 1]
    m[3, 1], m[3, 3] = tb[1, 0], tb[1, 1]
    return FourPortM(m, z0)


def line_t(theta: float, z_line: float, z0: float) -> TwoPortT:
    """Transfer matrix of a lossless line of characteristic impedance z_line
    at reference z0; diag(e^{j theta}, e^{-j theta}) when z_line == z0."""
    z_line = _check_z0(z_line)
    den = 2.0 * z_line * z0 * np.cos(theta) + 1j * (z_line * z_line + z0 * z0) * np.sin(theta)
    s11 = 1j * (z_line * z_line - z0 * z0) * np.sin(theta) / den
    s21 = 2.0 * z_line * z0 / den
    t = np.array([
        [1.0 / s21, -s11 / s21],
        [s11 / s21, (s21 * s21 - s11 * s11) / s21],
    ])
    return TwoPortT(t, z0)


def rotate_m(m: FourPortM) -> FourPortM:
    """Physically reversed (rotated) copy: E4 M^{-1} E4."""
    return FourPortM(E4 @ mk.mat_inv(m.m) @ E4, m.z0)


def cascade(ms) -> FourPortM:
    """Left-to-right cascade of four-port transfer matrices."""
    ms = list(ms)
    if not ms:
        raise ValueError("cascade of an empty list")
    z0 = ms[0].z0
    acc = np.eye(4, dtype=complex)
    for m in ms:
        if not np.isclose(m.z0, z0, rtol=1e-12, atol=0.0):
            raise MixedReferenceError(
                f"cascade mixes reference impedances {z0} and {m.z0}"
            )
        acc = acc @ m.m
    return FourPortM(acc, z0)


def cascade_t(ts) -> TwoPortT:
    """Left-to-right cascade of two-port transfer matrices."""
    ts = list(ts)
    if not ts:
        raise ValueError("cascade of an empty list")
    z0 = ts[0].z0
    acc = np.eye(2, dtype=complex)
    for t in ts:
        if not np.isclose(t.z0, z0, rtol=1e-12, atol=0.0):
            raise MixedReferenceError(
                f"cascade mixes reference impedances {z0} and {t.z0}"
            )
        acc = acc @ t.t
    return TwoPortT(acc, z0)


# ---------------------------------------------------------------------------
# open-port reduction to a two-port
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OpenReduction:
    """Result of reducing a four-port with ports 2 and 3 left open.

    When the reduction is degenerate (the structure is a full reflector,
    which happens exactly where the transfer matrix is +-I, i.e. total
    electrical length a multiple of pi), ``t`` is None and the two-port
    has S11 = S22 = 1, S21 = S12 = 0.
    """

    t: TwoPortT | None
    z0: float

    @property
    def degenerate(self) -> bool:
        return self.t is None


def reduce_open_2_3(m: FourPortM) -> OpenReduction:
    """Two-port transfer matrix of a four-port with ports 2 and 3 open.

    Imposes a2 = b2 and a3 = b3 (open terminations, reflection +1) on the
    four-port wave relation and solves for (a1, b1)^T = T (b4, a4)^T.
    """
    a = m.m
    den = a[1, 0] + a[1, 2] - a[3, 0] - a[3, 2]
    if abs(den) < DEGENERATE_REDUCTION_FLOOR * mk.norm_inf(a):
        return OpenReduction(None, m.z0)
    col = np.array([[a[0, 0] + a[0, 2]], [a[2, 0] + a[2, 2]]])
    row = np.array([[a[1, 1] - a[3, 1], a[1, 3] - a[3, 3]]])
    t = np.array([[a[0, 1], a[0, 3]], [a[2, 1], a[2, 3]]]) - (col @ row) / den
    return OpenReduction(TwoPortT(t, m.z0), m.z0)


FULL_REFLECTION_S = np.eye(2, dtype=complex)


def reduction_to_s(red: OpenReduction, freq: float | None = None) -> TwoPortS:
    """Scattering matrix of an OpenReduction; the degenerate branch maps to
    the full-reflection S (identity), which has no T-form."""
    if red.degenerate:
        return TwoPortS(FULL_REFLECTION_S.copy(), red.z0, freq)
    return s_from_t(red.t, freq)


# ---------------------------------------------------------------------------
# S/T/Z conversions
# ---------------------------------------------------------------------------

def s_from_t(t: TwoPortT, freq: float | None = None) -> TwoPortS:
    """Scattering matrix of a two-port transfer matrix."""
    a = t.t
    if a[0, 0] == 0:
        raise ConversionSingularError("T11 = 0: transfer matrix not invertible to S")
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    s = np.array([
        [a[1, 0] / a[0, 0], det / a[0, 0]],
        [1.0 / a[0, 0], -a[0, 1] / a[0, 0]],
    ])
    return TwoPortS(s, t.z0, freq)


def t_from_s(s: TwoPortS) -> TwoPortT:
    """Transfer matrix of a two-port scattering matrix; requires S21 != 0."""
    a = s.s
    if abs(a[1, 0]) <= 1e-12:
        raise NoTransmissionError(f"|S21| = {abs(a[1, 0]):.3e}: T undefined")
    t = np.array([
        [1.0 / a[1, 0], -a[1, 1] / a[1, 0]],
        [a[0, 0] / a[1, 0], (a[0, 1] * a[1, 0] - a[0, 0] * a[1, 1]) / a[1, 0]],
    ])
    return TwoPortT(t, s.z0)


def s4_from_m(m: FourPortM) -> FourPortS:
    """Rearrange the four-port wave relation into b = S a."""
    a = m.m
    maa, mab = a[0:2, 0:2], a[0:2, 2:4]
    mba, mbb = a[2:4, 0:2], a[2:4, 2:4]
    try:
        inv_aa = mk.mat_inv(maa)
    except Exception as exc:
        raise ConversionSingularError("four-port S extraction is singular") from exc
    s = np.block([
        [mba @ inv_aa, mbb - mba @ inv_aa @ mab],
        [inv_aa, -inv_aa @ mab],
    ])
    return FourPortS(s, m.z0)


def z_from_s(s: TwoPortS) -> np.ndarray:
    """Impedance matrix of a two-port S; singular for full-transmission or
    full-reflection networks (eigenvalue of S equal to 1)."""
    eye = np.eye(2)
    try:
        inv = mk.mat_inv(eye - s.s)
    except Exception as exc:
        raise ConversionSingularError("(I - S) singular: no impedance matrix") from exc
    return s.z0 * (eye + s.s) @ inv


def s_from_z(z, z0: float, freq: float | None = None) -> TwoPortS:
    """Scattering matrix at reference z0 of a two-port impedance matrix."""
    z = np.asarray(z, dtype=complex)
    eye = np.eye(2)
    try:
        inv = mk.mat_inv(z / z0 + eye)
    except Exception as exc:
        raise ConversionSingularError("(Z/z0 + I) singular") from exc
    return TwoPortS((z / z0 - eye) @ inv, z0, freq)


def renormalize(s: TwoPortS, z_new: float) -> TwoPortS:
    """Re-express a two-port S at a new real reference impedance.

    Uses the closed form S' = (S - rho I)(I - rho S)^{-1} with
    rho = (z_new - z0) / (z_new + z0), which stays finite for fully
    reflective networks (S = I) where the impedance-matrix route blows up.
    The impedance route is kept as an independent cross-check in the tests.
    """
    z_new = _check_z0(z_new)
    rho = (z_new - s.z0) / (z_new + s.z0)
    eye = np.eye(2)
    try:
        inv = mk.mat_inv(eye - rho * s.s)
    except Exception as exc:
        raise ConversionSingularError("(I - rho S) singular in renormalization") from exc
    return TwoPortS((s.s - rho * eye) @ inv, z_new, s.freq)


def series_pair_oracle(s: TwoPortS) -> TwoPortS:
    """Series connection of two identical copies of a two-port, at the
    original reference.

    Brute-force composition through the impedance matrix (Z_total = 2 Z);
    requires the network to have a well-defined impedance matrix.  Serves
    as the independent oracle for the reference-halving equivalence of
    differential excitation.
    """
    z = z_from_s(s)
    return s_from_z(2.0 * z, s.z0, s.freq)


def ideal_inverter(z0: float) -> TwoPortS:
    """Ideal phase inverter: unity transmission with 180 degree phase."""
    return TwoPortS(np.array([[0.0, -1.0], [-1.0, 0.0]], dtype=complex), z0)
