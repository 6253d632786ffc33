"""Closed-form wave transfer matrix of a uniform coupled-line section.

A lossless TEM coupled pair of electrical length theta has the transfer
matrix M = cos(theta) I + j sin(theta) D, where D is a real involutory
4x4 matrix (D @ D = I) determined by the per-unit-length capacitance
matrix and the reference impedance, or equivalently by the coupling
ratio CR and the matched impedance Z_CL of the section:

    Z0e = Z_CL * sqrt((1 + CR) / (1 - CR))
    Z0o = Z_CL * sqrt((1 - CR) / (1 + CR))

The discrete-element route (an L-section ladder of n infinitesimal
elements, chained by matrix power) converges to the closed form with
first-order error in 1/n and serves as the brute-force oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidCapacitanceError, SingularCouplingError
from .network import FourPortM

TWO_PI = 2.0 * np.pi

#: default TEM wave velocity used when synthesizing capacitance data (m/s)
DEFAULT_VELOCITY = 3.0e8


@dataclass(frozen=True)
class CapacitancePerLength:
    """Physical description of a coupled pair: per-unit-length capacitance
    matrix [[c11, c12], [c12, c22]] (c12 = -C_M <= 0), TEM wave velocity,
    and section length."""

    c11: float
    c22: float
    c12: float
    v_tl: float
    length: float

    def __post_init__(self):
        if not (self.c11 > 0.0 and self.c22 > 0.0):
            raise InvalidCapacitanceError("diagonal capacitances must be positive")
        if self.c12 > 0.0:
            raise InvalidCapacitanceError("mutual entry c12 must be <= 0 (-C_M)")
        if self.c11 * self.c22 - self.c12 * self.c12 <= 0.0:
            raise InvalidCapacitanceError("capacitance matrix must be positive definite")
        if not self.v_tl > 0.0:
            raise InvalidCapacitanceError("wave velocity must be positive")
        if not self.length > 0.0:
            raise InvalidCapacitanceError("section length must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.c11, self.c12], [self.c12, self.c22]])


@dataclass(frozen=True)
class CoupledSectionSpec:
    """Design description of a symmetric coupled section: coupling ratio,
    matched impedance, and electrical length at the reference frequency."""

    cr: float
    z_cl: float
    theta0: float

    def __post_init__(self):
        if not 0.0 <= self.cr < 1.0:
            raise SingularCouplingError(f"coupling ratio must be in [0, 1), got {self.cr}")
        if not self.z_cl > 0.0:
            raise ValueError(f"matched impedance must be positive, got {self.z_cl}")
        if self.theta0 < 0.0:
            raise ValueError(f"electrical length must be >= 0, got {self.theta0}")


def electrical_length(c: CapacitancePerLength, freq: float) -> float:
    """theta = 2 pi f length / v_tl (radians)."""
    if freq < 0.0:
        raise ValueError("frequency must be >= 0")
    return TWO_PI * freq * c.length / c.v_tl


def even_odd_from_cr(cr: float, z_cl: float) -> tuple[float, float]:
    """Even/odd mode impedances (z0e, z0o) of a symmetric section."""
    if not 0.0 <= cr < 1.0:
        raise SingularCouplingError(f"coupling ratio must be in [0, 1), got {cr}")
    if not z_cl > 0.0:
        raise ValueError("z_cl must be positive")
    ratio = np.sqrt((1.0 + cr) / (1.0 - cr))
    return z_cl * ratio, z_cl / ratio


def cr_from_even_odd(z0e: float, z0o: float) -> tuple[float, float]:
    """Inverse map: (cr, z_cl) from even/odd impedances, z0e >= z0o > 0."""
    if not z0o > 0.0:
        raise ValueError("impedances must be positive")
    if z0e < z0o:
        raise ValueError(f"expected z0e >= z0o, got ({z0e}, {z0o})")
    return (z0e - z0o) / (z0e + z0o), float(np.sqrt(z0e * z0o))


def d_imag_from_cr(cr: float, z_ratio: float) -> np.ndarray:
    """D matrix of a symmetric section from (CR, Z0/Z_CL).

    With r = z_ratio and the 2x2 kernels K-+ = [[1, -+CR], [-+CR, 1]]:

        D = [[P, Q], [-Q, -P]],    P = (G + G^{-1}) / 2,  Q = (G - G^{-1}) / 2,
        G = r K- / sqrt(1 - CR^2),  G^{-1} = K+ / (r sqrt(1 - CR^2)).
    """
    if not 0.0 <= cr < 1.0:
        raise SingularCouplingError(f"coupling ratio must be in [0, 1), got {cr}")
    if not z_ratio > 0.0:
        raise ValueError("z_ratio must be positive")
    root = np.sqrt(1.0 - cr * cr)
    g = (z_ratio / root) * np.array([[1.0, -cr], [-cr, 1.0]])
    g_inv = (1.0 / (z_ratio * root)) * np.array([[1.0, cr], [cr, 1.0]])
    return _assemble_d(g, g_inv)


def d_imag_from_capacitance(c: CapacitancePerLength, z0: float) -> np.ndarray:
    """D matrix from the physical capacitance description at reference z0.

    Built from the dimensionless matrix G = v_tl * z0 * C_u and its inverse;
    supports asymmetric (c11 != c22) pairs.
    """
    if not z0 > 0.0:
        raise ValueError("z0 must be positive")
    g = c.v_tl * z0 * c.matrix
    g_inv = np.linalg.inv(g)
    return _assemble_d(g, g_inv)


def _assemble_d(g, g_inv):
    p = 0.5 * (g + g_inv)
    q = 0.5 * (g - g_inv)
    return np.block([[p, q], [-q, -p]])


def d_real() -> np.ndarray:
    """Second-order element matrix coefficient: half the all-ones block matrix.
    Only enters the discrete-element oracle; its contribution vanishes in the
    continuum limit."""
    i2 = np.eye(2)
    return 0.5 * np.block([[i2, i2], [i2, i2]])


def is_involutory(d, tol: float = 1e-12) -> bool:
    """Check D @ D = I within tol (entrywise)."""
    d = np.asarray(d)
    return bool(np.abs(d @ d - np.eye(4)).max() < tol)


def m_total(d, theta: float, z0: float) -> FourPortM:
    """Closed-form section matrix M = cos(theta) I + j sin(theta) D at z0."""
    d = np.asarray(d, dtype=float)
    if d.shape != (4, 4):
        raise ValueError(f"D must be 4x4, got {d.shape}")
    return FourPortM(np.cos(theta) * np.eye(4) + 1j * np.sin(theta) * d, z0)


def section_m(cr: float, z_cl: float, theta: float, z0: float) -> FourPortM:
    """Convenience: coupled section matrix from design parameters at z0."""
    return m_total(d_imag_from_cr(cr, z0 / z_cl), theta, z0)


def section_m_at(spec: CoupledSectionSpec, f_norm: float, z0: float) -> FourPortM:
    """Section matrix at a normalized frequency; the electrical length
    scales linearly from its reference-frequency value."""
    return section_m(spec.cr, spec.z_cl, spec.theta0 * f_norm, z0)


def element_m(c: CapacitancePerLength, z0: float, freq: float, n: int) -> np.ndarray:
    """Single discrete element: I - (theta/n)^2 D_r + j (theta/n) D_i."""
    theta_n = electrical_length(c, freq) / n
    return (
        np.eye(4)
        - theta_n * theta_n * d_real()
        + 1j * theta_n * d_imag_from_capacitance(c, z0)
    )


def m_total_discrete_oracle(c: CapacitancePerLength, z0: float, freq: float, n: int) -> FourPortM:
    """Brute-force section matrix: n-fold product of the discrete element.

    Converges to m_total with error of order theta^2 / n.
    """
    if n < 1:
        raise ValueError("element count must be >= 1")
    return FourPortM(np.linalg.matrix_power(element_m(c, z0, freq, n), n), z0)


def capacitance_from_cr(
    cr: float,
    z_cl: float,
    theta0: float,
    f0: float,
    v_tl: float = DEFAULT_VELOCITY,
) -> CapacitancePerLength:
    """Synthesize a symmetric capacitance description equivalent to
    (CR, Z_CL) with electrical length theta0 at frequency f0.

    Even/odd per-unit-length capacitances are 1 / (v Z0e) and 1 / (v Z0o);
    the conductor entries follow as their half sum/difference.
    """
    if not f0 > 0.0:
        raise ValueError("f0 must be positive")
    if not theta0 > 0.0:
        raise ValueError("theta0 must be positive")
    z0e, z0o = even_odd_from_cr(cr, z_cl)
    c_even = 1.0 / (v_tl * z0e)
    c_odd = 1.0 / (v_tl * z0o)
    c11 = 0.5 * (c_even + c_odd)
    c12 = 0.5 * (c_even - c_odd)
    length = theta0 * v_tl / (TWO_PI * f0)
    return CapacitancePerLength(c11=c11, c22=c11, c12=c12, v_tl=v_tl, length=length)
