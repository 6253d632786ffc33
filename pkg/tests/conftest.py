"""Shared test oracles, deliberately independent of the library's
wave-transfer-matrix route: classic even/odd-mode impedance analysis,
S-domain port termination, and random passive network generators."""

import numpy as np
import pytest


def eo_coupled_z4(z0e, z0o, theta):
    """4x4 impedance matrix of a symmetric coupled section from even/odd
    mode superposition.  Ports (1, 2, 3, 4) = (left c1, left c2, right c1,
    right c2), matching the library's convention."""
    def mode_z(zm):
        return -1j * zm * np.array([
            [1.0 / np.tan(theta), 1.0 / np.sin(theta)],
            [1.0 / np.sin(theta), 1.0 / np.tan(theta)],
        ])

    ze = mode_z(z0e)
    zo = mode_z(z0o)
    z = np.zeros((4, 4), dtype=complex)
    for a in (0, 1):          # left / right
        for b in (0, 1):
            tot = 0.5 * (ze[a, b] + zo[a, b])
            dif = 0.5 * (ze[a, b] - zo[a, b])
            z[2 * a, 2 * b] = tot
            z[2 * a, 2 * b + 1] = dif
            z[2 * a + 1, 2 * b] = dif
            z[2 * a + 1, 2 * b + 1] = tot
    return z


def s_from_z_nport(z, z0):
    n = z.shape[0]
    eye = np.eye(n)
    return (z / z0 - eye) @ np.linalg.inv(z / z0 + eye)


def eo_reduced_s(cr, z_ratio, theta, z0=1.0):
    """Independent oracle: S of the open-terminated (ports 2, 3) coupled
    section, from the even/odd impedance matrix with open ports removed."""
    z_cl = z0 / z_ratio
    ratio = np.sqrt((1.0 + cr) / (1.0 - cr))
    z4 = eo_coupled_z4(z_cl * ratio, z_cl / ratio, theta)
    z_red = z4[np.ix_([0, 3], [0, 3])]   # keep ports 1 and 4
    return s_from_z_nport(z_red, z0)


def eo_coupled_s4(cr, z_ratio, theta, z0=1.0):
    """Independent oracle: full 4x4 S of the coupled section."""
    z_cl = z0 / z_ratio
    ratio = np.sqrt((1.0 + cr) / (1.0 - cr))
    z4 = eo_coupled_z4(z_cl * ratio, z_cl / ratio, theta)
    return s_from_z_nport(z4, z0)


def terminate_open_2_3(s4, gamma=1.0):
    """S-domain oracle: terminate ports 2 and 3 of a 4x4 S with reflection
    gamma via the standard partitioned-termination formula."""
    keep = [0, 3]
    term = [1, 2]
    skk = s4[np.ix_(keep, keep)]
    skc = s4[np.ix_(keep, term)]
    sck = s4[np.ix_(term, keep)]
    scc = s4[np.ix_(term, term)]
    g = gamma * np.eye(2)
    return skk + skc @ g @ np.linalg.inv(np.eye(2) - scc @ g) @ sck


def random_passive_reciprocal(rng, min_s21=0.0, scale=0.9):
    """Random reciprocal 2x2 S with largest singular value equal to scale."""
    while True:
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        s = 0.5 * (a + a.T)
        s = scale * s / np.linalg.norm(s, 2)
        if abs(s[1, 0]) >= min_s21:
            return s


def random_passive(rng, min_s21=0.0, scale=0.9):
    """Random (not necessarily reciprocal) passive 2x2 S."""
    while True:
        s = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        s = scale * s / np.linalg.norm(s, 2)
        if abs(s[1, 0]) >= min_s21:
            return s


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
