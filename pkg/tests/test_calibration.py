import math

import numpy as np
import pytest

from clblock import calibration as cal
from clblock import network as nw
from clblock.errors import CalibrationDegenerateError, FrequencyAlignmentError
from conftest import random_passive


def _random_error_boxes(rng, freqs, min_s21=0.2):
    return np.array([
        nw.t_from_s(nw.TwoPortS(random_passive(rng, min_s21=min_s21), 50.0)).t
        for _ in freqs
    ])


def _reconstruct_line(t_x, theta):
    t_l = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    return t_x @ t_l @ np.linalg.inv(nw.E2 @ t_x @ nw.E2)


def test_perfect_fixtures_recovered():
    freqs = np.linspace(1e9, 5e9, 9)
    t_x = np.broadcast_to(np.eye(2, dtype=complex), (9, 2, 2)).copy()
    theta = np.full(9, math.radians(70.0))
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    assert np.abs(standards.s_through[0] - np.array([[0, 1], [1, 0]])).max() < 1e-12
    eb = cal.extract_error_box(standards)
    for i in range(9):
        # recovered fixture is the identity up to one complex scale
        scale = eb.t_x[i][0, 0]
        assert abs(scale) > 0
        assert np.abs(eb.t_x[i] - scale * np.eye(2)).max() < 1e-10
        # and it reproduces the line measurement exactly
        line = _reconstruct_line(eb.t_x[i], theta[i])
        want = nw.t_from_s(nw.TwoPortS(standards.s_line[i], 50.0)).t
        assert np.abs(line - want).max() < 1e-10


def test_synthetic_set_satisfies_similarity_identity(rng):
    freqs = np.linspace(2e9, 8e9, 25)
    t_x = _random_error_boxes(rng, freqs)
    theta = rng.uniform(math.radians(20), math.radians(160), size=len(freqs))
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    for i in range(len(freqs)):
        t_thru = nw.t_from_s(nw.TwoPortS(standards.s_through[i], 50.0)).t
        t_line = nw.t_from_s(nw.TwoPortS(standards.s_line[i], 50.0)).t
        t_l = np.diag([np.exp(1j * theta[i]), np.exp(-1j * theta[i])])
        want = t_x[i] @ t_l @ np.linalg.inv(t_x[i])
        got = t_line @ np.linalg.inv(t_thru)
        scale = max(1.0, np.abs(want).max())
        assert np.abs(got - want).max() < 1e-12 * scale


def test_synthetic_standards_reciprocal_for_reciprocal_fixture(rng):
    # det T = 1 marks a reciprocal two-port in this T convention
    freqs = np.linspace(2e9, 8e9, 7)
    t_x = np.array([
        nw.cascade_t([
            nw.line_t(rng.uniform(0.3, 2.0), rng.uniform(30, 80), 50.0),
            nw.line_t(rng.uniform(0.3, 2.0), rng.uniform(30, 80), 50.0),
        ]).t
        for _ in freqs
    ])
    theta = np.full(len(freqs), 1.0)
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    for s in (standards.s_through, standards.s_line):
        assert np.abs(s[:, 0, 1] - s[:, 1, 0]).max() < 1e-10


def test_extraction_reproduces_measurements(rng):
    freqs = np.linspace(1e9, 9e9, 40)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.radians(rng.uniform(20, 160, size=len(freqs)))
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    eb = cal.extract_error_box(standards)
    for i in range(len(freqs)):
        got = _reconstruct_line(eb.t_x[i], theta[i])
        want = nw.t_from_s(nw.TwoPortS(standards.s_line[i], 50.0)).t
        assert np.abs(got - want).max() < 1e-10


def test_end_to_end_roundtrip(rng):
    freqs = np.sort(rng.uniform(1e9, 1e10, size=50))
    t_x = _random_error_boxes(rng, freqs)
    theta = np.radians(rng.uniform(20, 160, size=len(freqs)))
    s_dut = np.array([random_passive(rng, min_s21=0.05) for _ in freqs])
    standards, s_test = cal.synth_cal_data(freqs, t_x, theta, s_dut)
    eb = cal.extract_error_box(standards)
    recovered = cal.deembed(freqs, s_test, eb)
    assert np.abs(recovered - s_dut).max() < 1e-8


def test_roundtrip_with_ideal_through_dut(rng):
    freqs = np.linspace(2e9, 6e9, 15)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.full(len(freqs), math.radians(80.0))
    thru = np.broadcast_to(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
                           (len(freqs), 2, 2)).copy()
    standards, s_test = cal.synth_cal_data(freqs, t_x, theta, thru)
    recovered = cal.deembed(freqs, s_test, cal.extract_error_box(standards))
    assert np.abs(recovered - thru).max() < 1e-8


def test_identity_fixture_deembed_is_identity_map(rng):
    freqs = np.linspace(2e9, 6e9, 5)
    eb = cal.ErrorBox(freqs, np.broadcast_to(np.eye(2, dtype=complex), (5, 2, 2)).copy())
    s_test = np.array([random_passive(rng, min_s21=0.1) for _ in freqs])
    out = cal.deembed(freqs, s_test, eb)
    assert np.abs(out - s_test).max() < 1e-12


def test_deembed_scale_invariance(rng):
    freqs = np.linspace(1e9, 9e9, 20)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.radians(rng.uniform(30, 150, size=len(freqs)))
    s_dut = np.array([random_passive(rng, min_s21=0.05) for _ in freqs])
    _, s_test = cal.synth_cal_data(freqs, t_x, theta, s_dut)
    eb = cal.ErrorBox(freqs, t_x)
    scales = rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs))
    eb_scaled = cal.ErrorBox(freqs, t_x * scales[:, None, None])
    a = cal.deembed(freqs, s_test, eb)
    b = cal.deembed(freqs, s_test, eb_scaled)
    assert np.abs(a - b).max() < 1e-10
    assert np.abs(a - s_dut).max() < 1e-10


def test_recovered_line_phase_matches_nominal(rng):
    freqs = np.linspace(1e9, 9e9, 30)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.radians(rng.uniform(20, 160, size=len(freqs)))
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    eb = cal.extract_error_box(standards)
    for i in range(len(freqs)):
        t_line = nw.t_from_s(nw.TwoPortS(standards.s_line[i], 50.0)).t
        t_thru = nw.t_from_s(nw.TwoPortS(standards.s_through[i], 50.0)).t
        t_l = np.linalg.inv(eb.t_x[i]) @ t_line @ np.linalg.inv(t_thru) @ eb.t_x[i]
        assert abs(t_l[0, 0] - np.exp(1j * theta[i])) < 1e-9
        assert abs(t_l[1, 1] - np.exp(-1j * theta[i])) < 1e-9


@pytest.mark.parametrize("theta_deg", [180.0, 0.02, 359.99, 180.0 + 0.02])
def test_degenerate_line_raises(rng, theta_deg):
    # anything within ~1e-3 rad of a multiple of pi must refuse
    freqs = np.linspace(1e9, 2e9, 3)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.full(3, math.radians(theta_deg))
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    with pytest.raises(CalibrationDegenerateError) as err:
        cal.extract_error_box(standards)
    assert "1e+09" in str(err.value) or "1e+09" in f"{err.value.freq_hz:g}"


def test_just_outside_degeneracy_band_is_accepted(rng):
    freqs = np.linspace(1e9, 2e9, 3)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.full(3, math.pi - 2e-3)   # |sin| ~ 2e-3 > 1e-3
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    cal.extract_error_box(standards)


def test_nontransmitting_points_dropped_with_warning(rng):
    freqs = np.linspace(1e9, 3e9, 5)
    t_x = _random_error_boxes(rng, freqs)
    theta = np.full(5, 1.2)
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    s_through = standards.s_through.copy()
    s_through[2] = np.eye(2)   # kill transmission at one frequency
    broken = cal.CalStandardSet(freqs, s_through, standards.s_line, theta)
    with pytest.warns(UserWarning, match="no transmission"):
        eb = cal.extract_error_box(broken)
    assert len(eb.freq_hz) == 4
    assert not np.any(np.isclose(eb.freq_hz, freqs[2]))


def test_deembed_alignment_error(rng):
    freqs = np.linspace(1e9, 2e9, 4)
    eb = cal.ErrorBox(freqs, _random_error_boxes(rng, freqs))
    s_test = np.array([random_passive(rng, min_s21=0.1) for _ in freqs])
    with pytest.raises(FrequencyAlignmentError):
        cal.deembed(freqs * 1.001, s_test, eb)
    with pytest.raises(FrequencyAlignmentError):
        cal.deembed(freqs[:-1], s_test[:-1], eb)


def test_error_box_phase_anchor():
    # lowest-frequency transmission phase lands inside (-90, 90) degrees
    freqs = np.linspace(1e9, 5e9, 9)
    t_x = np.array([
        nw.line_t(2.8 * f / freqs[0], 65.0, 50.0).t for f in freqs
    ])
    theta = np.full(len(freqs), 1.3)
    standards, _ = cal.synth_cal_data(freqs, t_x, theta)
    eb = cal.extract_error_box(standards)
    first = 1.0 / eb.t_x[0][0, 0]
    assert abs(np.angle(first)) < math.pi / 2
    # and neighbors never jump by more than 90 degrees
    angles = np.angle(1.0 / eb.t_x[:, 0, 0])
    steps = np.angle(np.exp(1j * np.diff(angles)))
    assert np.abs(steps).max() <= math.pi / 2 + 1e-9
