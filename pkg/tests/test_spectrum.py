import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ferromu import (
    FeatureAbsentError,
    FrequencyGrid,
    ImpedanceSweep,
    InductanceSpectrum,
    NumericalError,
    despike_median3,
    find_zero_crossing,
    phase_of,
    sweep,
    to_inductance,
)

# Frozen from a 1e4-point dense forward sweep (see test_acceptance for the
# live oracle): zero-crossing frequency of the bench sensor at 0.8 mm.
ZCF_DP800_08MM_HZ = 6044.1312


@pytest.fixture(scope="module")
def dp800_spec(bench_geometry, dp800, bench_grid):
    return sweep(bench_geometry, dp800, bench_grid)


def _spectrum(freqs, values):
    return InductanceSpectrum(FrequencyGrid(tuple(freqs)), np.asarray(values, complex))


class TestToInductance:
    def test_identity_sweep_gives_zero(self):
        grid = FrequencyGrid((100.0, 1000.0))
        z = np.array([1 + 2j, 3 + 4j])
        spec = to_inductance(ImpedanceSweep(grid, z, z))
        assert np.all(spec.values == 0)

    def test_pure_inductive_offset(self):
        grid = FrequencyGrid((1000.0,))
        omega = 2 * math.pi * 1000.0
        z_air = np.array([5 + 7j])
        z = z_air + 1j * omega * 3e-6
        spec = to_inductance(ImpedanceSweep(grid, z, z_air))
        assert spec.values[0] == pytest.approx(3e-6, rel=1e-15)
        assert abs(spec.values[0].imag) < 1e-21

    def test_round_trip_pure_inverse_pair(self, dp800_spec):
        omega = dp800_spec.grid.angular()
        z_air = np.zeros(len(omega), complex)
        z = z_air + 1j * omega * dp800_spec.values
        back = to_inductance(ImpedanceSweep(dp800_spec.grid, z, z_air))
        assert np.allclose(back.values, dp800_spec.values, rtol=1e-15, atol=0)

    def test_round_trip_with_air_background(self, dp800_spec):
        # an O(1) air impedance costs a few digits to cancellation at the
        # low-frequency end; the recovered spectrum is still 1e-12 clean
        omega = dp800_spec.grid.angular()
        z_air = np.full(len(omega), 2.0 + 1.0j)
        z = z_air + 1j * omega * dp800_spec.values
        back = to_inductance(ImpedanceSweep(dp800_spec.grid, z, z_air))
        assert np.allclose(back.values, dp800_spec.values, rtol=1e-12, atol=0)


class TestPhaseConvention:
    def test_ninety_degrees_at_pure_negative_imaginary(self):
        spec = _spectrum([100.0], [0 - 1e-6j])
        assert phase_of(spec).theta_deg[0] == 90.0

    def test_first_quadrant_value(self):
        spec = _spectrum([100.0], [1e-6 - 1e-6j])
        assert phase_of(spec).theta_deg[0] == pytest.approx(135.0, abs=1e-12)

    def test_past_crossing_value(self):
        spec = _spectrum([100.0], [-1e-6 - 1e-6j])
        assert phase_of(spec).theta_deg[0] == pytest.approx(45.0, abs=1e-12)

    def test_zero_magnitude_is_an_error(self):
        spec = _spectrum([100.0, 200.0], [1e-6 - 1e-6j, 0.0])
        with pytest.raises(NumericalError, match="200"):
            phase_of(spec)

    @settings(max_examples=120, deadline=None)
    @given(scale=st.floats(1e-6, 1e6))
    def test_invariant_under_positive_scaling(self, scale):
        values = np.array([2e-6 - 1e-7j, 1e-7 - 2e-6j, -1e-6 - 1e-6j])
        spec = _spectrum([10.0, 20.0, 30.0], values)
        scaled = _spectrum([10.0, 20.0, 30.0], scale * values)
        assert np.allclose(
            phase_of(spec).theta_deg, phase_of(scaled).theta_deg, rtol=0, atol=1e-9
        )

    def test_monotone_decreasing_on_synthetic(self, dp800_spec):
        theta = phase_of(dp800_spec).theta_deg
        assert np.all(np.diff(theta) < 0)
        assert 0.0 < theta[-1] < theta[0] < 180.0

    def test_ninety_degrees_at_interpolated_crossing(self, dp800_spec):
        crossing = find_zero_crossing(dp800_spec)
        f = dp800_spec.grid.as_array()
        theta = phase_of(dp800_spec).theta_deg
        f_z = crossing.omega1 / (2 * math.pi)
        theta_at = np.interp(math.log(f_z), np.log(f), theta)
        assert theta_at == pytest.approx(90.0, abs=0.5)


class TestZeroCrossing:
    def test_interpolation_rule(self):
        spec = _spectrum([1000.0, 1100.0], [2e-6 - 1e-6j, -1e-6 - 1e-6j])
        crossing = find_zero_crossing(spec)
        expected = math.exp(math.log(1000.0) + (2.0 / 3.0) * math.log(1.1))
        assert crossing.omega1 / (2 * math.pi) == pytest.approx(expected, rel=1e-12)
        assert crossing.bracket == (1000.0, 1100.0)
        assert crossing.crossings == 1
        assert expected == pytest.approx(1065.6, abs=0.05)

    def test_no_crossing_all_positive(self):
        spec = _spectrum([10.0, 20.0], [1e-6 - 1e-6j, 2e-6 - 1e-6j])
        with pytest.raises(FeatureAbsentError):
            find_zero_crossing(spec)

    def test_no_crossing_all_negative(self):
        spec = _spectrum([10.0, 20.0], [-1e-6 - 1e-6j, -2e-6 - 1e-6j])
        with pytest.raises(FeatureAbsentError):
            find_zero_crossing(spec)

    def test_multiple_crossings_uses_first_and_reports(self):
        spec = _spectrum(
            [10.0, 20.0, 30.0, 40.0],
            [1e-6 - 1j * 1e-6, -1e-6 - 1j * 1e-6, 1e-6 - 1j * 1e-6, -1e-6 - 1j * 1e-6],
        )
        crossing = find_zero_crossing(spec)
        assert crossing.crossings == 3
        assert crossing.bracket == (10.0, 20.0)

    @settings(max_examples=80, deadline=None)
    @given(scale=st.floats(1e-6, 1e6))
    def test_invariant_under_positive_scaling(self, scale):
        values = np.array([3e-6 - 1e-6j, 1e-6 - 2e-6j, -2e-6 - 1e-6j])
        spec = _spectrum([10.0, 20.0, 40.0], values)
        scaled = _spectrum([10.0, 20.0, 40.0], scale * values)
        a = find_zero_crossing(spec)
        b = find_zero_crossing(scaled)
        assert b.omega1 == pytest.approx(a.omega1, rel=1e-12)
        assert b.bracket == a.bracket

    def test_frozen_bench_value(self, dp800_spec):
        crossing = find_zero_crossing(dp800_spec)
        assert crossing.omega1 / (2 * math.pi) == pytest.approx(
            ZCF_DP800_08MM_HZ, rel=1e-6
        )

    def test_decreases_with_liftoff(self, bench_geometry, dp800, bench_grid):
        near = find_zero_crossing(sweep(bench_geometry, dp800, bench_grid))
        far = find_zero_crossing(
            sweep(bench_geometry.with_lift_off(3.8e-3), dp800, bench_grid)
        )
        assert far.omega1 < near.omega1


class TestDespike:
    def test_removes_isolated_spike(self):
        freqs = [10.0, 20.0, 30.0, 40.0, 50.0]
        clean = np.array([1.0, 0.9, 0.8, 0.7, 0.6]) * (1 - 1j) * 1e-6
        spiked = clean.copy()
        spiked[2] = 50e-6 - 50e-6j
        out = despike_median3(_spectrum(freqs, spiked))
        assert out.values[2] == pytest.approx(clean[2], rel=0.3)
        # endpoints pass through untouched
        assert out.values[0] == spiked[0]
        assert out.values[-1] == spiked[-1]

    def test_short_spectrum_passthrough(self):
        spec = _spectrum([10.0, 20.0], [1e-6 - 1e-6j, 2e-6 - 1e-6j])
        out = despike_median3(spec)
        assert np.array_equal(out.values, spec.values)

    def test_smooth_data_nearly_unchanged(self, dp800_spec):
        out = despike_median3(dp800_spec)
        # monotone stretches pass through; only the Im turning point can move,
        # and only by the gap to its neighbour
        assert np.allclose(out.values, dp800_spec.values, rtol=1e-3, atol=0)
        changed = np.nonzero(out.values != dp800_spec.values)[0]
        assert changed.size <= 2
