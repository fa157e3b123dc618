import numpy as np
import pytest

from adkit.doa import (
    Pseudospectrum,
    cg_music,
    covariance_music,
    resolved_angles,
    shift_orbit_estimate,
    steering,
)
from adkit.estimators import EstimatorError, Observation
from adkit.groups import build_group
from adkit.signals import UlaSpec, cn_samples, rng_for, steering_vector, ula_snapshot


def test_steering_examples():
    assert np.allclose(steering(0.0, 6), np.ones(6))
    a = steering(25.0, 12)
    assert np.linalg.norm(a) ** 2 == pytest.approx(12.0)
    # on-grid angle equals a DFT column: sin(theta)*spacing*M integer
    m, k = 8, 2
    theta = np.rad2deg(np.arcsin(k / (0.5 * m)))
    a = steering(theta, m)
    col = np.exp(2j * np.pi * k * np.arange(m) / m)
    assert np.max(np.abs(a - col)) < 1e-10
    with pytest.raises(ValueError):
        steering(90.0, 8)


def test_single_source_noise_free_exact_peak():
    m, theta = 12, 33.3
    x = Observation(steering_vector(theta, m))
    ps = cg_music(x, k=1)
    assert abs(ps.peaks[0][0] - theta) <= 0.1
    ps_cov = covariance_music(x, k=1)
    assert abs(ps_cov.peaks[0][0] - theta) <= 0.1


def test_two_source_resolution_and_baseline_failure():
    x = ula_snapshot(UlaSpec(M=10, angles=[25.0, 50.0], snr_db=55.0), seed=4, trial=0)
    ps = cg_music(x, k=2)
    assert resolved_angles(ps, [25.0, 50.0], tol_deg=0.5)
    ps_cov = covariance_music(x, k=2)
    assert not resolved_angles(ps_cov, [25.0, 50.0], tol_deg=0.5)


def test_cyclic_group_average_pins_peaks_to_bins():
    # spec-literal path: the circulant estimate has DFT eigenvectors, so the
    # pseudospectrum peaks quantize to bin angles
    x = ula_snapshot(UlaSpec(M=10, angles=[25.0, 50.0], snr_db=55.0), seed=4, trial=0)
    ps = cg_music(x, group=build_group("cyclic", 10), k=2)
    bins = sorted(np.rad2deg(np.arcsin(np.array([2, 4]) / 5.0)))
    found = sorted(a for a, _ in ps.peaks)
    assert np.max(np.abs(np.array(found) - np.array(bins))) < 1.0


def test_pseudospectrum_phase_invariance():
    x = ula_snapshot(UlaSpec(M=10, angles=[40.0], snr_db=20.0), seed=7, trial=1)
    ps1 = cg_music(x, k=1)
    ps2 = cg_music(Observation(np.exp(1.3j) * x.data), k=1)
    assert np.max(np.abs(ps1.values - ps2.values)) <= 1e-6 * np.max(ps1.values)


def test_covariance_music_rejects_k_equal_m():
    x = Observation(cn_samples(rng_for(1, 5), 5))
    with pytest.raises(EstimatorError):
        covariance_music(x, k=5)


def test_shift_orbit_estimate_modes():
    x = Observation(cn_samples(rng_for(2, 6), 6))
    toep = shift_orbit_estimate(x, mode="toeplitz").matrix
    # Toeplitz structure: constant along diagonals
    for lag in range(1, 6):
        d = np.diag(toep, -lag)
        assert np.max(np.abs(d - d[0])) < 1e-12
    circ = shift_orbit_estimate(x, mode="cyclic").matrix
    for i in range(1, 6):
        assert np.allclose(circ[i], np.roll(circ[0], i), atol=1e-12)
    ap = shift_orbit_estimate(x, mode="aperture")
    assert ap.M == 5  # default subaperture M-1
    with pytest.raises(ValueError):
        shift_orbit_estimate(x, mode="bogus")


def test_peak_separation_rule():
    grid = np.arange(-90.0, 90.01, 0.1)
    values = np.ones_like(grid)
    center = np.argmin(np.abs(grid - 10.0))
    values[center - 3: center + 4] += np.array([1, 2, 3, 4, 3, 2, 1.0])
    values[center + 5] += 3.0  # shoulder within 1 degree: suppressed
    ps = Pseudospectrum(grid, values, [])
    from adkit.doa import _extract_peaks

    peaks = _extract_peaks(grid, values, 2)
    assert len([p for p in peaks if abs(p[0] - 10.0) < 1.0]) == 1
