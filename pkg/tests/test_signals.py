import numpy as np
import pytest

from adkit.estimators import Observation
from adkit.metrics import coloring_index, dft_basis
from adkit.signals import (
    GraphSignalSpec,
    SignalError,
    UlaSpec,
    WaveformSpec,
    ar1_circulant_cov,
    ar1_cov,
    colored_noise,
    colored_noise_batch,
    dechirp,
    filter_matrix,
    graph_signal,
    rng_for,
    steering_vector,
    tone,
    ula_snapshot,
    waveform,
)


def test_steering_at_zero_is_all_ones():
    assert np.allclose(steering_vector(0.0, 8), np.ones(8))
    assert np.linalg.norm(steering_vector(37.0, 8)) ** 2 == pytest.approx(8.0)


def test_ula_snapshot_snr_realized_over_draws():
    spec = UlaSpec(M=16, angles=[20.0], snr_db=7.0)
    a = steering_vector(20.0, 16)
    sig_p, noise_p = 0.0, 0.0
    draws = 2000
    for t in range(draws):
        x = ula_snapshot(spec, seed=3, trial=t)
        rng = rng_for(3, t)
        s = np.exp(2j * np.pi * rng.random(1))[0] * a
        n = x.data - s
        sig_p += np.real(np.vdot(s, s))
        noise_p += np.real(np.vdot(n, n))
    assert 10 * np.log10(sig_p / noise_p) == pytest.approx(7.0, abs=0.1)


def test_ula_reproducible_and_angle_validation():
    a = ula_snapshot(UlaSpec(M=8, angles=[10.0], snr_db=5.0), seed=1, trial=2)
    b = ula_snapshot(UlaSpec(M=8, angles=[10.0], snr_db=5.0), seed=1, trial=2)
    assert np.array_equal(a.data, b.data)
    with pytest.raises(SignalError):
        UlaSpec(M=8, angles=[95.0], snr_db=5.0)


def test_chirp_mu_zero_is_tone():
    a = waveform(WaveformSpec("chirp", M=16, snr_db=300.0, mu=0.0, f0=0.25), seed=2)
    b = waveform(WaveformSpec("tone", M=16, snr_db=300.0, f0=0.25), seed=2)
    assert np.max(np.abs(a.data - b.data)) < 1e-6


def test_dechirp_cancels_quadratic_phase():
    m, mu, f0 = 31, 0.5, 0.15
    s = waveform(WaveformSpec("chirp", M=m, snr_db=800.0, mu=mu, f0=f0), seed=1).data
    u = dechirp(mu, m)
    t = tone(m, f0)
    assert np.max(np.abs(u @ s - t)) < 1e-10
    assert np.linalg.norm(u @ u.conj().T - np.eye(m)) < 1e-14
    assert np.allclose(dechirp(0.0, m), np.eye(m))


def test_waveform_snr_and_classes():
    for kind in ("tone", "chirp", "two_tone", "noise_like"):
        x = waveform(WaveformSpec(kind, M=31, snr_db=10.0, mu=0.4), seed=7, trial=3)
        assert x.M == 31 and np.all(np.isfinite(x.data))
    with pytest.raises(SignalError):
        WaveformSpec("chirp", M=16, snr_db=0.0, mu=2.5)
    with pytest.raises(SignalError):
        WaveformSpec("tone", M=16, snr_db=0.0, f0=1.2)


def test_two_tone_distinct_bins_required():
    with pytest.raises(SignalError):
        waveform(WaveformSpec("two_tone", M=16, snr_db=10.0, f0=0.25, f1=0.26), seed=0)


def test_noise_like_is_bandlimited():
    x = waveform(WaveformSpec("noise_like", M=32, snr_db=300.0), seed=5).data
    spec = np.abs(np.fft.fft(x)) ** 2
    upper = spec[(32 + 1) // 2:]
    assert upper.sum() <= 1e-12 * spec.sum()


def test_ar1_cov_examples():
    assert np.allclose(ar1_cov(0.0, 5), np.eye(5))
    q = ar1_cov(0.7, 8)
    assert np.allclose(q, q.T) and q.min() >= 0 and q.max() <= 1
    assert np.linalg.eigvalsh(q).min() > 0
    with pytest.raises(SignalError):
        ar1_cov(1.0, 4)
    qc = ar1_circulant_cov(0.7, 8)
    f = dft_basis(8)
    d = f @ qc @ f.conj().T
    off = d - np.diag(np.diag(d))
    assert np.linalg.norm(off) < 1e-12


def test_colored_noise_variances():
    q = np.diag([4.0, 1.0])
    draws = colored_noise_batch(q, seed=9, count=10_000)
    var = np.mean(np.abs(draws) ** 2, axis=0)
    assert abs(var[0] / 4.0 - 1) < 0.05 and abs(var[1] - 1.0) < 0.05
    x = colored_noise(np.eye(3), seed=1)
    assert x.M == 3
    with pytest.raises(SignalError):
        colored_noise(np.diag([1.0, -0.5]), seed=0)


def test_colored_noise_circulant_spectrum():
    spec = np.array([3.0, 1.0, 0.5, 2.0])
    f = dft_basis(4)
    q = f.conj().T @ np.diag(spec) @ f
    draws = colored_noise_batch(q, seed=4, count=10_000)
    coeffs = draws @ f.T  # rows transformed by T = F (analysis)
    var = np.mean(np.abs(coeffs) ** 2, axis=0)
    assert np.max(np.abs(var / spec - 1)) < 0.08


def test_graph_signal_covariance_matches_filter():
    a = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    taps = [0.5, 1.0]
    h = filter_matrix(a, taps)
    target = h @ h.conj().T
    draws = np.stack([graph_signal(GraphSignalSpec(a, taps, snr_db=300.0), seed=6, trial=t).data
                      for t in range(5000)])
    emp = draws.T @ draws.conj() / len(draws)
    scale = np.linalg.norm(target)
    assert np.linalg.norm(emp - target) / scale < 0.08
    with pytest.raises(SignalError):
        GraphSignalSpec(a, [0.0], snr_db=10.0)
