import numpy as np
import pytest

from adkit.estimators import Observation
from adkit.groups import build_group
from adkit.matching import (
    MatchingError,
    WaveformLabel,
    adapted_group,
    classify_waveform,
    estimate_chirp_rate,
    match_library,
    no_structure_test,
    psi_sweep,
)
from adkit.metrics import dft_basis
from adkit.signals import WaveformSpec, cn_samples, rng_for, waveform


def test_noiseless_chirp_psi_one_at_truth():
    x = waveform(WaveformSpec("chirp", M=31, snr_db=800.0, mu=0.5, f0=0.15), seed=1)
    mu_hat, psi_star, grid, curve = estimate_chirp_rate(x)
    assert abs(mu_hat - 0.5) <= 0.01
    assert abs(psi_star - 1.0) <= 1e-10
    # strictly above every grid point at least 0.05 away from the truth
    away = np.abs(grid - 0.5) >= 0.05
    assert psi_star > np.max(curve[away])


def test_psi_curve_invariant_to_phase_and_scale():
    x = waveform(WaveformSpec("chirp", M=31, snr_db=10.0, mu=0.7), seed=3)
    grid = np.linspace(-1, 1, 41)
    base = psi_sweep(x, grid)
    scaled = psi_sweep(Observation(3.5 * np.exp(0.7j) * x.data), grid)
    assert np.max(np.abs(base - scaled)) < 1e-12


def test_adapted_group_matches_sweep():
    from adkit.estimators import group_averaged
    from adkit.metrics import spectral_concentration

    x = waveform(WaveformSpec("chirp", M=16, snr_db=20.0, mu=0.3), seed=5)
    g = adapted_group(16, 0.3)
    psi_direct = spectral_concentration(group_averaged(x, g))
    psi_fast = float(psi_sweep(x, np.array([0.3]))[0])
    assert psi_direct == pytest.approx(psi_fast, rel=1e-10)


def test_classifier_noiseless_cases():
    tone = waveform(WaveformSpec("tone", M=31, snr_db=300.0, f0=0.15), seed=2)
    c = classify_waveform(tone)
    assert c.label == WaveformLabel.TONE and abs(c.mu_hat) < 0.1
    chirp = waveform(WaveformSpec("chirp", M=31, snr_db=300.0, mu=0.5, f0=0.15), seed=2)
    assert classify_waveform(chirp).label == WaveformLabel.CHIRP
    two = waveform(WaveformSpec("two_tone", M=31, snr_db=300.0), seed=2)
    assert classify_waveform(two).label == WaveformLabel.MULTI_TONE
    with pytest.raises(MatchingError):
        classify_waveform(Observation(np.ones(4)))


def test_classifier_lambda_ratio_refinement():
    tone = waveform(WaveformSpec("tone", M=31, snr_db=20.0, f0=0.15), seed=4)
    c = classify_waveform(tone, use_lambda_ratio=True)
    assert c.label == WaveformLabel.TONE and c.lambda_ratio >= 2.0
    two = waveform(WaveformSpec("two_tone", M=31, snr_db=20.0), seed=4)
    c2 = classify_waveform(two, use_lambda_ratio=True)
    assert c2.label == WaveformLabel.MULTI_TONE and c2.lambda_ratio < 2.0


def test_tone_mu_hat_small_at_10db():
    vals = []
    for t in range(100):
        x = waveform(WaveformSpec("tone", M=31, snr_db=10.0, f0=0.15), seed=6, trial=t)
        vals.append(abs(estimate_chirp_rate(x)[0]))
    assert np.mean(vals) <= 0.05


def test_match_library_single_group_and_ranking():
    m = 8
    z8 = build_group("cyclic", m)
    x = Observation(cn_samples(rng_for(1, m), m))
    res = match_library(x, [("Z8", z8)])
    assert res[0].rank == 1 and res[0].group_id == "Z8"
    with pytest.raises(MatchingError):
        match_library(x, [])


def test_match_library_monte_carlo_ranking():
    m = 8
    catalog = [("Z8", build_group("cyclic", m)),
               ("Z2^3", build_group("direct_product", m, params=(2, 2, 2))),
               ("Z4xZ2", build_group("direct_product", m, params=(4, 2)))]
    f8 = dft_basis(m)
    spec = np.array([0.2, 6.0, 3.0, 0.2, 0.1, 0.1, 0.1, 0.2])
    wins = 0
    trials = 200
    for t in range(trials):
        rng = rng_for(21, t)
        s = f8.conj().T @ (np.sqrt(spec) * cn_samples(rng, m))
        sigma2 = (np.real(np.vdot(s, s)) / m) / 100.0  # 20 dB
        x = Observation(s + np.sqrt(sigma2) * cn_samples(rng, m))
        wins += match_library(x, catalog)[0].group_id == "Z8"
    assert wins / trials >= 0.90


def test_orbit_bias_warning_flag():
    m = 6
    full = build_group("cyclic", m)
    sub = build_group("direct_product", m, params=(2, 3))
    from adkit.groups import Permutation, closure

    partial = closure([Permutation.swap(m, 0, 1)])  # orbits (1,1,1,1,2)
    x = Observation(cn_samples(rng_for(2, m), m))
    assert not match_library(x, [("a", full), ("b", sub)])[0].orbit_bias_warning
    assert match_library(x, [("a", full), ("c", partial)])[0].orbit_bias_warning


def test_classifier_accuracy_monotone_in_snr():
    # statistical check: per-class accuracy non-decreasing over the SNR grid,
    # allowing two noise-driven violations across the whole grid
    from adkit.experiments import WAVEFORM_LABELS

    snrs = [2.0, 6.0, 10.0, 14.0]
    violations = 0
    for kind, label in WAVEFORM_LABELS.items():
        accs = []
        for snr in snrs:
            hits = 0
            for t in range(100):
                spec = WaveformSpec(kind, M=31, snr_db=snr, mu=(0.5 if kind == "chirp" else 0.0))
                hits += classify_waveform(waveform(spec, seed=13, trial=t)).label == label
            accs.append(hits / 100)
        violations += sum(1 for a, b in zip(accs, accs[1:]) if b < a - 0.02)
    assert violations <= 2


def test_no_structure_test():
    m = 16
    catalog = [("Z16", build_group("cyclic", m)),
               ("Z4xZ4", build_group("direct_product", m, params=(4, 4)))]
    # strong on-grid tone: obviously structured
    tone = waveform(WaveformSpec("tone", M=m, snr_db=20.0, f0=0.25), seed=1)
    assert not no_structure_test(tone, catalog, epsilon=0.25)
    # white noise: true in >= 90% of trials at the calibrated epsilon
    hits = 0
    trials = 200
    for t in range(trials):
        x = Observation(cn_samples(rng_for(9, t), m))
        hits += no_structure_test(x, catalog, epsilon=0.30)
    assert hits / trials >= 0.90
    with pytest.raises(MatchingError):
        no_structure_test(tone, [("trivial", build_group("trivial", m))], epsilon=0.1)
    with pytest.raises(MatchingError):
        no_structure_test(tone, catalog, epsilon=0.0)
