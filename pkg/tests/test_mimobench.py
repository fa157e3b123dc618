import math

import numpy as np
import pytest

from adkit.mimobench import (
    ChannelModelSpec,
    EstimatorMethod,
    channel,
    effective_throughput,
    estimate,
    pilot_observations,
    pilot_overhead,
    pilots_per_user,
    run_realization,
    spatial_correlation,
)
from adkit.signals import rng_for, steering_vector


def test_channel_normalization():
    spec = ChannelModelSpec.preset("rich_scatter")
    rng = rng_for(1, 0)
    norms = [np.linalg.norm(channel(spec, 32, rng)) ** 2 / 32 for _ in range(500)]
    assert abs(np.mean(norms) - 1.0) < 0.05


def test_los_dominant_more_concentrated():
    # narrow angular spread: LOS channels align far better with a single
    # steering vector than rich-scatter channels do
    rich = ChannelModelSpec.preset("rich_scatter")
    los = ChannelModelSpec.preset("los_dominant")
    grid = np.linspace(-89, 89, 357)
    steer = np.stack([steering_vector(t, 16) for t in grid])
    out = {}
    for name, spec in (("rich", rich), ("los", los)):
        rng = rng_for(2, 1)
        aligns = []
        for _ in range(200):
            h = channel(spec, 16, rng)
            aligns.append(np.max(np.abs(steer.conj() @ h) ** 2) / (16 * np.linalg.norm(h) ** 2))
        out[name] = np.mean(aligns)
    assert out["los"] > out["rich"]


def test_rician_limit_single_steering():
    spec = ChannelModelSpec(label="los_dominant", azimuth_spread_deg=8.0, rician_k_db=60.0)
    rng = rng_for(3, 0)
    h = channel(spec, 16, rng)
    # nearly proportional to one steering vector: dominant alignment
    grid = np.linspace(-60, 60, 481)
    best = max(abs(np.vdot(steering_vector(t, 16), h)) ** 2 / (16 * np.linalg.norm(h) ** 2) for t in grid)
    assert best > 0.95


def test_overhead_bookkeeping():
    assert pilot_overhead(EstimatorMethod.LS, 64, 4) == pytest.approx(64 / 168)
    assert pilot_overhead(EstimatorMethod.AD, 64, 4) == pytest.approx(4 / 168)
    assert pilots_per_user(EstimatorMethod.MMSE, 10, 4) == 3  # non-divisible rounds up
    assert pilot_overhead(EstimatorMethod.MMSE, 10, 4) == pytest.approx(12 / 168)


def test_mmse_beats_ls_mse():
    spec = ChannelModelSpec.preset("moderate")
    m, k, power = 16, 4, 10.0
    prior = spatial_correlation(spec, m, seed=5, draws=400)
    rng = rng_for(5, 1)
    ls_err, mmse_err = 0.0, 0.0
    for _ in range(200):
        h = channel(spec, m, rng)
        obs = pilot_observations(h, power, pilots_per_user(EstimatorMethod.LS, m, k), rng)
        ls = estimate(EstimatorMethod.LS, obs, power, m, k)
        mm = estimate(EstimatorMethod.MMSE, obs, power, m, k, prior)
        ls_err += np.linalg.norm(ls - h) ** 2
        mmse_err += np.linalg.norm(mm - h) ** 2
    assert mmse_err <= ls_err


def test_ad_direction_noise_free_single_path():
    # the circulant average has DFT eigenvectors, so exact alignment needs an
    # on-grid path; sin(theta) = 2k/M puts the steering on bin k
    m = 32
    theta = np.rad2deg(np.arcsin(2 * 4 / m))
    h = steering_vector(theta, m)
    est = estimate(EstimatorMethod.AD, (np.sqrt(100.0) * h)[None, :], 100.0, m, 4)
    align = abs(np.vdot(est, h)) / (np.linalg.norm(est) * np.linalg.norm(h))
    assert align > 0.99
    # and the magnitude scaling recovers the channel scale
    assert np.linalg.norm(est) == pytest.approx(np.linalg.norm(h), rel=0.05)


def test_single_user_perfect_estimate_se():
    m, snr_db = 16, 10.0
    h = steering_vector(5.0, m)[None, :]
    rep = effective_throughput(h.copy(), h, EstimatorMethod.AD, snr_db)
    expected = math.log2(1 + m * 10.0 ** (snr_db / 10.0))
    assert rep.sum_se == pytest.approx(expected, rel=1e-9)
    assert rep.effective == pytest.approx((1 - 1 / 168) * expected, rel=1e-9)
    assert rep.effective <= rep.sum_se


def test_run_realization_reports_all_methods():
    spec = ChannelModelSpec.preset("los_dominant")
    prior = spatial_correlation(spec, 16, seed=7, draws=200)
    reps = run_realization(spec, 16, 4, 15.0, seed=7, trial=0, prior=prior)
    assert set(reps) == {"ls", "mmse", "ad"}
    for rep in reps.values():
        assert rep.effective >= 0 and rep.effective <= rep.sum_se
