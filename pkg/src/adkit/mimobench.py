"""Simplified clustered-channel massive-MIMO benchmark.

Compares LS, MMSE, and algebraic-diversity (single-pilot) channel
estimation by effective throughput under MRT beamforming. The channel is a
simplified clustered-ray model (equal-power clusters, Laplacian ray
offsets); the point is the pilot-overhead trend, not 3GPP tap fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .estimators import Observation, group_averaged
from .groups import GroupKind, GroupRep, build_group
from .signals import cn_samples, rng_for, steering_vector

RESOURCE_ELEMENTS = 168  # 14 OFDM symbols x 12 subcarriers per slot


class ChannelModel(str, Enum):
    RICH_SCATTER = "rich_scatter"
    MODERATE = "moderate"
    LOS_DOMINANT = "los_dominant"


_MODEL_PRESETS = {
    ChannelModel.RICH_SCATTER: dict(azimuth_spread_deg=53.0, rician_k_db=None),
    ChannelModel.MODERATE: dict(azimuth_spread_deg=34.0, rician_k_db=None),
    ChannelModel.LOS_DOMINANT: dict(azimuth_spread_deg=8.0, rician_k_db=13.3),
}


class EstimatorMethod(str, Enum):
    LS = "ls"
    MMSE = "mmse"
    AD = "ad"


@dataclass(frozen=True)
class ChannelModelSpec:
    """Clustered channel: spread, optional Rician K-factor, cluster counts."""

    label: ChannelModel
    azimuth_spread_deg: float
    rician_k_db: Optional[float]
    clusters: int = 6
    rays_per_cluster: int = 10

    @staticmethod
    def preset(label) -> "ChannelModelSpec":
        label = ChannelModel(label)
        p = _MODEL_PRESETS[label]
        return ChannelModelSpec(label=label, **p)

    def __post_init__(self):
        if self.azimuth_spread_deg <= 0 or self.clusters < 1 or self.rays_per_cluster < 1:
            raise ValueError("invalid channel spec")


@dataclass
class ThroughputReport:
    method: EstimatorMethod
    M: int
    K_users: int
    pilot_overhead: float
    sum_se: float

    @property
    def effective(self) -> float:
        return (1.0 - self.pilot_overhead) * self.sum_se


def channel(spec: ChannelModelSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """One user channel: clustered rays, optional LOS term, E||h||^2 = M."""
    nc, nr = spec.clusters, spec.rays_per_cluster
    centers = rng.uniform(-60.0, 60.0, nc)
    # Laplacian angular offsets about each cluster center
    u = rng.uniform(-0.5, 0.5, (nc, nr))
    offsets = -spec.azimuth_spread_deg / np.sqrt(2.0) * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    gains = cn_samples(rng, (nc, nr)) / math.sqrt(nc * nr)
    h = np.zeros(m, dtype=complex)
    for c in range(nc):
        for r_ in range(nr):
            theta = float(np.clip(centers[c] + offsets[c, r_], -89.0, 89.0))
            h += gains[c, r_] * steering_vector(theta, m)
    if spec.rician_k_db is not None:
        k_lin = 10.0 ** (spec.rician_k_db / 10.0)
        theta_los = float(rng.uniform(-60.0, 60.0))
        los = steering_vector(theta_los, m)
        h = math.sqrt(k_lin / (k_lin + 1.0)) * los + math.sqrt(1.0 / (k_lin + 1.0)) * h
    return h * math.sqrt(m) / np.linalg.norm(h)


def spatial_correlation(spec: ChannelModelSpec, m: int, seed: int, draws: int = 1000) -> np.ndarray:
    """Monte Carlo spatial correlation R_h = E[h h^H] (the MMSE prior)."""
    rng = rng_for(seed, 0x12_41)
    r = np.zeros((m, m), dtype=complex)
    for _ in range(draws):
        h = channel(spec, m, rng)
        r += np.outer(h, h.conj())
    return r / draws


def pilot_observations(h: np.ndarray, power: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, M) noisy pilot receptions sqrt(P) h + n, unit noise variance."""
    m = h.size
    return math.sqrt(power) * h[None, :] + cn_samples(rng, (count, m))


def estimate(
    method: EstimatorMethod,
    observations: np.ndarray,
    power: float,
    m_antennas: int,
    k_users: int,
    prior: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Channel estimate per method.

    LS averages the pilots; MMSE applies the Wiener filter with the spatial
    correlation prior; AD takes the dominant eigenvector of the cyclic group
    average of a single pilot, scaled by the root dominant eigenvalue.
    """
    method = EstimatorMethod(method)
    obs = np.atleast_2d(observations)
    if method == EstimatorMethod.LS:
        return obs.mean(axis=0) / math.sqrt(power)
    if method == EstimatorMethod.MMSE:
        if prior is None:
            raise ValueError("MMSE requires the spatial correlation prior")
        ybar = obs.mean(axis=0) / math.sqrt(power)
        n_pilots = obs.shape[0]
        noise_var = 1.0 / (n_pilots * power)
        return prior @ np.linalg.solve(prior + noise_var * np.eye(m_antennas), ybar)
    y = Observation(obs[0])
    f = group_averaged(y, build_group(GroupKind.CYCLIC, m_antennas))
    u = f.eigenvectors[:, 0]
    # align the arbitrary eigenvector phase with the observation
    phase = np.vdot(u, y.data)
    u = u * (phase / abs(phase)) if abs(phase) > 0 else u
    return math.sqrt(max(f.eigenvalues[0], 0.0)) * u / math.sqrt(power)


def pilots_per_user(method: EstimatorMethod, m: int, k: int) -> int:
    if EstimatorMethod(method) == EstimatorMethod.AD:
        return 1
    return math.ceil(m / k)


def pilot_overhead(method: EstimatorMethod, m: int, k: int) -> float:
    """LS/MMSE spend M resource elements on pilots; AD spends K."""
    if EstimatorMethod(method) == EstimatorMethod.AD:
        return k / RESOURCE_ELEMENTS
    return pilots_per_user(method, m, k) * k / RESOURCE_ELEMENTS


def effective_throughput(
    estimates: np.ndarray,
    true_channels: np.ndarray,
    method: EstimatorMethod,
    snr_db: float,
) -> ThroughputReport:
    """Sum spectral efficiency under MRT, discounted by the pilot overhead."""
    k, m = true_channels.shape
    power = 10.0 ** (snr_db / 10.0)
    w = estimates / np.linalg.norm(estimates, axis=1, keepdims=True)
    cross = true_channels.conj() @ w.T  # cross[k, j] = h_k^H w_j
    gains = np.abs(cross) ** 2 * power
    sum_se = 0.0
    for i in range(k):
        interference = np.sum(gains[i]) - gains[i, i]
        sum_se += math.log2(1.0 + gains[i, i] / (interference + 1.0))
    return ThroughputReport(
        method=EstimatorMethod(method),
        M=m,
        K_users=k,
        pilot_overhead=pilot_overhead(method, m, k),
        sum_se=float(sum_se),
    )


def run_realization(
    spec: ChannelModelSpec,
    m: int,
    k_users: int,
    snr_db: float,
    seed: int,
    trial: int,
    prior: Optional[np.ndarray] = None,
) -> dict:
    """One channel realization: all three methods on the same channels."""
    rng = rng_for(seed, trial, 0x3120)
    power = 10.0 ** (snr_db / 10.0)
    channels = np.stack([channel(spec, m, rng) for _ in range(k_users)])
    reports = {}
    for method in EstimatorMethod:
        n_pilots = pilots_per_user(method, m, k_users)
        est = np.stack([
            estimate(method, pilot_observations(channels[i], power, n_pilots, rng),
                     power, m, k_users, prior)
            for i in range(k_users)
        ])
        reports[method.value] = effective_throughput(est, channels, method, snr_db)
    return reports
