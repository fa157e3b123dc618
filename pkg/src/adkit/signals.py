"""Deterministic, seedable signal generators for the experiments.

ULA snapshots, waveform pulses (tone / chirp / two-tone / noise-like),
AR(1) covariances, graph-filtered signals, and colored noise draws.

SNR convention throughout: per-element signal power over per-element noise
power, realized exactly per trial by scaling the noise to the drawn signal
energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .estimators import Observation


class SignalError(ValueError):
    """Invalid signal specification."""


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Counter-style per-trial stream: independent for each (seed, stream)."""
    entropy = [int(seed) & ((1 << 64) - 1)] + [int(s) & ((1 << 64) - 1) for s in stream]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def cn_samples(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circular complex Gaussian."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def snr_to_sigma2(snr_db: float, per_element_signal_power: float = 1.0) -> float:
    return per_element_signal_power / (10.0 ** (snr_db / 10.0))


@dataclass(frozen=True)
class UlaSpec:
    """Uniform linear array snapshot: sources at given angles plus white noise."""

    M: int
    angles: Sequence[float]
    snr_db: float
    spacing: float = 0.5

    def __post_init__(self):
        if self.M < 2:
            raise SignalError("ULA needs M >= 2")
        if any(not -90.0 < a < 90.0 for a in self.angles):
            raise SignalError("angles must lie in (-90, 90) degrees")


class WaveformClassName(str, Enum):
    TONE = "tone"
    CHIRP = "chirp"
    TWO_TONE = "two_tone"
    NOISE_LIKE = "noise_like"


@dataclass(frozen=True)
class WaveformSpec:
    """Single-pulse waveform: class, length, chirp rate, frequencies, SNR.

    Center frequencies are normalized to [0, 1) and snapped to the nearest
    DFT bin at synthesis, so a noiseless pulse dechirped at the true rate is
    an exact DFT atom.
    """

    kind: WaveformClassName
    M: int
    snr_db: float
    mu: float = 0.0
    f0: float = 0.15
    f1: float = 0.35

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveformClassName(self.kind))
        if abs(self.mu) > 2:
            raise SignalError("|mu| must be <= 2")
        if not (0 <= self.f0 < 1 and 0 <= self.f1 < 1):
            raise SignalError("frequencies must lie in [0, 1)")


@dataclass(frozen=True)
class GraphSignalSpec:
    """Graph-filtered signal x = h(A) w + n."""

    adjacency: np.ndarray
    filter_taps: Sequence[float]
    snr_db: float

    def __post_init__(self):
        if not any(abs(t) > 0 for t in self.filter_taps):
            raise SignalError("need at least one nonzero filter tap")


def steering_vector(theta_deg: float, m: int, spacing: float = 0.5) -> np.ndarray:
    """ULA steering vector with entries exp(j 2 pi spacing m sin(theta))."""
    phase = 2.0 * np.pi * spacing * np.sin(np.deg2rad(theta_deg))
    return np.exp(1j * phase * np.arange(m))


def ula_snapshot(spec: UlaSpec, seed: int, trial: int = 0) -> Observation:
    """One snapshot A s + n with unit-modulus random-phase source amplitudes."""
    rng = rng_for(seed, trial)
    a = np.stack([steering_vector(t, spec.M, spec.spacing) for t in spec.angles], axis=1)
    amps = np.exp(2j * np.pi * rng.random(len(spec.angles)))
    signal = a @ amps
    sigma2 = (np.real(np.vdot(signal, signal)) / spec.M) / (10.0 ** (spec.snr_db / 10.0))
    noise = np.sqrt(sigma2) * cn_samples(rng, spec.M)
    return Observation(signal + noise)


def tone(m: int, f0: float) -> np.ndarray:
    """Unit-modulus tone at the DFT bin nearest f0 (cycles/sample)."""
    k = int(round(f0 * m)) % m
    return np.exp(2j * np.pi * k * np.arange(m) / m)


def chirp_pulse(m: int, mu: float, f0: float) -> np.ndarray:
    """LFM chirp exp(j pi mu n^2 / M) on a tone carrier."""
    n = np.arange(m)
    return np.exp(1j * np.pi * mu * n ** 2 / m) * tone(m, f0)


def dechirp(mu: float, m: int) -> np.ndarray:
    """Unitary diagonal dechirp operator diag(exp(-j pi mu n^2 / M))."""
    if not np.isfinite(mu):
        raise SignalError("mu must be finite")
    n = np.arange(m)
    return np.diag(np.exp(-1j * np.pi * mu * n ** 2 / m))


def dechirp_diag(mu: float, m: int) -> np.ndarray:
    """Diagonal of the dechirp operator (for vectorized sweeps)."""
    n = np.arange(m)
    return np.exp(-1j * np.pi * mu * n ** 2 / m)


def waveform(spec: WaveformSpec, seed: int, trial: int = 0) -> Observation:
    """Synthesize one pulse of the requested class at the requested SNR."""
    rng = rng_for(seed, trial, 0x57A7)
    m = spec.M
    if spec.kind == WaveformClassName.TONE:
        s = tone(m, spec.f0)
    elif spec.kind == WaveformClassName.CHIRP:
        s = chirp_pulse(m, spec.mu, spec.f0)
    elif spec.kind == WaveformClassName.TWO_TONE:
        k0, k1 = int(round(spec.f0 * m)) % m, int(round(spec.f1 * m)) % m
        if k0 == k1:
            raise SignalError("two-tone frequencies snap to the same bin")
        s = (tone(m, spec.f0) + tone(m, spec.f1)) / np.sqrt(2.0)
    else:  # noise-like: bandlimited complex Gaussian, lower half of the DFT bins
        w = cn_samples(rng, m)
        spectrum = np.fft.fft(w)
        spectrum[(m + 1) // 2:] = 0.0
        s = np.fft.ifft(spectrum)
        s *= np.sqrt(m) / np.linalg.norm(s)
    sigma2 = (np.real(np.vdot(s, s)) / m) / (10.0 ** (spec.snr_db / 10.0))
    noise = np.sqrt(sigma2) * cn_samples(rng, m)
    return Observation(s + noise)


def ar1_cov(rho: float, m: int) -> np.ndarray:
    """Toeplitz AR(1) covariance with entries rho^|i-j|; PSD for rho in [0, 1)."""
    if not 0 <= rho < 1:
        raise SignalError("rho must lie in [0, 1)")
    idx = np.arange(m)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def ar1_circulant_cov(rho: float, m: int) -> np.ndarray:
    """Circulant (wrap-stationary) AR(1): entries rho^min(|i-j|, M-|i-j|).

    The index-circle stationary counterpart of ar1_cov; exactly
    diagonalized by the DFT at any M.
    """
    if not 0 <= rho < 1:
        raise SignalError("rho must lie in [0, 1)")
    idx = np.arange(m)
    lag = np.abs(idx[:, None] - idx[None, :])
    return rho ** np.minimum(lag, m - lag)


def graph_signal(spec: GraphSignalSpec, seed: int, trial: int = 0) -> Observation:
    """x = h(A) w + n with white w and noise scaled to the filtered power."""
    rng = rng_for(seed, trial, 0x6AF)
    a = np.asarray(spec.adjacency, dtype=float)
    m = a.shape[0]
    h = filter_matrix(a, spec.filter_taps)
    s = h @ cn_samples(rng, m)
    sigma2 = (np.real(np.vdot(s, s)) / m) / (10.0 ** (spec.snr_db / 10.0))
    noise = np.sqrt(sigma2) * cn_samples(rng, m)
    return Observation(s + noise)


def filter_matrix(adjacency: np.ndarray, taps: Sequence[float]) -> np.ndarray:
    """Polynomial graph filter h(A) = sum_k h_k A^k."""
    m = adjacency.shape[0]
    out = np.zeros((m, m))
    power = np.eye(m)
    for t in taps:
        out = out + t * power
        power = power @ adjacency
    return out


def colored_noise(q: np.ndarray, seed: int, trial: int = 0) -> Observation:
    """One draw n ~ CN(0, Q) via the PSD square root of Q."""
    q = np.asarray(q, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (q + q.conj().T))
    if np.min(w) < -1e-10 * max(np.max(w), 1e-300):
        raise SignalError("Q must be positive semidefinite")
    root = v @ np.diag(np.sqrt(np.maximum(w, 0.0))) @ v.conj().T
    rng = rng_for(seed, trial, 0xC0104ED)
    return Observation(root @ cn_samples(rng, q.shape[0]))


def colored_noise_batch(q: np.ndarray, seed: int, count: int) -> np.ndarray:
    """(count, M) matrix of independent CN(0, Q) draws from one stream."""
    q = np.asarray(q, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (q + q.conj().T))
    if np.min(w) < -1e-10 * max(np.max(w), 1e-300):
        raise SignalError("Q must be positive semidefinite")
    root = v @ np.diag(np.sqrt(np.maximum(w, 0.0))) @ v.conj().T
    rng = rng_for(seed, 0xC0104ED)
    return cn_samples(rng, (count, q.shape[0])) @ root.T
