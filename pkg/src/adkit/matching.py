"""Blind group selection.

Library ranking by spectral concentration, conjugation-sweep chirp-rate
estimation, the four-class single-pulse waveform classifier, and the
no-structure criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .estimators import CovEstimate, Observation, group_averaged
from .groups import GroupKind, GroupRep, build_group, conjugate_group
from .metrics import spectral_concentration
from .signals import dechirp_diag


class MatchingError(ValueError):
    """Invalid matching input."""


@dataclass(frozen=True)
class MatchResult:
    """One catalog entry's score in a blind-selection ranking."""

    group_id: str
    psi: float
    rank: int
    mu_hat: Optional[float] = None
    orbit_bias_warning: bool = False


class WaveformLabel(str, Enum):
    TONE = "tone"
    CHIRP = "chirp"
    MULTI_TONE = "multi_tone"
    NOISE_LIKE = "noise_like"


@dataclass(frozen=True)
class WaveformClass:
    """Classifier decision with the features that produced it."""

    label: WaveformLabel
    psi_star: float
    mu_hat: float
    lambda_ratio: float


def match_library(x: Observation, catalog: Sequence[Tuple[str, GroupRep]]) -> list:
    """Rank catalog groups by the spectral concentration of their estimates.

    Returns MatchResults in descending-psi order. When catalog groups have
    differing index-orbit structures the results carry the documented
    orbit-size bias warning.
    """
    if not catalog:
        raise MatchingError("empty catalog")
    orbit_structures = {g.orbit_sizes() for _, g in catalog}
    warn = len(orbit_structures) > 1
    scored = []
    for name, g in catalog:
        psi = spectral_concentration(group_averaged(x, g))
        scored.append((name, psi))
    scored.sort(key=lambda t: -t[1])
    return [
        MatchResult(group_id=name, psi=psi, rank=i + 1, orbit_bias_warning=warn)
        for i, (name, psi) in enumerate(scored)
    ]


def psi_sweep(x: Observation, mu_grid: np.ndarray) -> np.ndarray:
    """psi of the chirp-adapted group at every grid rate, vectorized.

    The adapted-group estimate U^H F_Z(Ux) U shares eigenvalues with the
    cyclic estimate of the dechirped pulse, whose spectrum is the DFT bin
    energy profile; psi(mu) = max_k |DFT(U(mu)x)_k|^2 / (M ||x||^2).
    """
    m = x.M
    n = np.arange(m)
    phases = np.exp(-1j * np.pi * np.outer(mu_grid, n ** 2) / m)
    spectra = np.fft.fft(phases * x.data[None, :], axis=1)
    return np.max(np.abs(spectra) ** 2, axis=1) / (m * x.norm_sq())


def estimate_chirp_rate(
    x: Observation,
    mu_min: float = -2.0,
    mu_max: float = 2.0,
    step: float = 0.01,
) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """Blind chirp-rate estimate by spectral-concentration maximization.

    Sweeps the conjugation parameter over the grid, then takes one parabolic
    refinement step around the argmax. Returns (mu_hat, psi_star, grid,
    psi curve).
    """
    count = int(round((mu_max - mu_min) / step)) + 1
    if count < 2:
        raise MatchingError("empty sweep grid")
    grid = np.linspace(mu_min, mu_max, count)
    curve = psi_sweep(x, grid)
    i = int(np.argmax(curve))
    mu_hat = float(grid[i])
    psi_star = float(curve[i])
    if 0 < i < count - 1:
        y0, y1, y2 = curve[i - 1], curve[i], curve[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            offset = 0.5 * (y0 - y2) / denom
            mu_ref = mu_hat + offset * step
            psi_ref = float(psi_sweep(x, np.array([mu_ref]))[0])
            if psi_ref >= psi_star:
                mu_hat, psi_star = float(mu_ref), psi_ref
    return mu_hat, psi_star, grid, curve


def adapted_group(m: int, mu: float) -> GroupRep:
    """Cyclic group conjugated by the dechirp operator at rate mu."""
    u = np.diag(dechirp_diag(mu, m))
    return conjugate_group(build_group(GroupKind.CYCLIC, m), u)


PSI_CHIRP = 0.4
PSI_TONE = 0.6
MU_TONAL = 0.1
LAMBDA_RATIO_TONE = 2.0


def classify_waveform(
    x: Observation,
    use_lambda_ratio: bool = False,
    mu_min: float = -2.0,
    mu_max: float = 2.0,
    step: float = 0.01,
) -> WaveformClass:
    """Four-class single-pulse classifier on (psi*, mu_hat) features.

    Decision tree: psi* > 0.4 with |mu_hat| >= 0.1 -> chirp; psi* > 0.6 with
    small |mu_hat| -> tone; 0.4 < psi* <= 0.6 with small |mu_hat| ->
    multi-tone; psi* <= 0.4 -> noise-like. With use_lambda_ratio, the tonal
    branch re-splits on lambda1/lambda2 >= 2.
    """
    if x.M < 8:
        raise MatchingError("classifier needs M >= 8")
    mu_hat, psi_star, _, _ = estimate_chirp_rate(x, mu_min, mu_max, step)
    lam = np.sort(np.abs(np.fft.fft(dechirp_diag(mu_hat, x.M) * x.data)) ** 2)[::-1] / x.M
    lam_ratio = float(lam[0] / max(lam[1], 1e-300))
    if psi_star > PSI_CHIRP and abs(mu_hat) >= MU_TONAL:
        label = WaveformLabel.CHIRP
    elif psi_star > PSI_TONE and abs(mu_hat) < MU_TONAL:
        label = WaveformLabel.TONE
    elif psi_star > PSI_CHIRP and abs(mu_hat) < MU_TONAL:
        label = WaveformLabel.MULTI_TONE
    else:
        label = WaveformLabel.NOISE_LIKE
    if use_lambda_ratio and label in (WaveformLabel.TONE, WaveformLabel.MULTI_TONE):
        label = WaveformLabel.TONE if lam_ratio >= LAMBDA_RATIO_TONE else WaveformLabel.MULTI_TONE
    return WaveformClass(label=label, psi_star=psi_star, mu_hat=mu_hat, lambda_ratio=lam_ratio)


def no_structure_test(x: Observation, catalog: Sequence[Tuple[str, GroupRep]], epsilon: float) -> bool:
    """True when no catalog group concentrates above the 1/M white baseline.

    The rank-one trivial group must not appear in the catalog (it always
    scores psi = 1).
    """
    if epsilon <= 0:
        raise MatchingError("epsilon must be positive")
    for name, g in catalog:
        if g.order == 1:
            raise MatchingError("trivial group is excluded from no-structure catalogs")
    best = max(spectral_concentration(group_averaged(x, g)) for _, g in catalog)
    return bool(best <= 1.0 / x.M + epsilon)
