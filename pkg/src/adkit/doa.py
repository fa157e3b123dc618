"""Single-snapshot MUSIC direction-of-arrival estimation.

CG-MUSIC eigendecomposes the group-averaged estimate; the covariance-method
baseline uses the rank-one outer product. Both scan a pseudospectrum over a
degree grid with parabolic peak refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .estimators import CovEstimate, EstimatorError, Observation, group_averaged
from .groups import GroupRep
from .signals import steering_vector

MIN_PEAK_SEPARATION_DEG = 1.0


@dataclass
class Pseudospectrum:
    """Pseudospectrum values on a degree grid with its extracted peaks."""

    grid: np.ndarray
    values: np.ndarray
    peaks: list  # (angle_deg, value), descending by value


def steering(theta_deg: float, m: int, spacing: float = 0.5) -> np.ndarray:
    """ULA steering vector (unit-modulus entries, ||a||^2 = M)."""
    if not -90.0 < theta_deg < 90.0:
        raise ValueError("theta must lie in (-90, 90)")
    return steering_vector(theta_deg, m, spacing)


def _music_spectrum(
    cov: CovEstimate,
    k: int,
    grid: np.ndarray,
    spacing: float,
) -> np.ndarray:
    un = cov.noise_subspace(k)  # (M, M-K)
    m = cov.M
    phases = 2.0 * np.pi * spacing * np.sin(np.deg2rad(grid))
    a = np.exp(1j * np.outer(np.arange(m), phases))  # (M, n_grid)
    denom = np.sum(np.abs(un.conj().T @ a) ** 2, axis=0)
    return 1.0 / np.maximum(denom, 1e-300)


def _extract_peaks(grid: np.ndarray, values: np.ndarray, k: int) -> list:
    """K largest local maxima separated by at least 1 degree, refined.

    Separation suppresses shoulder artifacts; refinement is parabolic in the
    log-spectrum around each peak sample.
    """
    step = grid[1] - grid[0]
    inner = (values[1:-1] >= values[:-2]) & (values[1:-1] >= values[2:])
    candidates = np.where(inner)[0] + 1
    candidates = candidates[np.argsort(values[candidates])[::-1]]
    chosen = []
    min_sep = int(np.ceil(MIN_PEAK_SEPARATION_DEG / step))
    for c in candidates:
        if all(abs(c - o) >= min_sep for o in chosen):
            chosen.append(int(c))
        if len(chosen) == k:
            break
    peaks = []
    logv = np.log(np.maximum(values, 1e-300))
    for c in chosen:
        y0, y1, y2 = logv[c - 1], logv[c], logv[c + 1]
        denom = y0 - 2 * y1 + y2
        offset = 0.5 * (y0 - y2) / denom if denom < 0 else 0.0
        offset = float(np.clip(offset, -1.0, 1.0))
        peaks.append((float(grid[c] + offset * step), float(values[c])))
    peaks.sort(key=lambda p: -p[1])
    return peaks


def _scan(cov: CovEstimate, k: int, grid: Optional[np.ndarray], spacing: float) -> Pseudospectrum:
    if grid is None:
        grid = np.arange(-90.0, 90.0 + 1e-9, 0.1)
    grid = np.asarray(grid, dtype=float)
    values = _music_spectrum(cov, k, grid, spacing)
    return Pseudospectrum(grid=grid, values=values, peaks=_extract_peaks(grid, values, k))


def shift_orbit_estimate(x: Observation, mode: str = "aperture", subaperture: Optional[int] = None) -> CovEstimate:
    """Single-snapshot covariance from a shift-orbit realization.

    mode="aperture": forward-backward average over the M-L+1 length-L
    subaperture views (default L = M-1); exact signal subspace for as many
    sources as there are pseudo-snapshots, so MUSIC peaks stay unbiased.
    mode="toeplitz": per-lag averaging of the outer product (linear
    autocorrelation); lowest peak variance for a single source but its lag
    averaging mixes multi-source cross terms.
    mode="cyclic": the exact cyclic group average, circulant with
    data-independent DFT eigenvectors (bin-quantized peaks).
    """
    xd = x.data
    m = xd.size
    if mode == "cyclic":
        from .groups import GroupKind, build_group

        return group_averaged(x, build_group(GroupKind.CYCLIC, m))
    if mode == "toeplitz":
        r1 = np.outer(xd, xd.conj())
        lags = np.array([np.mean(np.diag(r1, -lag)) for lag in range(m)])
        import scipy.linalg

        return CovEstimate(scipy.linalg.toeplitz(lags, lags.conj()))
    if mode != "aperture":
        raise ValueError("mode must be 'aperture', 'toeplitz', or 'cyclic'")
    ell = subaperture if subaperture is not None else m - 1
    if not 2 <= ell <= m:
        raise ValueError("subaperture length must lie in [2, M]")
    segs = np.stack([xd[i:i + ell] for i in range(m - ell + 1)])
    r = segs.T @ segs.conj() / segs.shape[0]
    j = np.eye(ell)[::-1]
    return CovEstimate(0.5 * (r + j @ r.conj() @ j))


def cg_music(
    x: Observation,
    group: Optional[GroupRep] = None,
    k: int = 1,
    grid: Optional[np.ndarray] = None,
    spacing: float = 0.5,
    mode: str = "aperture",
) -> Pseudospectrum:
    """MUSIC pseudospectrum from a single-snapshot shift-orbit estimate.

    With a group argument, eigendecomposes the group-averaged estimate
    directly (the exact cyclic average is circulant with DFT eigenvectors
    regardless of the data, which pins peaks to bin angles). The default
    path uses the aperiodic shift-orbit realizations of
    shift_orbit_estimate, whose subspaces follow the data.
    """
    if group is not None:
        return _scan(group_averaged(x, group), k, grid, spacing)
    return _scan(shift_orbit_estimate(x, mode=mode), k, grid, spacing)


def covariance_music(
    x: Observation,
    k: int,
    grid: Optional[np.ndarray] = None,
    spacing: float = 0.5,
) -> Pseudospectrum:
    """Baseline: MUSIC on the rank-one estimate x x^H."""
    if not 0 < k < x.M:
        raise EstimatorError("signal dimension K must satisfy 1 <= K < M")
    cov = CovEstimate(np.outer(x.data, x.data.conj()))
    return _scan(cov, k, grid, spacing)


def resolved_angles(ps: Pseudospectrum, truths: Sequence[float], tol_deg: float = 0.5) -> bool:
    """Whether every true angle is matched by a distinct extracted peak."""
    unused = [p[0] for p in ps.peaks]
    for t in truths:
        hit = next((a for a in unused if abs(a - t) <= tol_deg), None)
        if hit is None:
            return False
        unused.remove(hit)
    return True
