"""Colored-noise characterization.

Natural-group identification from the diagonalization residual,
group-constrained noise-spectrum estimation, structured whitening, the
noise-subspace-restricted estimator, and the EM-like refinement that
characterizes noise from signal-bearing data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .estimators import CovEstimate, EstimatorError, Observation, group_averaged
from .groups import GroupKind, GroupRep, build_group
from .metrics import coloring_index, diag_residual, transform_basis

SPECTRUM_FLOOR_REL = 1e-12


class NoiseCharError(ValueError):
    """Invalid noise characterization input."""


@dataclass
class NoiseCharacterization:
    """Natural group, per-group residuals, coloring index, spectrum estimate."""

    natural_group: str
    residuals: dict
    alpha: float
    spectrum: Optional[np.ndarray] = None
    floored_bins: int = 0


def default_catalog(m: int) -> list:
    """Default transform-equipped catalog: cyclic, dihedral, cyclic products."""
    catalog = [("cyclic", build_group(GroupKind.CYCLIC, m))]
    if m >= 3:
        catalog.append(("dihedral", build_group(GroupKind.DIHEDRAL, m)))
    factors = _factorizations(m)
    for f in factors:
        name = "x".join(f"Z{a}" for a in f)
        catalog.append((name, build_group(GroupKind.DIRECT_PRODUCT, m, params=f)))
    return catalog


def _factorizations(m: int) -> list:
    """Nontrivial ordered factorizations of m into factors >= 2 (small m)."""
    out = []
    def rec(rest, acc):
        if rest == 1 and len(acc) >= 2:
            out.append(tuple(acc))
            return
        for f in range(2, rest + 1):
            if rest % f == 0:
                rec(rest // f, acc + [f])
    if m <= 64:
        rec(m, [])
    return out


def natural_group(q: np.ndarray, catalog: Sequence[Tuple[str, GroupRep]]) -> NoiseCharacterization:
    """Catalog group whose transform best diagonalizes Q.

    Ties resolve toward the smaller-order group.
    """
    if not catalog:
        raise NoiseCharError("empty catalog")
    residuals = {name: diag_residual(g, q) for name, g in catalog}
    orders = {name: g.order for name, g in catalog}
    best = min(catalog, key=lambda t: (round(residuals[t[0]], 12), orders[t[0]]))[0]
    return NoiseCharacterization(natural_group=best, residuals=residuals, alpha=coloring_index(q))


def estimate_noise_spectrum(snapshots: Sequence[Observation], group: GroupRep) -> np.ndarray:
    """Group-constrained spectrum: mean squared transform coefficients.

    q_hat_k = (1/L) sum_t |[T_G x_t]_k|^2; consistent with variance q_k^2/L
    when the transform exactly diagonalizes the noise covariance.
    """
    if not snapshots:
        raise NoiseCharError("need at least one snapshot")
    m = snapshots[0].M
    if any(s.M != m for s in snapshots) or group.dim != m:
        raise EstimatorError("dimension mismatch")
    t = transform_basis(group)
    coeffs = np.stack([t @ s.data for s in snapshots])
    return np.mean(np.abs(coeffs) ** 2, axis=0)


def whiten(x: Observation, group: GroupRep, spectrum: np.ndarray) -> Observation:
    """Structured whitening T^H diag(q^-1/2) T x using the group's fast transform."""
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.shape != (x.M,):
        raise NoiseCharError("spectrum length must match the observation")
    floor = SPECTRUM_FLOOR_REL * float(np.max(spectrum))
    if floor <= 0:
        raise NoiseCharError("spectrum must have a positive entry")
    q = np.maximum(spectrum, floor)
    t = transform_basis(group)
    return Observation(t.conj().T @ ((t @ x.data) / np.sqrt(q)))


def noise_restricted(f: CovEstimate, k: int) -> np.ndarray:
    """Noise-subspace-restricted estimator U_n^H F U_n, size (M-K) x (M-K)."""
    un = f.noise_subspace(k)
    return un.conj().T @ f.matrix @ un


def noise_model_from_estimate(f: CovEstimate, k: int) -> np.ndarray:
    """Full-coordinate noise covariance model: F with the excess signal energy
    in its top-K eigendirections flattened to the mean noise level."""
    lam = f.eigenvalues
    noise_mean = float(np.mean(lam[k:]))
    us = f.eigenvectors[:, :k]
    excess = us @ np.diag(lam[:k] - noise_mean) @ us.conj().T
    return f.matrix - excess


def _spectrum_from_estimate(f: CovEstimate, k: int, group: GroupRep) -> np.ndarray:
    """Transform-domain noise spectrum with the excess signal energy removed."""
    q_full = noise_model_from_estimate(f, k)
    t = transform_basis(group)
    return np.maximum(np.real(np.diag(t @ q_full @ t.conj().T)), 0.0)


def iterative_refine(
    x: Observation,
    k: int,
    catalog: Sequence[Tuple[str, GroupRep]],
    max_iter: int = 5,
    signal_group: Optional[GroupRep] = None,
    rel_change_stop: float = 0.01,
) -> Tuple[NoiseCharacterization, CovEstimate]:
    """EM-like alternation: whiten, group-average, re-extract the noise model.

    Starts from a white noise model; stops when the mean-normalized spectrum
    changes by less than 1% or after max_iter sweeps. A monotonically
    shrinking dominant eigenvalue gap over three sweeps raises the
    divergence flag on the returned characterization.
    """
    if max_iter < 1:
        raise NoiseCharError("max_iter must be >= 1")
    if not catalog:
        raise NoiseCharError("empty catalog")
    m = x.M
    group = signal_group if signal_group is not None else build_group(GroupKind.CYCLIC, m)
    spectrum = np.ones(m)
    char = None
    f = None
    gaps = []
    for _ in range(max_iter):
        xw = whiten(x, group, spectrum)
        f = group_averaged(xw, group)
        lam = f.eigenvalues
        gaps.append(float((lam[0] - lam[min(k, m - 1)]) / max(f.trace, 1e-300)))
        new_spec = _spectrum_from_estimate(f, k, group)
        # single-snapshot per-bin estimates are exponential-noisy: shrink
        # toward the mean so near-zero bins cannot blow up under whitening
        new_spec = 0.5 * new_spec + 0.5 * np.mean(new_spec)
        # compare shapes: whitening already absorbed the previous model
        combined = spectrum * new_spec
        combined = combined / np.mean(combined)
        prev = spectrum / np.mean(spectrum)
        change = float(np.max(np.abs(combined - prev) / np.maximum(prev, 1e-12)))
        spectrum = combined
        if change < rel_change_stop:
            break
    char = natural_group(noise_model_from_estimate(f, k), catalog)
    char.spectrum = spectrum
    diverging = len(gaps) >= 3 and all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 3, len(gaps) - 1))
    if diverging:
        char.residuals["_diverging"] = 1.0
    return char, f
