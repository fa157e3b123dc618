"""Group-model mismatch metrics.

Commutativity residual delta, absolute mismatch, algebraic coloring index,
spectral concentration, diagonalization residual against a group's fast
transform, the rank-one sample residual, and the permutation commutator
cost on an eigenvalue list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.fft

from .estimators import CovEstimate, EstimatorError, Observation, group_averaged
from .groups import GroupKind, GroupRep, Permutation

MatrixLike = Union[CovEstimate, np.ndarray]


class MetricError(ValueError):
    """Invalid metric input."""


def _as_matrix(a: MatrixLike) -> np.ndarray:
    if isinstance(a, CovEstimate):
        return a.matrix
    return np.asarray(a, dtype=complex)


@dataclass(frozen=True)
class MismatchReport:
    """Scalar metric bundle for a (group, observation, covariance) triple."""

    delta: float
    delta_abs: float
    alpha: float
    psi: float


def commut_residual(f: MatrixLike, r: MatrixLike) -> float:
    """||FR - RF||_F / (||F||_F ||R||_F), in [0, 2]; 0 iff F and R commute."""
    fm, rm = _as_matrix(f), _as_matrix(r)
    nf, nr = np.linalg.norm(fm), np.linalg.norm(rm)
    if nf == 0 or nr == 0:
        raise MetricError("zero-norm input")
    return float(np.linalg.norm(fm @ rm - rm @ fm) / (nf * nr))


def abs_mismatch(f: MatrixLike, r: MatrixLike) -> float:
    """||FR - RF||_F / ||F||_F: the mismatch in the covariance's own units."""
    fm, rm = _as_matrix(f), _as_matrix(r)
    nf = np.linalg.norm(fm)
    if nf == 0:
        raise MetricError("zero-norm input")
    return float(np.linalg.norm(fm @ rm - rm @ fm) / nf)


def coloring_index(q: MatrixLike) -> float:
    """||Q - mean_eig * I||_F / ||Q||_F in [0, 1]; 0 iff Q is scalar."""
    qm = _as_matrix(q)
    nq = np.linalg.norm(qm)
    if nq == 0:
        raise MetricError("zero matrix")
    qbar = np.real(np.trace(qm)) / qm.shape[0]
    return float(np.linalg.norm(qm - qbar * np.eye(qm.shape[0])) / nq)


def spectral_concentration(cov: CovEstimate) -> float:
    """psi = lambda_1 / trace: the blind group-selection figure of merit."""
    tr = cov.trace
    if tr <= 0:
        raise MetricError("zero trace")
    return float(cov.eigenvalues[0] / tr)


def dft_basis(m: int) -> np.ndarray:
    """Unitary DFT analysis matrix; diagonalizes circulants."""
    return scipy.fft.fft(np.eye(m), axis=0) / np.sqrt(m)


def dct_basis(m: int) -> np.ndarray:
    """Orthonormal DCT-II analysis matrix: the dihedral fast transform."""
    return scipy.fft.dct(np.eye(m), axis=0, norm="ortho")


def transform_basis(group: GroupRep) -> np.ndarray:
    """Unitary transform T_G whose rows diagonalize the group's commutant.

    DFT for cyclic, DCT-II for dihedral, Kronecker DFT for direct products
    of cyclic factors, T_base @ U for conjugated groups, and the eigenbasis
    of the group average of a fixed generic Hermitian otherwise.
    """
    m = group.dim
    if group.kind == GroupKind.TRIVIAL:
        return np.eye(m, dtype=complex)
    if group.kind == GroupKind.CYCLIC:
        return dft_basis(m)
    if group.kind == GroupKind.DIHEDRAL:
        return dct_basis(m).astype(complex)
    if group.kind == GroupKind.DIRECT_PRODUCT:
        if not group.params:
            raise MetricError("direct product group lacks factor sizes")
        t = None
        for f in group.params:
            tf = dft_basis(f)
            t = tf if t is None else np.kron(t, tf)
        return t
    if group.kind == GroupKind.CONJUGATED and group.generators:
        return dft_basis(m) @ group.generators[0]
    # generic: eigenbasis of the Reynolds average of a fixed generic Hermitian
    rng = np.random.default_rng(0x5EED)
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a = a + a.conj().T
    avg = np.zeros((m, m), dtype=complex)
    for g in range(group.order):
        pg = group.element_matrix(g).astype(complex)
        avg += pg @ a @ pg.conj().T
    avg /= group.order
    _, v = np.linalg.eigh(avg)
    return v.conj().T


def diag_residual(group: GroupRep, q: MatrixLike) -> float:
    """Off-diagonal Frobenius energy of T_G Q T_G^H over ||Q||_F."""
    qm = _as_matrix(q)
    nq = np.linalg.norm(qm)
    if nq == 0:
        raise MetricError("zero matrix")
    t = transform_basis(group)
    d = t @ qm @ t.conj().T
    off = d - np.diag(np.diag(d))
    return float(np.linalg.norm(off) / nq)


def sample_commut_residual(group: GroupRep, x: Observation) -> float:
    """Commutativity residual of the group average against the rank-one sample."""
    if x.norm_sq() == 0:
        raise MetricError("zero vector")
    f = group_averaged(x, group)
    r = np.outer(x.data, x.data.conj())
    return commut_residual(f, r)


def perm_commutator_cost(sigma: Permutation, eigenvalues: np.ndarray) -> float:
    """Total squared displacement sum_k (lambda_k - lambda_sigma(k))^2.

    Equals ||P R - R P||_F^2 when sigma permutes the eigenbasis directly
    (diagonal R, or sigma an automorphism of R).
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise MetricError("eigenvalues must be finite")
    return float(np.sum((lam - lam[sigma.map]) ** 2))


def mismatch_report(x: Observation, group: GroupRep, r: MatrixLike) -> MismatchReport:
    """delta, delta-tilde, alpha, psi for one (group, observation, covariance)."""
    f = group_averaged(x, group)
    return MismatchReport(
        delta=commut_residual(f, r),
        delta_abs=abs_mismatch(f, r),
        alpha=coloring_index(r),
        psi=spectral_concentration(f),
    )


def simultaneously_diagonalizable(f: MatrixLike, r: MatrixLike, rel_tol: float = 1e-8) -> bool:
    """Whether one unitary diagonalizes both Hermitian matrices.

    Diagonalizes R and checks the off-diagonal energy of V^H F V; for
    degenerate eigenvalues of R the check runs blockwise, diagonalizing the
    restriction of F within each eigenspace of R.
    """
    fm, rm = _as_matrix(f), _as_matrix(r)
    w, v = np.linalg.eigh(0.5 * (rm + rm.conj().T))
    g = v.conj().T @ fm @ v
    scale = max(np.linalg.norm(fm), 1e-300)
    # group eigenvalues of R into degenerate blocks
    gap = 1e-9 * max(1.0, float(np.max(np.abs(w))))
    blocks = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            blocks.append((start, i))
            start = i
    off = g.copy()
    for a, b in blocks:
        off[a:b, a:b] = 0.0  # within-eigenspace mixing is allowed
    return bool(np.linalg.norm(off) <= rel_tol * scale)
