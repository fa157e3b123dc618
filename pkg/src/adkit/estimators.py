"""Group-averaged covariance estimation from a single observation.

The group-averaged estimator, its n-element PASE truncation, the Cayley
autocorrelation matrix, the eigenvalue-domain SNR quality metric, the
exact symmetric-group expectation, and the effective group order of a
statistic on a group orbit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .groups import (
    GroupError,
    GroupRep,
    OrderingStrategy,
    Permutation,
    ordering_iterator,
)

RANK_REL_TOL = 1e-10
SNR_CLAMP_REL = 1e-15


class EstimatorError(ValueError):
    """Invalid estimator input."""


@dataclass(frozen=True)
class Observation:
    """A single length-M complex snapshot."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex).ravel()
        object.__setattr__(self, "data", d)
        if d.size < 1 or not np.all(np.isfinite(d)):
            raise EstimatorError("observation must be non-empty with finite entries")

    @property
    def M(self) -> int:
        return self.data.size

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


@dataclass
class CovEstimate:
    """Hermitian covariance estimate with cached descending eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(default=None)
    eigenvectors: np.ndarray = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        a = 0.5 * (a + a.conj().T)  # eigendecomposition always on the symmetrized matrix
        self.matrix = a
        if self.eigenvalues is None:
            w, v = np.linalg.eigh(a)
            order = np.argsort(w)[::-1]  # descending, eigensolver order within ties
            self.eigenvalues = w[order]
            self.eigenvectors = v[:, order]

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def noise_subspace(self, k: int) -> np.ndarray:
        """Trailing M-k eigenvectors (columns)."""
        if not 0 < k < self.M:
            raise EstimatorError("signal dimension K must satisfy 1 <= K < M")
        return self.eigenvectors[:, k:]

    def signal_subspace(self, k: int) -> np.ndarray:
        if not 0 < k < self.M:
            raise EstimatorError("signal dimension K must satisfy 1 <= K < M")
        return self.eigenvectors[:, :k]

    def numerical_rank(self, rel_tol: float = RANK_REL_TOL) -> int:
        scale = max(self.trace, np.max(np.abs(self.eigenvalues)), 1e-300)
        return int(np.sum(self.eigenvalues > rel_tol * scale))


def _orbit(x: Observation, group: GroupRep) -> np.ndarray:
    if group.dim != x.M:
        raise EstimatorError(f"group dim {group.dim} != observation dim {x.M}")
    return group.apply_all(x.data)


def _average_outer(rows: np.ndarray) -> np.ndarray:
    # rows: (n, M) of transformed copies; average of row outer products
    return rows.T @ rows.conj() / rows.shape[0]


def group_averaged(x: Observation, group: GroupRep) -> CovEstimate:
    """Average of (g.x)(g.x)^H over the whole group.

    Full-rank Hermitian PSD surrogate for the covariance from one snapshot;
    the trace equals ||x||^2 for permutation actions.
    """
    if x.norm_sq() == 0.0:
        raise EstimatorError("zero-norm observation")
    return CovEstimate(_average_outer(_orbit(x, group)))


def perm_average(x: Observation, perms: Sequence[Permutation]) -> CovEstimate:
    """Average of outer products over an explicit permutation list."""
    if not perms:
        raise EstimatorError("need at least one permutation")
    if x.norm_sq() == 0.0:
        raise EstimatorError("zero-norm observation")
    maps = np.stack([p.map for p in perms])
    return CovEstimate(_average_outer(x.data[maps]))


def pase(
    x: Observation,
    group: GroupRep,
    n: int,
    ordering: Optional[OrderingStrategy] = None,
) -> CovEstimate:
    """PASE estimator: average of n rank-one terms.

    The first min(n, |G|) terms walk the group in its listed order; any
    surplus beyond |G| is drawn from S_M by the given ordering strategy
    (required in that regime).
    """
    if n < 1:
        raise EstimatorError("n must be >= 1")
    if x.norm_sq() == 0.0:
        raise EstimatorError("zero-norm observation")
    rows = _orbit(x, group)[: min(n, group.order)]
    if n > group.order:
        if ordering is None:
            raise EstimatorError("n exceeds the group order; an ordering strategy is required for the surplus")
        it = ordering_iterator(ordering, x.M)
        extra_maps = np.stack([next(it).map for _ in range(n - group.order)])
        rows = np.vstack([rows, x.data[extra_maps]])
    return CovEstimate(_average_outer(rows))


def cayley_matrix(x: Observation, group: GroupRep) -> np.ndarray:
    """M x |G| matrix with entry (i, j) = x[g_j(i)].

    Circulant for the cyclic group; requires a pure permutation group.
    """
    if not group.is_permutation_group():
        raise EstimatorError("cayley_matrix requires permutation elements")
    if group.dim != x.M:
        raise EstimatorError("dimension mismatch")
    return _orbit(x, group).T


def eig_snr(cov: CovEstimate, k: int, trailing: str = "nonzero") -> float:
    """Eigenvalue-domain SNR in dB: lambda_1 over the mean trailing eigenvalue.

    trailing="nonzero" (default) averages the nonzero trailing eigenvalues
    lambda_{K+1..rank}, so rank-deficient partial averages are penalized for
    the spectral components they have not yet filled in; this is the metric
    under which the PASE depth curve peaks at n = |G|. trailing="full"
    averages all M-K trailing eigenvalues, zeros included (the subsampling
    experiment's convention). The mean is clamped below at 1e-15 * trace;
    a clamp-limited result means the estimate is degenerate.
    """
    m = cov.M
    if not 0 < k < m:
        raise EstimatorError("signal dimension K must satisfy 1 <= K < M")
    if trailing not in ("nonzero", "full"):
        raise EstimatorError("trailing must be 'nonzero' or 'full'")
    lam = np.maximum(cov.eigenvalues, 0.0)
    stop = cov.numerical_rank() if trailing == "nonzero" else m
    tail = lam[k:stop]
    scale = max(cov.trace, 1e-300)
    if tail.size == 0:
        warnings.warn("degenerate estimate: no nonzero trailing eigenvalues; SNR is clamp-limited")
        mean_noise = SNR_CLAMP_REL * scale
    else:
        mean_noise = max(float(np.mean(tail)), SNR_CLAMP_REL * scale)
    return float(10.0 * np.log10(lam[0] / mean_noise))


def sm_expectation(x: Observation) -> CovEstimate:
    """Exact expectation of (P x)(P x)^H over uniform permutations.

    Closed form verified against brute-force enumeration: diagonal entries
    S2/M and off-diagonal entries (|sum x|^2 - S2)/(M(M-1)) with
    S2 = sum |x_i|^2.
    """
    m = x.M
    if m < 2:
        raise EstimatorError("sm_expectation needs M >= 2")
    s2 = x.norm_sq()
    total = np.sum(x.data)
    off = (abs(total) ** 2 - s2) / (m * (m - 1))
    mat = np.full((m, m), off, dtype=complex)
    np.fill_diagonal(mat, s2 / m)
    return CovEstimate(mat)


def moment_statistic(k: int) -> Callable[[np.ndarray], complex]:
    """k-th sample moment (1/M) sum x_i^k as an orbit statistic."""
    def f(v: np.ndarray):
        return complex(np.mean(v ** k))
    return f


def effective_group_order(
    statistic: Union[str, Callable[[np.ndarray], object]],
    group: GroupRep,
    x: Observation,
    rel_tol: float = 1e-9,
) -> int:
    """Number of distinct values the statistic takes on the group orbit.

    ``statistic`` is "outer" for the outer product, an integer-parameterized
    callable for anything else (see moment_statistic). Values are compared
    with relative tolerance.
    """
    orbit = _orbit(x, group)
    if statistic == "outer":
        values = [np.outer(row, row.conj()) for row in orbit]
        scale = max(x.norm_sq(), 1e-300)
        def same(a, b):
            return np.max(np.abs(a - b)) <= rel_tol * scale
    else:
        values = [np.atleast_1d(np.asarray(statistic(row))) for row in orbit]
        scale = max(max(float(np.max(np.abs(v))) for v in values), 1e-300)
        def same(a, b):
            return np.max(np.abs(a - b)) <= rel_tol * scale
    reps = []
    for v in values:
        if not any(same(v, r) for r in reps):
            reps.append(v)
    return len(reps)
