"""Graph symmetry discovery through commutativity residuals.

Graph structures and diffusion covariance, the brute-force automorphism
oracle, the delta-based automorphism test, the n = 6 enumeration and
filtering pipeline, the commutator-Gram GEVP with Hungarian rounding, and
the Sequential GEVP with group-theoretic deflation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .groups import DEFAULT_CLOSURE_CAP, GroupKind, GroupRep, Permutation, closure
from .metrics import commut_residual

DELTA_ACCEPT_DEFAULT = 1e-8
DEFLATION_DROP_TOL = 1e-10


class GraphError(ValueError):
    """Invalid graph input."""


class GevpError(ValueError):
    """Invalid GEVP input (empty or dependent basis)."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph as a symmetric 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=np.int8)
        object.__setattr__(self, "adjacency", a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError("adjacency must be square")
        if not np.array_equal(a, a.T) or np.any(np.diag(a) != 0):
            raise GraphError("adjacency must be symmetric with zero diagonal")
        if not np.all((a == 0) | (a == 1)):
            raise GraphError("adjacency entries must be 0/1")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @staticmethod
    def from_edges(n: int, edges: Sequence[Tuple[int, int]]) -> "Graph":
        a = np.zeros((n, n), dtype=np.int8)
        for u, v in edges:
            if u == v:
                raise GraphError("no self-loops")
            a[u, v] = a[v, u] = 1
        return Graph(a)

    def edges(self) -> list:
        iu, ju = np.triu_indices(self.n, k=1)
        mask = self.adjacency[iu, ju] == 1
        return list(zip(iu[mask].tolist(), ju[mask].tolist()))

    def is_connected(self) -> bool:
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.flatnonzero(self.adjacency[u]):
                    if int(v) not in seen:
                        seen.add(int(v))
                        nxt.append(int(v))
            frontier = nxt
        return len(seen) == self.n


def read_edge_list(text: str, n: Optional[int] = None) -> Graph:
    """Parse a plain-text edge list, one "u v" pair per line, 0-indexed."""
    edges = []
    top = -1
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = (int(t) for t in line.split())
        edges.append((u, v))
        top = max(top, u, v)
    return Graph.from_edges(n if n is not None else top + 1, edges)


def write_edge_list(g: Graph) -> str:
    return "\n".join(f"{u} {v}" for u, v in g.edges()) + "\n"


# named graphs used by the experiments

def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def prism_graph() -> Graph:
    """Triangular prism: two triangles joined by a perfect matching."""
    return Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def kite_tail_graph() -> Graph:
    """K4 clique on {0,1,2,3} with a pendant path 0-4-5 (the C5 candidate)."""
    return Graph.from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (4, 5)])


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian: degree matrix minus adjacency (PSD)."""
    a = g.adjacency.astype(float)
    return np.diag(a.sum(axis=1)) - a


def diffusion_cov(g: Graph, alpha: float = 1.0) -> np.ndarray:
    """Diffusion kernel (I + alpha L)^(-1): positive definite, shares L's eigenvectors."""
    if alpha <= 0:
        raise GraphError("alpha must be positive")
    n = g.n
    return np.linalg.inv(np.eye(n) + alpha * laplacian(g))


def has_distinct_spectrum(r: np.ndarray, gap_tol: float = 1e-9) -> bool:
    w = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(np.all(np.diff(np.sort(w)) > gap_tol * scale))


def _perm_arrays(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def automorphism_maps(g: Graph) -> np.ndarray:
    """All vertex maps p with A[p][:, p] == A, as an array (count, n)."""
    if g.n > 8:
        raise GraphError("brute-force automorphisms capped at n = 8")
    perms = _perm_arrays(g.n)
    a = g.adjacency
    keep = []
    for p in perms:
        if np.array_equal(a[np.ix_(p, p)], a):
            keep.append(p)
    return np.array(keep, dtype=np.intp)


def brute_aut_group(g: Graph) -> GroupRep:
    """Explicit automorphism group of a small graph (n <= 8)."""
    maps = automorphism_maps(g)
    ident = Permutation.identity(g.n)
    elements = [ident] + [Permutation(p) for p in maps if not np.array_equal(p, ident.map)]
    return GroupRep(GroupKind.CUSTOM, g.n, elements)


def delta_aut_test(sigma: Permutation, r: np.ndarray, tol: float = 1e-10) -> Tuple[float, bool]:
    """Commutativity residual of P_sigma against R and the delta <= tol verdict."""
    delta = commut_residual(sigma.matrix(), r)
    return delta, bool(delta <= tol)


# ---------------------------------------------------------------------------
# n = 6 enumeration and the seven-stage filtering pipeline


_PAIRS6 = list(itertools.combinations(range(6), 2))
_PAIR_INDEX6 = {p: i for i, p in enumerate(_PAIRS6)}


def _canonical_forms_all6() -> Tuple[np.ndarray, np.ndarray]:
    """Canonical form (min bitstring over all 720 relabelings) per labeled graph."""
    n_graphs = 1 << 15
    perms = _perm_arrays(6)
    ids = np.arange(n_graphs, dtype=np.int64)
    bits = (ids[:, None] >> np.arange(15)[None, :]) & 1  # (32768, 15)
    powers = (1 << np.arange(15)).astype(np.int64)
    canon = np.full(n_graphs, np.iinfo(np.int64).max, dtype=np.int64)
    for p in perms:
        # bit e of the relabeled graph comes from the preimage edge slot
        src = np.empty(15, dtype=np.intp)
        for e, (u, v) in enumerate(_PAIRS6):
            uu, vv = int(p[u]), int(p[v])
            src[e] = _PAIR_INDEX6[(uu, vv) if uu < vv else (vv, uu)]
        packed = bits[:, src].astype(np.int64) @ powers
        np.minimum(canon, packed, out=canon)
    return ids, canon


def graph_from_id(graph_id: int) -> Graph:
    a = np.zeros((6, 6), dtype=np.int8)
    for e, (u, v) in enumerate(_PAIRS6):
        if (graph_id >> e) & 1:
            a[u, v] = a[v, u] = 1
    return Graph(a)


def graph_to_id(g: Graph) -> int:
    if g.n != 6:
        raise GraphError("id encoding is for n = 6")
    gid = 0
    for e, (u, v) in enumerate(_PAIRS6):
        if g.adjacency[u, v]:
            gid |= 1 << e
    return gid


def canonical_id(g: Graph) -> int:
    """Minimum adjacency bitstring over all 720 vertex relabelings (n = 6)."""
    gid = graph_to_id(g)
    best = gid
    for p in _perm_arrays(6):
        permuted = 0
        for e, (u, v) in enumerate(_PAIRS6):
            if (gid >> e) & 1:
                uu, vv = int(p[u]), int(p[v])
                permuted |= 1 << _PAIR_INDEX6[(uu, vv) if uu < vv else (vv, uu)]
        best = min(best, permuted)
    return best


def enumerate_graphs() -> list:
    """All non-isomorphic graphs on 6 vertices (exactly 156 classes)."""
    _, canon = _canonical_forms_all6()
    reps = np.unique(canon)
    return [graph_from_id(int(c)) for c in reps]


def _is_abelian(maps: np.ndarray) -> bool:
    for p in maps:
        for q in maps:
            if not np.array_equal(p[q], q[p]):
                return False
    return True


def _circulant_ids6() -> set:
    """Canonical ids of all circulant graphs on 6 vertices."""
    out = set()
    for s in range(8):  # connection subsets of {1, 2, 3}
        conn = {k + 1 for k in range(3) if (s >> k) & 1}
        edges = []
        for i in range(6):
            for c in conn:
                j = (i + c) % 6
                if i < j:
                    edges.append((i, j))
                elif j < i:
                    edges.append((j, i))
        g = Graph.from_edges(6, sorted(set(edges)))
        out.add(canonical_id(g))
    return out


def _circulant_spectra6() -> list:
    spectra = []
    for cid in _circulant_ids6():
        g = graph_from_id(cid)
        spectra.append(tuple(np.round(np.linalg.eigvalsh(g.adjacency.astype(float)), 6)))
    return spectra


@dataclass
class PipelineResult:
    stages: list  # (stage name, count)
    survivors: list  # Graph


def filter_pipeline(graphs: Optional[Sequence[Graph]] = None) -> PipelineResult:
    """Seven-stage reduction of the 156 classes to the S3-automorphism seven.

    Stages: connected; nontrivial automorphisms; |Aut| divisible by 6;
    non-abelian; not circulant; not cospectral with a circulant; |Aut| = 6.
    """
    if graphs is None:
        graphs = enumerate_graphs()
    stages = [("all", len(graphs))]
    pool = [g for g in graphs if g.is_connected()]
    stages.append(("connected", len(pool)))
    pool = [(g, automorphism_maps(g)) for g in pool]
    pool = [(g, a) for g, a in pool if len(a) > 1]
    stages.append(("nontrivial_aut", len(pool)))
    pool = [(g, a) for g, a in pool if len(a) % 6 == 0]
    stages.append(("aut_divisible_by_6", len(pool)))
    pool = [(g, a) for g, a in pool if not _is_abelian(a)]
    stages.append(("nonabelian_aut", len(pool)))
    circ_ids = _circulant_ids6()
    pool = [(g, a) for g, a in pool if canonical_id(g) not in circ_ids]
    stages.append(("not_circulant", len(pool)))
    circ_spectra = _circulant_spectra6()
    def spectrum(g):
        return tuple(np.round(np.linalg.eigvalsh(g.adjacency.astype(float)), 6))
    pool = [(g, a) for g, a in pool if spectrum(g) not in circ_spectra]
    stages.append(("not_cospectral_circulant", len(pool)))
    pool = [(g, a) for g, a in pool if len(a) == 6]
    stages.append(("aut_order_6", len(pool)))
    return PipelineResult(stages=stages, survivors=[g for g, _ in pool])


# ---------------------------------------------------------------------------
# Commutator-Gram GEVP, Hungarian rounding, Sequential GEVP


def _vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=float).ravel()


def _frob_gram(mats: Sequence[np.ndarray]) -> np.ndarray:
    v = np.stack([_vec(m) for m in mats])
    return v @ v.T


def dc_gevp(r: np.ndarray, basis: Sequence[np.ndarray]) -> Tuple[np.ndarray, float]:
    """Minimize ||[A, R]||_F^2 over unit-Frobenius A in span(basis).

    Solves the generalized eigenproblem with quadratic form
    C[i,j] = <[B_i, R], [B_j, R]> and Gram N[i,j] = <B_i, B_j>; returns the
    minimizing combination (unit Frobenius norm) and its commutator energy.
    """
    if len(basis) == 0:
        raise GevpError("empty basis")
    r = np.asarray(r, dtype=float)
    comms = [b @ r - r @ b for b in basis]
    c = _frob_gram(comms)
    n = _frob_gram(basis)
    cond = np.linalg.cond(n)
    if not np.isfinite(cond) or cond > 1e12:
        raise GevpError("dependent basis: singular Frobenius Gram")
    w, y = scipy.linalg.eigh(c, n)
    coeffs = y[:, 0]
    a_star = sum(co * b for co, b in zip(coeffs, basis))
    a_star = a_star / np.linalg.norm(a_star)
    return a_star, float(max(w[0], 0.0))


def hungarian_round(a: np.ndarray) -> Permutation:
    """Permutation maximizing sum_i A[i, sigma(i)].

    Ties resolve toward the smallest-index assignment (lexicographically
    smallest map), implemented with an infinitesimal per-cell bias.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise GevpError("cost matrix must be finite")
    m = a.shape[0]
    scale = float(np.max(np.abs(a))) + 1.0
    if m <= 12:
        cols = np.arange(m, dtype=float)
        weights = (m + 1.0) ** -np.arange(m, dtype=float)
        bias = 1e-9 * scale / m * np.outer(weights, cols)
    else:
        bias = 0.0
    _, col = linear_sum_assignment(-a + bias)
    return Permutation(col)


@dataclass
class IterationRecord:
    iteration: int
    candidate: Optional[tuple]
    delta: Optional[float]
    lambda_min: Optional[float]
    accepted: bool
    group_order: int
    reason: str = ""


@dataclass
class SubgroupResult:
    """Sequential GEVP output: generators found, closure, and the full trace."""

    accepted: list
    elements: list
    trace: list
    iterations: int

    @property
    def order(self) -> int:
        return len(self.elements)


def _deflated_subspace(basis_vecs: np.ndarray, perm_vecs: np.ndarray) -> np.ndarray:
    """Coefficient basis of the orthocomplement of the perm span within span(B).

    Returns W (d x s): columns are coefficient vectors c with
    <sum_i c_i B_i, P_g> = 0 for every g.
    """
    q = scipy.linalg.orth(perm_vecs.T, rcond=1e-12)  # (M^2, r)
    constraints = q.T @ basis_vecs.T  # (r, d)
    return scipy.linalg.null_space(constraints, rcond=DEFLATION_DROP_TOL)


def sequential_gevp(
    r: np.ndarray,
    basis: Sequence[np.ndarray],
    tau: float = DELTA_ACCEPT_DEFAULT,
    k_max: int = 32,
    closure_cap: int = DEFAULT_CLOSURE_CAP,
) -> SubgroupResult:
    """Sequential GEVP with group-theoretic deflation.

    Repeats: deflate the basis span against span{P_g : g in G_k}, solve the
    commutator-Gram GEVP on the deflated subspace, Hungarian-round the
    minimizing direction, accept the rounded permutation iff its residual
    delta is at most tau, and extend the subgroup by closure. Degenerate
    GEVP minima resolve deterministically toward the first basis element
    with a nonzero projection onto the minimal eigenspace.
    """
    if tau < 0 or k_max < 1:
        raise GevpError("tau must be >= 0 and k_max >= 1")
    r = np.asarray(r, dtype=float)
    m = r.shape[0]
    basis = [np.asarray(b, dtype=float) for b in basis]
    if not basis:
        raise GevpError("empty basis")
    basis_vecs = np.stack([_vec(b) for b in basis])  # (d, M^2)
    n_gram = basis_vecs @ basis_vecs.T
    comms = [b @ r - r @ b for b in basis]
    c_gram = _frob_gram(comms)
    r_scale = float(np.linalg.norm(r)) ** 2

    ident = Permutation.identity(m)
    group = closure([ident], cap=closure_cap)
    accepted: list = []
    trace: list = []
    for it in range(1, k_max + 1):
        perm_vecs = np.stack([_vec(e.matrix()) for e in group.elements])
        w = _deflated_subspace(basis_vecs, perm_vecs)
        if w.shape[1] == 0:
            trace.append(IterationRecord(it, None, None, None, False, group.order,
                                         reason="deflated basis empty"))
            break
        # whiten the Frobenius Gram on the subspace, pruning dependent
        # directions (linearly dependent basis combinations)
        n_sub = w.T @ n_gram @ w
        ew, ev = np.linalg.eigh(n_sub)
        keep = ew > DEFLATION_DROP_TOL * max(float(ew[-1]), 1e-300)
        if not np.any(keep):
            trace.append(IterationRecord(it, None, None, None, False, group.order,
                                         reason="deflated basis empty"))
            break
        w = w @ (ev[:, keep] / np.sqrt(ew[keep]))  # now W^T N W = I
        c_sub = w.T @ c_gram @ w
        lam, y = np.linalg.eigh(0.5 * (c_sub + c_sub.T))
        lam_min = float(max(lam[0], 0.0))
        tol_deg = 1e-10 * max(r_scale, 1.0)
        e_dim = int(np.sum(lam <= lam[0] + tol_deg))
        y_min = y[:, :e_dim]  # Frobenius-orthonormal eigenbasis of the minimal eigenspace
        # project each original basis element onto the minimal eigenspace and
        # take the first with nonzero projection (deterministic degeneracy break)
        gamma_all = y_min.T @ (w.T @ n_gram)  # (e_dim, d): <A_e, B_i>
        coeffs = None
        for i in range(len(basis)):
            gamma = gamma_all[:, i]
            if np.linalg.norm(gamma) > 1e-8 * np.linalg.norm(basis[i]):
                coeffs = (w @ y_min) @ gamma
                break
        if coeffs is None:
            coeffs = (w @ y_min)[:, 0]
        a_star = np.tensordot(coeffs, np.stack(basis), axes=(0, 0))
        a_star /= np.linalg.norm(a_star)
        sigma = hungarian_round(a_star)
        delta = commut_residual(sigma.matrix(), r)
        if delta > tau:
            trace.append(IterationRecord(it, sigma.key(), delta, lam_min, False, group.order,
                                         reason="delta above threshold"))
            break
        accepted.append(sigma)
        group = closure(accepted, cap=closure_cap)
        trace.append(IterationRecord(it, sigma.key(), delta, lam_min, True, group.order))
    return SubgroupResult(accepted=accepted, elements=list(group.elements),
                          trace=trace, iterations=len(trace))


def generic_gevp_basis(n: int) -> list:
    """The five generic permutation-difference generators P - I.

    Cyclic shift, reflection, a transposition, the half-block swap, and a
    3-cycle: chosen without knowledge of any particular graph.
    """
    eye = np.eye(n)
    perms = [
        Permutation.shift(n, 1),
        Permutation((n - 1 - np.arange(n)) % n),
        Permutation.swap(n, 0, 1),
        Permutation(np.roll(np.arange(n), n // 2)),
        Permutation(np.array([1, 2, 0] + list(range(3, n)))),
    ]
    out = []
    seen = set()
    for p in perms:
        if p.key() in seen or p.is_identity():
            continue
        seen.add(p.key())
        out.append(p.matrix() - eye)
    return out
