"""Numerically robust subspace algebra on finite-dimensional state spaces.

Every subspace is stored as a matrix with orthonormal columns.  Rank
decisions use a relative singular-value cutoff tol * smax, the standard
robust replacement for closed-range hypotheses, which hold automatically in
finite dimensions.  Subspaces are compared through principal angles, never
through their (non-unique) bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "Subspace",
    "DecompositionReport",
    "kernel",
    "column_space",
    "intersect",
    "complement",
    "subtract",
    "three_way_decompose",
    "project",
    "subspace_gap",
    "DEFAULT_TOL",
    "MAX_DENSE_DIM",
]

DEFAULT_TOL = 1e-10
# Dense factorizations are a one-time setup cost; cap the ambient size so a
# misconfigured run fails fast instead of thrashing.
MAX_DENSE_DIM = 20000


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by an orthonormal basis (columns)."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis must be {self.ambient_dim} x r, got shape {basis.shape}"
            )
        r = basis.shape[1]
        if r > self.ambient_dim:
            raise ValueError("subspace dimension exceeds ambient dimension")
        if r > 0:
            gram_defect = np.linalg.norm(basis.T @ basis - np.eye(r), ord=2)
            if gram_defect > 1e-12:
                raise ValueError(f"basis not orthonormal (defect {gram_defect:.2e})")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))

    @classmethod
    def from_spanning(cls, vectors: np.ndarray, tol: float = DEFAULT_TOL) -> "Subspace":
        """Orthonormalize a (possibly rank-deficient) spanning set."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        return column_space(vectors, tol)


@dataclass(frozen=True)
class DecompositionReport:
    """Orthogonal split of a space, with measured quality numbers.

    ``pairwise_overlaps[i, j]`` is the largest singular value of the cross
    Gram matrix between the bases of parts i and j (zero for a clean split),
    and ``reconstruction_defect`` is the spectral-norm distance between the
    sum of the part projectors and the projector of the decomposed space.
    """

    parts: tuple
    pairwise_overlaps: np.ndarray = field(repr=False)
    reconstruction_defect: float = 0.0

    @property
    def dims(self) -> tuple:
        return tuple(p.dim for p in self.parts)

    def max_overlap(self) -> float:
        n = len(self.parts)
        if n < 2:
            return 0.0
        off = self.pairwise_overlaps - np.diag(np.diag(self.pairwise_overlaps))
        return float(np.max(np.abs(off)))


def _as_dense(A) -> np.ndarray:
    if hasattr(A, "toarray"):
        A = A.toarray()
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise ValueError(f"expected a nonempty matrix, got shape {getattr(A, 'shape', None)}")
    if max(A.shape) > MAX_DENSE_DIM:
        raise ValueError(
            f"matrix of shape {A.shape} exceeds the dense-factorization cap {MAX_DENSE_DIM}"
        )
    return A


def kernel(A, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the numerical null space of A.

    Uses the SVD with a relative cutoff: directions with singular value
    <= tol * smax count as null.
    """
    A = _as_dense(A)
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0.0 else 0
    return Subspace(A.shape[1], vt[rank:].T.copy())


def column_space(A, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the (numerical) range of A."""
    A = _as_dense(A)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0.0 else 0
    return Subspace(A.shape[0], u[:, :rank].copy())


def complement(U: Subspace) -> Subspace:
    """Orthonormal basis of the orthogonal complement of U."""
    if U.dim == 0:
        return Subspace.full(U.ambient_dim)
    if U.dim == U.ambient_dim:
        return Subspace.zero(U.ambient_dim)
    return Subspace(U.ambient_dim, scipy.linalg.null_space(U.basis.T))


def intersect(U: Subspace, V: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the intersection of U and V.

    Computed as the joint null space of the two complementary projectors:
    x is in both subspaces iff (I - P_U)x = 0 and (I - P_V)x = 0.
    """
    if U.ambient_dim != V.ambient_dim:
        raise ValueError(
            f"ambient dimension mismatch: {U.ambient_dim} vs {V.ambient_dim}"
        )
    d = U.ambient_dim
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(d)
    eye = np.eye(d)
    stacked = np.vstack([eye - U.basis @ U.basis.T, eye - V.basis @ V.basis.T])
    return kernel(stacked, tol)


def subtract(U: Subspace, V: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthogonal difference U minus V: the part of U orthogonal to V."""
    return intersect(U, complement(V), tol)


def project(U: Subspace, x: np.ndarray) -> np.ndarray:
    """Orthogonal projection basis @ (basis^T @ x); idempotent, self-adjoint."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != U.ambient_dim:
        raise ValueError(f"vector of length {x.shape[0]} in ambient dim {U.ambient_dim}")
    return U.basis @ (U.basis.T @ x)


def subspace_gap(U: Subspace, V: Subspace) -> float:
    """Spectral-norm distance between the projectors of U and V.

    Equals the sine of the largest principal angle when the dimensions
    agree, and 1 when they differ.
    """
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    pu = U.basis @ U.basis.T
    pv = V.basis @ V.basis.T
    return float(np.linalg.norm(pu - pv, ord=2))


def _check_sym_psd(eta: np.ndarray, tol: float) -> None:
    scale = np.linalg.norm(eta, ord=2)
    sym_defect = np.linalg.norm(eta - eta.T, ord=2)
    if sym_defect > tol * max(scale, 1.0):
        raise ValueError(f"matrix not symmetric (defect {sym_defect:.2e})")
    lmin = float(np.linalg.eigvalsh(0.5 * (eta + eta.T))[0])
    if lmin < -tol * max(scale, 1.0):
        raise ValueError(f"matrix not positive semidefinite (lambda_min {lmin:.2e})")


def three_way_decompose(C, eta, tol: float = DEFAULT_TOL) -> DecompositionReport:
    """Split H0 = (N(eta) ∩ N(C))^perp into three orthogonal parts.

    Returns (R(C^T), N(C) ∩ R(eta), remainder), where the remainder is the
    part of N(C) ∩ H0 orthogonal to N(C) ∩ R(eta).  eta must be symmetric
    positive semidefinite; its range equals the complement of its kernel.
    """
    C = _as_dense(C)
    eta = _as_dense(eta)
    if eta.shape[0] != eta.shape[1] or eta.shape[0] != C.shape[1]:
        raise ValueError(
            f"incompatible shapes: C is {C.shape}, eta is {eta.shape}"
        )
    _check_sym_psd(eta, tol)

    ker_c = kernel(C, tol)
    ker_eta = kernel(eta, tol)
    h0 = complement(intersect(ker_eta, ker_c, tol))

    part_range = column_space(C.T, tol)
    part_eta = intersect(ker_c, complement(ker_eta), tol)
    part_rest = subtract(intersect(ker_c, h0, tol), part_eta, tol)

    parts = (part_range, part_eta, part_rest)
    n = len(parts)
    overlaps = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if parts[i].dim == 0 or parts[j].dim == 0:
                continue
            cross = parts[i].basis.T @ parts[j].basis
            overlaps[i, j] = np.linalg.norm(cross, ord=2)

    p_sum = sum(p.basis @ p.basis.T for p in parts)
    p_h0 = h0.basis @ h0.basis.T
    defect = float(np.linalg.norm(p_sum - p_h0, ord=2))
    return DecompositionReport(parts, overlaps, defect)
