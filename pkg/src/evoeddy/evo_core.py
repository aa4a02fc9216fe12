"""Causal solver for first-order evolution systems (d0 M0 + M1 + A) U = F.

Well-posedness is certified before any time stepping: the smallest
eigenvalue of the symmetric part of rho*M0 + M1 + A must be positive.  In
finite dimensions the matching condition on the adjoint system holds
automatically, because the symmetric part of a matrix and of its transpose
coincide; ``certify_positivity`` records that equivalence in its report.

Time stepping is backward Euler with zero history.  The per-step matrix
M0/dt + M1 + A is constant (autonomous material law), so it is factorized
once and reused; its symmetric part dominates the certified constant
whenever dt <= 1/rho, which the grid enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .weighted_time import TimeSignal, truncate, weighted_norm

__all__ = ["EvoProblem", "certify_positivity", "solve", "causal_bound_check"]


def _to_operator(M, d: int):
    if scipy.sparse.issparse(M):
        M = M.tocsr()
        if M.shape != (d, d):
            raise ValueError(f"operator must be {d} x {d}, got {M.shape}")
        return M
    M = np.asarray(M, dtype=float)
    if M.shape != (d, d):
        raise ValueError(f"operator must be {d} x {d}, got {M.shape}")
    return M


def _dense(M) -> np.ndarray:
    return M.toarray() if scipy.sparse.issparse(M) else np.asarray(M, dtype=float)


def _opnorm(M) -> float:
    dense = _dense(M)
    return float(np.linalg.norm(dense, ord=2)) if dense.size else 0.0


@dataclass
class EvoProblem:
    """Problem data (M0, M1, A) with weight rho and certified constant c0.

    M0 must be symmetric positive semidefinite.  ``c0`` stays None until
    :func:`certify_positivity` succeeds.
    """

    M0: object
    M1: object
    A: object
    rho: float
    c0: float | None = None
    report: dict = field(default_factory=dict)

    def __post_init__(self):
        M0 = _dense(self.M0)
        if M0.ndim != 2 or M0.shape[0] != M0.shape[1]:
            raise ValueError("M0 must be square")
        d = M0.shape[0]
        self.M0 = _to_operator(self.M0, d)
        self.M1 = _to_operator(self.M1, d)
        self.A = _to_operator(self.A, d)
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        scale = max(_opnorm(self.M0), 1.0)
        if np.linalg.norm(M0 - M0.T, ord=2) > 1e-12 * scale:
            raise ValueError("M0 must be symmetric")
        if float(np.linalg.eigvalsh(0.5 * (M0 + M0.T))[0]) < -1e-12 * scale:
            raise ValueError("M0 must be positive semidefinite")

    @property
    def dim(self) -> int:
        return _dense(self.M0).shape[0]

    def step_matrix(self, dt: float):
        return self.M0 / dt + self.M1 + self.A


def certify_positivity(problem: EvoProblem) -> float:
    """Certify rho*M0 + M1 + A to be uniformly positive definite.

    Returns and stores c0 = lambda_min(sym(rho*M0 + M1 + A)).  Raises if the
    value is not positive: then the hypotheses of the causal well-posedness
    theorem fail and the solver must not run.
    """
    S = _dense(problem.rho * _dense(problem.M0) + _dense(problem.M1) + _dense(problem.A))
    c0 = float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])
    if c0 <= 0.0:
        raise ValueError(
            f"not uniformly positive (lambda_min = {c0:.3e}): "
            "causal well-posedness hypotheses fail"
        )
    problem.c0 = c0
    problem.report = {
        "c0": c0,
        # sym(X^T) = sym(X), so the adjoint-side lower bound is the same
        # number; no separate certification is needed in finite dimensions.
        "adjoint_condition": "equivalent by symmetry of the symmetric part",
    }
    return c0


class _StepSolver:
    """One-time factorization of the constant per-step matrix."""

    def __init__(self, matrix):
        if scipy.sparse.issparse(matrix):
            self._lu = scipy.sparse.linalg.splu(matrix.tocsc())
            self._solve = self._lu.solve
        else:
            lu, piv = scipy.linalg.lu_factor(np.asarray(matrix, dtype=float))
            self._solve = lambda b: scipy.linalg.lu_solve((lu, piv), b)

    def __call__(self, rhs: np.ndarray) -> np.ndarray:
        return self._solve(rhs)


def solve(problem: EvoProblem, F: TimeSignal) -> TimeSignal:
    """Backward-Euler time stepping (M0/dt + M1 + A) U_n = F_n + (M0/dt) U_{n-1}.

    Requires a prior successful :func:`certify_positivity` and a grid with
    dt <= 1/rho (then the per-step symmetric part dominates c0, so each step
    is solvable).  Causal by construction: U_n depends on F_0..F_n only.
    """
    if problem.c0 is None:
        raise ValueError("problem not certified; run certify_positivity first")
    grid = F.grid
    if F.dim != problem.dim:
        raise ValueError(f"signal dimension {F.dim} != operator dimension {problem.dim}")
    if grid.dt > 1.0 / problem.rho + 1e-15:
        raise ValueError(f"grid dt = {grid.dt:g} violates dt <= 1/rho = {1.0 / problem.rho:g}")
    if abs(grid.rho - problem.rho) > 1e-12 * max(problem.rho, 1.0):
        raise ValueError("grid weight rho differs from the certified problem rho")

    step = _StepSolver(problem.step_matrix(grid.dt))
    M0 = problem.M0
    out = np.zeros_like(F.values)
    u_prev = np.zeros(problem.dim)
    for n in range(grid.num_nodes):
        rhs = F.values[n] + (M0 @ u_prev) / grid.dt
        u_prev = step(rhs)
        out[n] = u_prev
    return TimeSignal(grid, out)


def causal_bound_check(
    problem: EvoProblem, F: TimeSignal, a: float, U: TimeSignal | None = None
):
    """Evaluate both sides of the truncated a-priori estimate at cut time a.

    Returns (lhs, rhs, passed) with lhs = |truncate(U, a)|, rhs =
    (1/c0) |truncate(F, a)| and passed iff lhs <= rhs * (1 + 10*dt*rho);
    the slack covers the backward-Euler quadrature drift of the continuous
    estimate.
    """
    if U is None:
        U = solve(problem, F)
    lhs = weighted_norm(truncate(U, a))
    rhs = weighted_norm(truncate(F, a)) / problem.c0
    slack = 10.0 * F.grid.dt * problem.rho
    return lhs, rhs, bool(lhs <= rhs * (1.0 + slack) + 1e-300)
