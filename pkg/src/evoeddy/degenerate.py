"""Reduction and solution of degenerate systems (d0 eta + C* C) U = F.

The coefficient eta may vanish on part of the state space.  Directions in
N(eta) ∩ N(C) are invisible to the equation, so the problem is reduced to
their orthogonal complement H0 and solved there.  The reduction is certified
by the coercivity constant c1 = lambda_min(eta0 + C0* C0) > 0, which is the
sharp constant of the pointwise form of the required lower bound.

The square root of eta is never formed: every quadratic form is evaluated
as <U | eta U>.  An optional symmetric positive definite ``gram`` weight on
the target space turns C* into C^T gram without ever forming gram^{1/2},
which is how a non-unit permeability enters downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from . import subspaces as ss
from .evo_core import EvoProblem, certify_positivity
from .evo_core import solve as evo_solve
from .weighted_time import (
    TimeSignal,
    WeightedTimeGrid,
    d0,
    d0_inverse,
    weighted_inner,
    weighted_norm,
)

__all__ = [
    "DegenerateProblem",
    "build",
    "solve_reduced",
    "recover_pair",
    "energy_balance",
    "regularity_bound_check",
    "check_spacetime_equivalence",
    "bidomain_problem",
    "grad_no_bc",
    "mean_zero_poincare",
]

H0_MEMBERSHIP_TOL = 1e-10


def _dense(M):
    return M.toarray() if scipy.sparse.issparse(M) else np.asarray(M, dtype=float)


@dataclass
class DegenerateProblem:
    """Reduced problem data.

    ``h0`` carries the effective state space; ``eta0`` and ``quad0`` are the
    reduced mass form and the reduced stiffness form C0^T gram C0, both in
    H0 coordinates.  ``decomposition`` splits H0 into (R(C^T),
    N(C) ∩ R(eta), remainder); the remainder part is the subtle one and is
    kept around for the restriction-operator estimates downstream.
    """

    eta: np.ndarray
    C: np.ndarray
    gram: np.ndarray | None
    h0: ss.Subspace
    eta0: np.ndarray
    C0: np.ndarray
    quad0: np.ndarray
    c1: float
    decomposition: ss.DecompositionReport
    eta_preserves_range: bool
    tol: float

    @property
    def ambient_dim(self) -> int:
        return self.eta.shape[0]

    @property
    def reduced_dim(self) -> int:
        return self.h0.dim

    def adjoint_apply(self, Y: np.ndarray) -> np.ndarray:
        """C* y for columns of Y, i.e. C^T gram Y."""
        return self.C.T @ (Y if self.gram is None else self.gram @ Y)

    def reduce_signal(self, F: TimeSignal, what: str = "F") -> TimeSignal:
        """Coordinates of an H0-valued ambient signal; rejects stray components."""
        coords = F.values @ self.h0.basis
        lifted = coords @ self.h0.basis.T
        defect = np.linalg.norm(F.values - lifted)
        scale = max(np.linalg.norm(F.values), 1e-300)
        if defect > H0_MEMBERSHIP_TOL * scale:
            raise ValueError(
                f"{what} is not valued in the reduced state space "
                f"(relative defect {defect / scale:.3e}); project it first"
            )
        return TimeSignal(F.grid, coords)

    def lift_signal(self, U: TimeSignal) -> TimeSignal:
        return TimeSignal(U.grid, U.values @ self.h0.basis.T)


def build(eta, C, tol: float = 1e-10, gram=None) -> DegenerateProblem:
    """Construct the reduction of (d0 eta + C* C) U = F and certify it.

    eta must be symmetric positive semidefinite.  Fails when the certified
    constant c1 = lambda_min(eta0 + C0^T gram C0) does not exceed tol: the
    system is then degenerate beyond what the reduction can repair.
    """
    eta = _dense(eta)
    C = _dense(C)
    gram_d = None if gram is None else _dense(gram)
    if eta.shape[0] != eta.shape[1] or C.shape[1] != eta.shape[0]:
        raise ValueError(f"incompatible shapes: eta {eta.shape}, C {C.shape}")

    decomposition = ss.three_way_decompose(C, eta, tol)
    h0 = ss.complement(ss.intersect(ss.kernel(eta, tol), ss.kernel(C, tol), tol))
    if h0.dim == 0:
        raise ValueError(
            "degenerate beyond the reduced state space: eta and C share a "
            "full common kernel"
        )

    iota = h0.basis
    eta0 = iota.T @ eta @ iota
    eta0 = 0.5 * (eta0 + eta0.T)
    C0 = C @ iota
    quad0 = C0.T @ (C0 if gram_d is None else gram_d @ C0)
    quad0 = 0.5 * (quad0 + quad0.T)

    c1 = float(np.linalg.eigvalsh(eta0 + quad0)[0])
    if c1 <= tol:
        raise ValueError(
            f"degenerate beyond the reduced state space: coercivity constant "
            f"{c1:.3e} <= tol {tol:.1e}"
        )

    range_part = decomposition.parts[0]
    if range_part.dim:
        mapped = eta @ range_part.basis
        defect = np.linalg.norm(mapped - ss.project(range_part, mapped))
        preserves = bool(defect <= tol * max(np.linalg.norm(mapped), 1.0))
    else:
        preserves = True

    return DegenerateProblem(
        eta=eta,
        C=C,
        gram=gram_d,
        h0=h0,
        eta0=eta0,
        C0=C0,
        quad0=quad0,
        c1=c1,
        decomposition=decomposition,
        eta_preserves_range=preserves,
        tol=tol,
    )


def solve_reduced(problem: DegenerateProblem, F: TimeSignal) -> TimeSignal:
    """Solve the reduced system; F must be H0-valued (ambient coordinates).

    Returns U in H0 coordinates.  The positivity certificate follows from
    c1 because rho*eta0 + quad0 dominates min(rho, 1) * (eta0 + quad0).
    """
    f_red = problem.reduce_signal(F)
    evo = EvoProblem(
        M0=problem.eta0,
        M1=np.zeros_like(problem.eta0),
        A=problem.quad0,
        rho=F.grid.rho,
    )
    certify_positivity(evo)
    return evo_solve(evo, f_red)


def recover_pair(problem: DegenerateProblem, U: TimeSignal, F: TimeSignal):
    """Rebuild the first-order pair from the reduced solution.

    V = -C d0^{-1}(lift U) together with U satisfies

        d0 V + C U            = 0,
        eta U - C* V - d0^{-1} F = 0,

    both as algebraic consequences of the stepping scheme; the returned
    residual norms measure only solver round-off.
    """
    u_amb = problem.lift_signal(U)
    cu = TimeSignal(U.grid, u_amb.values @ problem.C.T)
    V = TimeSignal(U.grid, -d0_inverse(u_amb).values @ problem.C.T)

    res1 = d0(V) + cu
    gram = problem.gram
    if gram is None:
        res1_norm = weighted_norm(res1)
        scale1 = max(weighted_norm(cu), 1e-300)
    else:
        wv = res1.values @ gram
        res1_norm = float(
            np.sqrt(
                max(
                    U.grid.dt
                    * np.sum(
                        U.grid.weights * np.einsum("nd,nd->n", res1.values, wv)
                    ),
                    0.0,
                )
            )
        )
        cu_w = cu.values @ gram
        scale1 = max(
            float(
                np.sqrt(
                    max(
                        U.grid.dt
                        * np.sum(U.grid.weights * np.einsum("nd,nd->n", cu.values, cu_w)),
                        0.0,
                    )
                )
            ),
            1e-300,
        )

    eta_u = TimeSignal(U.grid, u_amb.values @ problem.eta.T)
    cstar_v = TimeSignal(U.grid, problem.adjoint_apply(V.values.T).T)
    f_int = d0_inverse(F)
    res2 = eta_u - cstar_v - f_int
    scale2 = max(weighted_norm(eta_u), weighted_norm(cstar_v), weighted_norm(f_int), 1e-300)

    residuals = {
        "first_equation_rel": res1_norm / scale1,
        "second_equation_rel": weighted_norm(res2) / scale2,
    }
    return V, residuals


@dataclass
class EnergyBalance:
    lhs: float
    rhs: float
    dissipation_defect: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def _implied_forcing(problem: DegenerateProblem, U: TimeSignal) -> np.ndarray:
    du = d0(U).values
    return du @ problem.eta0.T + U.values @ problem.quad0.T


def energy_balance(
    problem: DegenerateProblem, U: TimeSignal, t0: float, t1: float
) -> EnergyBalance:
    """Discrete energy balance over a source-free window (t0, t1].

    Precondition: the forcing implied by U through the stepping scheme
    vanishes at every step in the window.  Returns

        lhs   = 1/2 <U|eta0 U>(t1) + dt * sum_{t0 < t_n <= t1} |C0 U_n|^2,
        rhs   = 1/2 <U|eta0 U>(t0),
        defect = 1/2 * sum_{window} <dU_n | eta0 dU_n>  (>= 0, O(dt)),

    and the scheme satisfies lhs + defect = rhs exactly.
    """
    grid = U.grid
    times = grid.times
    n0 = int(np.argmin(np.abs(times - t0)))
    n1 = int(np.argmin(np.abs(times - t1)))
    if not (0 <= n0 < n1 <= grid.steps):
        raise ValueError(f"bad window [{t0}, {t1}] on horizon {grid.horizon}")

    implied = _implied_forcing(problem, U)
    window = slice(n0 + 1, n1 + 1)
    f_scale = max(np.abs(implied).max(), 1.0)
    if np.abs(implied[window]).max() > 1e-9 * f_scale:
        raise ValueError(
            "forcing does not vanish on the balance window "
            f"(max |F| = {np.abs(implied[window]).max():.3e})"
        )

    def eform(v):
        return float(v @ problem.eta0 @ v)

    du = np.diff(U.values, axis=0, prepend=np.zeros((1, U.dim)))
    lhs = 0.5 * eform(U.values[n1]) + grid.dt * float(
        np.einsum("nd,nd->", U.values[window] @ problem.quad0, U.values[window])
    )
    rhs = 0.5 * eform(U.values[n0])
    defect = 0.5 * float(
        np.einsum("nd,nd->", du[window] @ problem.eta0, du[window])
    )
    return EnergyBalance(lhs=lhs, rhs=rhs, dissipation_defect=defect)


def regularity_bound_check(
    problem: DegenerateProblem, F: TimeSignal, U: TimeSignal | None = None
):
    """Graph-norm bound of the solution by the antiderivative norm of the data.

    lhs = (|U|^2 + |C0 U|^2)^{1/2} in the weighted product, rhs uses the
    shift-(-1) surrogate norm of F and the constant 1/2 * min(1, c1);
    passes iff lhs <= rhs * (1 + 10 dt rho).  Meaningful near rho = 1,
    where the underlying estimate is stated.
    """
    if U is None:
        U = solve_reduced(problem, F)
    grid = U.grid
    quad_part = grid.dt * float(
        np.sum(
            grid.weights
            * np.einsum("nd,nd->n", U.values @ problem.quad0, U.values)
        )
    )
    lhs = float(np.sqrt(max(weighted_inner(U, U, 0) + quad_part, 0.0)))
    f_red = problem.reduce_signal(F)
    c_tilde = 0.5 * min(1.0, problem.c1)
    rhs = float(np.sqrt(max(weighted_inner(f_red, f_red, -1), 0.0))) / c_tilde
    slack = 10.0 * grid.dt * grid.rho
    return lhs, rhs, bool(lhs <= rhs * (1.0 + slack) + 1e-300)


def check_spacetime_equivalence(
    problem: DegenerateProblem,
    rho: float,
    trials: int = 100,
    steps: int = 200,
    seed: int = 0,
) -> dict:
    """Compare the pointwise coercivity bound with its space-time form.

    Pointwise: <U|eta0 U> + |C0 U|^2 >= c1 |U|^2 for random U.  Space-time:
    rho-weighted version with c0 = c1 / max(rho, 1) for random reduced
    signals (requires rho >= 1).  Also evaluates the exponential-ramp
    signal exp(rho t) x on [0, 1], whose weighted quadrature reproduces the
    pointwise ratio node by node.
    """
    if rho < 1.0:
        raise ValueError("the space-time comparison is stated for rho >= 1")
    rng = np.random.default_rng(seed)
    r = problem.reduced_dim
    form = problem.eta0 + problem.quad0

    worst_pointwise = np.inf
    for _ in range(trials):
        x = rng.standard_normal(r)
        worst_pointwise = min(
            worst_pointwise, float(x @ form @ x) / (problem.c1 * float(x @ x))
        )

    grid = WeightedTimeGrid(horizon=1.0, steps=max(steps, int(np.ceil(rho)) + 1), rho=rho)
    c0 = problem.c1 / max(rho, 1.0)
    worst_spacetime = np.inf
    for _ in range(trials):
        U = TimeSignal(grid, rng.standard_normal((grid.num_nodes, r)))
        eta_part = grid.dt * float(
            np.sum(grid.weights * np.einsum("nd,nd->n", U.values @ problem.eta0, U.values))
        )
        quad_part = grid.dt * float(
            np.sum(grid.weights * np.einsum("nd,nd->n", U.values @ problem.quad0, U.values))
        )
        denom = c0 * weighted_inner(U, U, 0)
        worst_spacetime = min(worst_spacetime, (rho * eta_part + quad_part) / denom)

    ramp_discrepancy = 0.0
    scale = np.exp(rho * grid.times)
    for _ in range(min(trials, 10)):
        x = rng.standard_normal(r)
        U = TimeSignal(grid, np.outer(scale, x))
        eta_part = grid.dt * float(
            np.sum(grid.weights * np.einsum("nd,nd->n", U.values @ problem.eta0, U.values))
        )
        quad_part = grid.dt * float(
            np.sum(grid.weights * np.einsum("nd,nd->n", U.values @ problem.quad0, U.values))
        )
        temporal = (rho * eta_part + quad_part) / weighted_inner(U, U, 0)
        spatial = (rho * float(x @ problem.eta0 @ x) + float(x @ problem.quad0 @ x)) / float(
            x @ x
        )
        ramp_discrepancy = max(ramp_discrepancy, abs(temporal - spatial) / max(spatial, 1e-300))

    return {
        "c1": problem.c1,
        "c0_spacetime": c0,
        "worst_pointwise_ratio": worst_pointwise,
        "worst_spacetime_ratio": worst_spacetime,
        "ramp_max_rel_discrepancy": ramp_discrepancy,
        "trials": trials,
    }


# ---------------------------------------------------------------------------
# Two-species diffusion preset (coupled pair with rank-one mass coupling)
# ---------------------------------------------------------------------------


def grad_no_bc(shape) -> scipy.sparse.csr_matrix:
    """Nodal gradient on a 1-D or 2-D unit-domain grid, no boundary condition.

    ``shape`` is the cell count m (1-D) or a pair (mx, my).  Node DOFs sit at
    all grid nodes; the kernel is the constant vector on a connected grid.
    """
    if np.isscalar(shape):
        m = int(shape)
        h = 1.0 / m
        data, rows, cols = [], [], []
        for e in range(m):
            rows += [e, e]
            cols += [e, e + 1]
            data += [-1.0 / h, 1.0 / h]
        return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(m, m + 1))
    mx, my = (int(s) for s in shape)
    hx, hy = 1.0 / mx, 1.0 / my
    nx, ny = mx + 1, my + 1

    def node(i, j):
        return i * ny + j

    rows, cols, data = [], [], []
    e = 0
    for i in range(mx):
        for j in range(ny):
            rows += [e, e]
            cols += [node(i, j), node(i + 1, j)]
            data += [-1.0 / hx, 1.0 / hx]
            e += 1
    for i in range(nx):
        for j in range(my):
            rows += [e, e]
            cols += [node(i, j), node(i, j + 1)]
            data += [-1.0 / hy, 1.0 / hy]
            e += 1
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(e, nx * ny))


def mean_zero_poincare(G) -> float:
    """Smallest eigenvalue of G^T G restricted to the mean-zero subspace."""
    G = _dense(G)
    n = G.shape[1]
    ones = np.ones(n) / np.sqrt(n)
    basis = scipy.linalg.null_space(ones[None, :])
    reduced = basis.T @ (G.T @ G) @ basis
    return float(np.linalg.eigvalsh(0.5 * (reduced + reduced.T))[0])


def bidomain_problem(shape, sigma1: float = 1.0, sigma2: float = 1.0):
    """Coupled two-potential diffusion pair on a grid, as used for excitable
    tissue models: rank-one mass coupling [[1, 1], [1, 1]] between the two
    components and block-diagonal scaled gradients without boundary
    conditions.

    Returns (problem, info) where info records the gradient operator, the
    mean-zero Poincare eigenvalue and the induced lower bound
    min(1, min(sigma) * poincare) for the certified constant.
    """
    if sigma1 <= 0.0 or sigma2 <= 0.0:
        raise ValueError("conductivities must be positive")
    G = grad_no_bc(shape)
    n = G.shape[1]
    eye = scipy.sparse.identity(n, format="csr")
    eta = scipy.sparse.bmat([[eye, eye], [eye, eye]], format="csr").toarray()
    C = scipy.sparse.bmat(
        [[np.sqrt(sigma1) * G, None], [None, np.sqrt(sigma2) * G]], format="csr"
    ).toarray()
    problem = build(eta, C)
    poincare = mean_zero_poincare(G)
    info = {
        "grad": G,
        "nodes_per_component": n,
        "poincare_eigenvalue": poincare,
        "c1_lower_bound": min(1.0, min(sigma1, sigma2) * poincare),
    }
    return problem, info
