"""Degenerate eddy-current problem on the staggered complex.

The two-field system

    sigma E - curl* H = -J,
    d0 (mu H) + curl0 E = K,

with conductivity supported only on the conducting region, is solved by
eliminating H and reducing to the effective state space H0 of the
degenerate machinery (eta = sigma, stiffness curl0^T mu^{-1} curl0).  The
module certifies the explicit well-posedness constants of the reduction
(curl lower bound k0, conducting-trace bound k1 of the remainder part, and
the closed-form coercivity constant), reconstructs the magnetic field, and
offers a multiplier formulation that enforces membership in H0 through the
constrained gradient instead of building H0 explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import degenerate as dg
from . import subspaces as ss
from .complex3d import ComplexOperators, StaggeredMesh, build_diamond_grad, sub_complex_curl
from .weighted_time import TimeSignal, d0, d0_inverse, weighted_norm

__all__ = [
    "EddyProblem",
    "EddyConstants",
    "assemble",
    "constants",
    "solve",
    "saddle_solve",
    "SUBSPACE_GAP_TOL",
    "H0_ADMISSION_TOL",
]

SUBSPACE_GAP_TOL = 1e-10
# user data arrives via projection; a hard zero is unattainable in floats
H0_ADMISSION_TOL = 1e-8


def _coefficient_diag(values, size: int, name: str) -> np.ndarray:
    if np.isscalar(values):
        arr = np.full(size, float(values))
    else:
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size != size:
            raise ValueError(f"{name} needs {size} values, got {arr.size}")
    if arr.size and np.min(arr) <= 0.0:
        raise ValueError(f"{name} must be strictly positive (min {np.min(arr):g})")
    return arr


@dataclass
class EddyConstants:
    k0: float
    k1: float
    c_star: float
    c0_formula: float
    c0_direct: float
    comparison_asserted: bool

    def as_dict(self) -> dict:
        return {
            "k0": self.k0,
            "k1": self.k1,
            "c_star": self.c_star,
            "c0_formula": self.c0_formula,
            "c0_direct": self.c0_direct,
            "comparison_asserted": self.comparison_asserted,
        }


@dataclass
class EddyProblem:
    mesh: StaggeredMesh
    ops: ComplexOperators
    sigma_tilde_diag: np.ndarray | None
    sigma_tilde_dense: np.ndarray | None
    mu_diag: np.ndarray
    sigma: scipy.sparse.csr_matrix = field(repr=False, default=None)
    stiffness: scipy.sparse.csr_matrix = field(repr=False, default=None)
    reduction: dg.DegenerateProblem = None
    subspace_checks: dict = field(default_factory=dict)
    constants_record: EddyConstants | None = None
    _diamond: tuple | None = None

    @property
    def h0(self) -> ss.Subspace:
        return self.reduction.h0

    @property
    def parts(self):
        """(range of curl adjoint, conducting kernel part, remainder part)."""
        return self.reduction.decomposition.parts

    @property
    def num_edges(self) -> int:
        return self.mesh.num_interior_edges

    @property
    def conducting_indices(self) -> np.ndarray:
        return np.nonzero(self.mesh.edge_conducting_mask)[0]

    def chi_c(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto the conducting-edge coordinates."""
        out = np.zeros_like(x)
        mask = self.mesh.edge_conducting_mask
        out[..., mask] = x[..., mask]
        return out

    def sigma_tilde_min(self) -> float:
        if self.sigma_tilde_diag is not None:
            return float(self.sigma_tilde_diag.min()) if self.sigma_tilde_diag.size else np.inf
        return float(np.linalg.eigvalsh(self.sigma_tilde_dense)[0])

    def mu_is_identity(self) -> bool:
        return bool(np.allclose(self.mu_diag, 1.0, rtol=0.0, atol=1e-14))

    def diamond_grad(self):
        if self._diamond is None:
            self._diamond = build_diamond_grad(self.mesh, self.ops)
        return self._diamond


def _lift_edge_subspace(basis_small: np.ndarray, edge_mask: np.ndarray, dim: int) -> ss.Subspace:
    full = np.zeros((dim, basis_small.shape[1]))
    full[np.nonzero(edge_mask)[0], :] = basis_small
    return ss.Subspace(dim, full)


def assemble(
    mesh: StaggeredMesh,
    ops: ComplexOperators,
    sigma_tilde=1.0,
    mu=1.0,
    tol: float = 1e-10,
    verify_subspaces: bool = True,
) -> EddyProblem:
    """Assemble coefficients, reduce, and verify the decomposition geometry.

    ``sigma_tilde`` is the conductivity on the conducting edges (scalar,
    per-edge diagonal, or a full SPD matrix); ``mu`` is the permeability on
    faces (scalar or per-face diagonal).  The reduction is certified through
    its coercivity constant; the kernel parts of the splitting are compared
    against the conducting/complement sub-complex kernels by principal
    angles when ``verify_subspaces`` is set.
    """
    E = mesh.num_interior_edges
    Fc = ops.curl0.shape[0]
    cond = np.nonzero(mesh.edge_conducting_mask)[0]

    sigma_diag_small = None
    sigma_dense_small = None
    if np.isscalar(sigma_tilde) or np.asarray(sigma_tilde).ndim <= 1:
        sigma_diag_small = _coefficient_diag(sigma_tilde, cond.size, "sigma_tilde")
        sigma_full = np.zeros(E)
        sigma_full[cond] = sigma_diag_small
        sigma = scipy.sparse.diags(sigma_full, format="csr")
        sigma_dense = np.diag(sigma_full)
    else:
        sigma_dense_small = np.asarray(sigma_tilde, dtype=float)
        if sigma_dense_small.shape != (cond.size, cond.size):
            raise ValueError(
                f"sigma_tilde matrix must be {cond.size} x {cond.size}, "
                f"got {sigma_dense_small.shape}"
            )
        if np.linalg.norm(sigma_dense_small - sigma_dense_small.T, ord=2) > 1e-12 * max(
            np.linalg.norm(sigma_dense_small, ord=2), 1.0
        ):
            raise ValueError("sigma_tilde must be symmetric")
        if cond.size and np.linalg.eigvalsh(sigma_dense_small)[0] <= 0.0:
            raise ValueError("sigma_tilde must be strictly positive definite")
        sigma_dense = np.zeros((E, E))
        sigma_dense[np.ix_(cond, cond)] = sigma_dense_small
        sigma = scipy.sparse.csr_matrix(sigma_dense)

    mu_diag = _coefficient_diag(mu, Fc, "mu")
    mu_inv = scipy.sparse.diags(1.0 / mu_diag, format="csr")
    stiffness = (ops.curl0.T @ mu_inv @ ops.curl0).tocsr()

    reduction = dg.build(
        sigma_dense, ops.curl0.toarray(), tol=tol, gram=np.diag(1.0 / mu_diag)
    )

    checks = {}
    if verify_subspaces:
        sub_i, mask_i, _ = sub_complex_curl(mesh, ops, mesh.conducting)
        ker_i = ss.kernel(sub_i, tol) if mask_i.any() else ss.Subspace.zero(0)
        lifted_i = (
            _lift_edge_subspace(ker_i.basis, mask_i, E)
            if mask_i.any()
            else ss.Subspace.zero(E)
        )
        gap_h1 = ss.subspace_gap(reduction.decomposition.parts[1], lifted_i)
        checks["conducting_kernel_equals_h1"] = {
            "gap": gap_h1,
            "dims": (reduction.decomposition.parts[1].dim, lifted_i.dim),
            "passed": bool(
                gap_h1 <= SUBSPACE_GAP_TOL
                and reduction.decomposition.parts[1].dim == lifted_i.dim
            ),
        }

        sub_e, mask_e, _ = sub_complex_curl(mesh, ops, ~mesh.conducting)
        ker_e = ss.kernel(sub_e, tol)
        lifted_e = _lift_edge_subspace(ker_e.basis, mask_e, E)
        h0_perp = ss.complement(reduction.h0)
        gap_perp = ss.subspace_gap(h0_perp, lifted_e)
        checks["complement_kernel_equals_h0_perp"] = {
            "gap": gap_perp,
            "dims": (h0_perp.dim, lifted_e.dim),
            "passed": bool(gap_perp <= SUBSPACE_GAP_TOL and h0_perp.dim == lifted_e.dim),
        }

        checks["decomposition"] = {
            "dims": reduction.decomposition.dims,
            "max_overlap": reduction.decomposition.max_overlap(),
            "reconstruction_defect": reduction.decomposition.reconstruction_defect,
            "passed": bool(
                reduction.decomposition.max_overlap() <= SUBSPACE_GAP_TOL
                and sum(reduction.decomposition.dims) == reduction.h0.dim
            ),
        }
        checks["passed"] = all(
            entry["passed"] for entry in checks.values() if isinstance(entry, dict)
        )
        if not checks["passed"]:
            failed = [
                name
                for name, entry in checks.items()
                if isinstance(entry, dict) and not entry["passed"]
            ]
            raise RuntimeError(f"subspace identity checks failed: {failed}")

    return EddyProblem(
        mesh=mesh,
        ops=ops,
        sigma_tilde_diag=sigma_diag_small,
        sigma_tilde_dense=sigma_dense_small,
        mu_diag=mu_diag,
        sigma=sigma,
        stiffness=stiffness,
        reduction=reduction,
        subspace_checks=checks,
    )


def constants(problem: EddyProblem, tol: float = 1e-10) -> EddyConstants:
    """Certify the explicit constants of the coercivity estimate.

    k0: reciprocal smallest positive singular value of curl0, so that
        |U| <= k0 |curl0 U| on the range of the adjoint;
    k1: reciprocal smallest singular value of the conducting-trace map on
        the remainder part (0 when that part is trivial);
    c_star = 1 / max(2, 2 k1^2, k0^2 (1 + 2 max(1, k1^2)));
    c0_formula = min(1, c_star);
    c0_direct: smallest eigenvalue of sigma + curl0^T curl0 on H0 (unit
        permeability for the comparison).

    The ordering c0_direct >= c0_formula is asserted when the conductivity
    is at least 1 on the conductor; otherwise it is only reported.
    """
    red = problem.reduction
    parts = red.decomposition.parts
    curl0 = problem.ops.curl0

    b0 = parts[0].basis
    cb0 = curl0 @ b0
    pos = np.linalg.eigvalsh(cb0.T @ cb0)
    smin_pos = float(np.sqrt(max(pos[0], 0.0))) if b0.shape[1] else np.inf
    if b0.shape[1] and smin_pos <= tol:
        raise RuntimeError("curl0 lost injectivity on the range of its adjoint")
    k0 = 1.0 / smin_pos if np.isfinite(smin_pos) else 0.0

    b2 = parts[2].basis
    if b2.shape[1] == 0:
        k1 = 0.0
    else:
        z = b2[problem.mesh.edge_conducting_mask, :]
        svals = np.linalg.svd(z, compute_uv=False) if z.size else np.zeros(1)
        smin_z = float(svals[-1]) if svals.size else 0.0
        if smin_z <= tol:
            raise RuntimeError(
                "conducting-trace estimate fails: the remainder part of the "
                "splitting is not controlled by its conducting restriction"
            )
        k1 = 1.0 / smin_z

    c_star = 1.0 / max(2.0, 2.0 * k1**2, k0**2 * (1.0 + 2.0 * max(1.0, k1**2)))
    c0_formula = min(1.0, c_star)

    iota = red.h0.basis
    m = iota.T @ (problem.sigma @ iota) + (curl0 @ iota).T @ (curl0 @ iota)
    c0_direct = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])

    assertable = problem.sigma_tilde_min() >= 1.0 - 1e-12
    if assertable and c0_direct < c0_formula * (1.0 - 1e-10):
        raise RuntimeError(
            f"direct constant {c0_direct:.6e} fell below the closed-form "
            f"lower bound {c0_formula:.6e}"
        )

    record = EddyConstants(
        k0=k0,
        k1=k1,
        c_star=c_star,
        c0_formula=c0_formula,
        c0_direct=c0_direct,
        comparison_asserted=bool(assertable),
    )
    problem.constants_record = record
    return record


@dataclass
class EddySolution:
    E: TimeSignal
    H: TimeSignal
    residuals: dict


def _admit_h0(problem: EddyProblem, signal: TimeSignal, name: str) -> np.ndarray:
    coords = signal.values @ problem.h0.basis
    lifted = coords @ problem.h0.basis.T
    defect = np.linalg.norm(signal.values - lifted)
    scale = max(np.linalg.norm(signal.values), 1e-300)
    if defect > H0_ADMISSION_TOL * scale:
        raise ValueError(
            f"{name} is not valued in the reduced state space "
            f"(relative defect {defect / scale:.3e} > {H0_ADMISSION_TOL:g})"
        )
    return coords


def solve(problem: EddyProblem, J: TimeSignal, K: TimeSignal) -> EddySolution:
    """March the eliminated first-order recursion and rebuild both fields.

    J must be valued in the reduced state space (the curl part of the right
    hand side lands there automatically).  Returns E, the reconstructed H,
    and the weighted relative residuals of both equations of the two-field
    system.
    """
    if J.grid != K.grid:
        raise ValueError("J and K must share one grid")
    grid = J.grid
    E_dim = problem.num_edges
    F_dim = problem.ops.curl0.shape[0]
    if J.dim != E_dim or K.dim != F_dim:
        raise ValueError(
            f"J must have {E_dim} components and K {F_dim}, got {J.dim}, {K.dim}"
        )
    _admit_h0(problem, J, "J")

    curl0_dense = problem.ops.curl0.toarray()
    mu_inv = 1.0 / problem.mu_diag
    k_int = d0_inverse(K)
    f_amb = -J.values + (k_int.values * mu_inv) @ curl0_dense
    iota = problem.h0.basis
    f_red = f_amb @ iota

    sigma0 = iota.T @ (problem.sigma @ iota)
    stiff0 = iota.T @ (problem.stiffness @ iota)
    dt = grid.dt
    lu, piv = scipy.linalg.lu_factor(sigma0 + dt * stiff0)

    r = iota.shape[1]
    e_red = np.zeros((grid.num_nodes, r))
    s_accum = np.zeros(r)
    for n in range(grid.num_nodes):
        rhs = f_red[n] - stiff0 @ s_accum
        e_red[n] = scipy.linalg.lu_solve((lu, piv), rhs)
        s_accum += dt * e_red[n]

    E = TimeSignal(grid, e_red @ iota.T)
    curl_e = E.values @ curl0_dense.T
    H = TimeSignal(grid, d0_inverse(TimeSignal(grid, K.values - curl_e)).values * mu_inv)

    curl_h = H.values @ curl0_dense
    sigma_e = E.values @ problem.sigma.T.toarray()
    res1 = TimeSignal(grid, sigma_e - curl_h + J.values)
    res2 = TimeSignal(grid, d0(TimeSignal(grid, H.values * problem.mu_diag)).values
                      + curl_e - K.values)
    scale1 = max(
        weighted_norm(TimeSignal(grid, sigma_e)),
        weighted_norm(TimeSignal(grid, curl_h)),
        weighted_norm(J),
        1e-300,
    )
    scale2 = max(weighted_norm(TimeSignal(grid, curl_e)), weighted_norm(K), 1e-300)
    residuals = {
        "ampere_rel": weighted_norm(res1) / scale1,
        "faraday_rel": weighted_norm(res2) / scale2,
    }
    return EddySolution(E=E, H=H, residuals=residuals)


@dataclass
class SaddleSolution:
    E: TimeSignal
    p: TimeSignal
    diagnostics: dict


def saddle_solve(problem: EddyProblem, f: TimeSignal) -> SaddleSolution:
    """Constrained formulation: enforce E in H0 with a nodal multiplier.

    Solves, per backward-Euler step,

        [sigma/dt + curl0^T curl0   G] [E_n]   [(d0 f)_n + sigma E_{n-1}/dt]
        [G^T                        0] [p_n] = [0],

    where G is the constrained gradient.  For f valued in H0 the multiplier
    vanishes and E agrees with the eliminated solver; a component of f in
    the annihilator of H0 is absorbed by the multiplier and leaves E
    unchanged.  Requires unit permeability.
    """
    if not problem.mu_is_identity():
        raise ValueError("the multiplier formulation is set up for unit permeability")
    grid = f.grid
    if f.dim != problem.num_edges:
        raise ValueError(f"f must have {problem.num_edges} components, got {f.dim}")

    G, info = problem.diamond_grad()
    E_dim = problem.num_edges
    m_dim = G.shape[1]
    dt = grid.dt
    block = scipy.sparse.bmat(
        [[problem.sigma / dt + problem.stiffness, G], [G.T, None]], format="csc"
    )
    lu = scipy.sparse.linalg.splu(block)

    rng = np.random.default_rng(0)
    probe = rng.standard_normal(E_dim + m_dim)
    sol = lu.solve(probe)
    cert = np.linalg.norm(block @ sol - probe) / max(np.linalg.norm(probe), 1e-300)
    if cert > 1e-10:
        raise RuntimeError(
            f"saddle block solve failed its certification (residual {cert:.3e}); "
            "the constrained gradient should make the block invertible"
        )

    F = d0(f)
    e_vals = np.zeros((grid.num_nodes, E_dim))
    p_vals = np.zeros((grid.num_nodes, m_dim))
    e_prev = np.zeros(E_dim)
    constraint_residual = 0.0
    for n in range(grid.num_nodes):
        rhs = np.concatenate([F.values[n] + (problem.sigma @ e_prev) / dt, np.zeros(m_dim)])
        sol = lu.solve(rhs)
        e_prev = sol[:E_dim]
        e_vals[n] = e_prev
        p_vals[n] = sol[E_dim:]
        constraint_residual = max(
            constraint_residual, float(np.linalg.norm(G.T @ e_prev, ord=np.inf))
        )

    E = TimeSignal(grid, e_vals)
    p = TimeSignal(grid, p_vals)
    f_norm = weighted_norm(f)
    diagnostics = {
        "constraint_residual_inf": constraint_residual,
        "multiplier_norm": weighted_norm(p),
        "forcing_norm": f_norm,
        "multiplier_dim": info["multiplier_dim"],
        "block_certification_residual": cert,
    }
    return SaddleSolution(E=E, p=p, diagnostics=diagnostics)
