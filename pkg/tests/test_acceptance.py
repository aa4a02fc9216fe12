"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Every tolerance is pinned here; the oracles (enumeration, analytic
formulas, ARPACK shift-invert, dense SVD) are independent of the code paths
they certify.
"""

import time

import numpy as np
import pytest
import scipy.sparse
import scipy.sparse.linalg

from evoeddy import complex3d as cx
from evoeddy import degenerate as dg
from evoeddy import eddy, maxwell
from evoeddy import subspaces as ss
from evoeddy.evo_core import EvoProblem, causal_bound_check, certify_positivity
from evoeddy.evo_core import solve as evo_solve
from evoeddy.weighted_time import TimeSignal, WeightedTimeGrid, weighted_norm

from conftest import h0_vector


def report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num}: {detail}")
    assert ok, detail


def arpack_lambda_min(S):
    """Smallest eigenvalue via ARPACK shift-invert (independent of LAPACK
    eigvalsh used by the library)."""
    S = scipy.sparse.csc_matrix(np.asarray(S))
    scale = float(abs(S).sum(axis=1).max())
    val = scipy.sparse.linalg.eigsh(
        S, k=1, sigma=-1e-6 * scale, which="LM", return_eigenvectors=False
    )
    return float(val[0])


def random_certified(rng, d, rho=1.0):
    B = rng.standard_normal((d, d)) / np.sqrt(d)
    M0 = B @ B.T
    M0 /= max(np.linalg.norm(M0, ord=2), 1.0)
    if rng.random() < 0.5:
        w, Q = np.linalg.eigh(M0)
        w[: d // 3] = 0.0
        M0 = (Q * w) @ Q.T
    S = rng.standard_normal((d, d))
    p = EvoProblem(M0=M0, M1=(0.5 + 1.5 * rng.random()) * np.eye(d), A=S - S.T, rho=rho)
    certify_positivity(p)
    return p


def smooth_switch_off(t, t_start=0.5, t_off=1.0):
    if t <= t_start:
        return 1.0
    if t >= t_off:
        return 0.0
    return float(np.cos(0.5 * np.pi * (t - t_start) / (t_off - t_start)) ** 2)


def ramp(t):
    return float(np.sin(0.5 * np.pi * min(t / 0.5, 1.0)) ** 2)


def test_criterion_01_complex_exactness():
    start = time.monotonic()
    ok = True
    for n in range(3, 13):
        ops = cx.build_operators(cx.build_mesh(n))
        chain_max = np.abs((ops.curl0 @ ops.grad0).toarray()).max()
        rep = cx.exactness_report(ops)
        ok &= chain_max <= 1e-14
        ok &= rep["dim_kernel_curl0"] == rep["rank_grad0"]
    elapsed = time.monotonic() - start
    ok &= elapsed < 10.0
    report(1, ok, f"chain identity and kernel/rank equality on n=3..12 ({elapsed:.1f}s)")


def test_criterion_02_reduction_consistency(n6_center):
    start = time.monotonic()
    _, _, problem = n6_center
    red = problem.reduction

    lam_oracle = arpack_lambda_min(red.eta0 + red.quad0)
    ok = red.c1 > 0.0 and lam_oracle >= red.c1 * (1.0 - 1e-8)
    ok &= red.decomposition.max_overlap() <= 1e-10
    ok &= sum(red.decomposition.dims) == red.h0.dim

    bid, info = dg.bidomain_problem(32, 1.0, 1.0)
    lam_bid = arpack_lambda_min(bid.eta0 + bid.quad0)
    ok &= bid.c1 > 0.0 and lam_bid >= bid.c1 * (1.0 - 1e-8)
    ok &= bid.decomposition.max_overlap() <= 1e-10
    ok &= sum(bid.decomposition.dims) == bid.h0.dim

    elapsed = time.monotonic() - start
    ok &= elapsed < 30.0
    report(2, ok, f"certified constants match ARPACK oracle; splits orthogonal ({elapsed:.1f}s)")


def test_criterion_03_causality(n6_center):
    start = time.monotonic()
    _, ops, problem = n6_center
    grid = WeightedTimeGrid(1.0, 64, 1.0)
    cut = 0.5
    before = grid.times < cut
    late = lambda t: 1.0 if t >= cut else 0.0
    rng = np.random.default_rng(0)
    ok = True

    p = random_certified(rng, 6)
    vals = rng.standard_normal((grid.num_nodes, 6))
    vals[before] = 0.0
    U = evo_solve(p, TimeSignal(grid, vals))
    ok &= bool(np.all(U.values[before] == 0.0))

    x = h0_vector(problem, rng)
    J = TimeSignal.from_profile(grid, late, x)
    K = TimeSignal.zeros(grid, ops.curl0.shape[0])
    sol = eddy.solve(problem, J, K)
    ok &= bool(np.all(sol.E.values[before] == 0.0))
    ok &= bool(np.all(sol.H.values[before] == 0.0))

    sad = eddy.saddle_solve(problem, TimeSignal(grid, -J.values))
    ok &= bool(np.all(sad.E.values[before] == 0.0))

    mp = maxwell.from_eddy(problem, 1e-2)
    mw = maxwell.maxwell_solve(mp, J, K)
    ok &= bool(np.all(mw.E.values[before] == 0.0))
    ok &= bool(np.all(mw.H.values[before] == 0.0))

    elapsed = time.monotonic() - start
    ok &= elapsed < 30.0
    report(3, ok, f"all four solvers exactly zero before the source onset ({elapsed:.1f}s)")


def test_criterion_04_causal_apriori_estimate():
    start = time.monotonic()
    rng = np.random.default_rng(1)
    grid = WeightedTimeGrid(1.0, 100, 1.0)
    cuts = np.linspace(0.2, 1.0, 5)
    ok = True
    for _ in range(100):
        p = random_certified(rng, 8)
        F = TimeSignal(grid, rng.standard_normal((grid.num_nodes, 8)))
        U = evo_solve(p, F)
        for a in cuts:
            lhs, rhs, passed = causal_bound_check(p, F, a, U=U)
            ok &= passed
    elapsed = time.monotonic() - start
    ok &= elapsed < 60.0
    report(4, ok, f"truncated bound holds on 100 instances x 5 cuts ({elapsed:.1f}s)")


def test_criterion_05_energy_balance():
    start = time.monotonic()
    ok = True

    heat = dg.build(np.array([[1.0]]), np.array([[1.0]]))
    mesh4 = cx.build_mesh(4, [[[1, 3], [1, 3], [1, 3]]])
    ops4 = cx.build_operators(mesh4)
    red4 = eddy.assemble(mesh4, ops4).reduction
    rng = np.random.default_rng(2)
    vec4 = red4.h0.basis @ rng.standard_normal(red4.h0.dim)
    vec4 /= np.linalg.norm(vec4)

    # per-step identity at 1e-12 on both fixtures
    for problem, vec in ((heat, np.ones(1)), (red4, vec4)):
        grid = WeightedTimeGrid(2.0, 64, 1.0)
        F = TimeSignal.from_profile(grid, smooth_switch_off, vec)
        U = dg.solve_reduced(problem, F)
        f_red = F.values @ problem.h0.basis
        du = np.diff(U.values, axis=0, prepend=np.zeros((1, U.dim)))
        for n in range(grid.num_nodes):
            un, dun = U.values[n], du[n]
            um = U.values[n - 1] if n else np.zeros(U.dim)
            lhs = (
                0.5 * (un @ problem.eta0 @ un)
                - 0.5 * (um @ problem.eta0 @ um)
                + 0.5 * (dun @ problem.eta0 @ dun)
                + grid.dt * (un @ problem.quad0 @ un)
            )
            rhs = grid.dt * np.dot(f_red[n], un)
            ok &= abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1.0)

    # window defect vanishes at first order on both fixtures
    for problem, vec in ((heat, np.ones(1)), (red4, vec4)):
        gaps = []
        dts = [2.0**-k for k in range(4, 9)]
        for dt in dts:
            grid = WeightedTimeGrid(2.0, int(round(2.0 / dt)), 1.0)
            F = TimeSignal.from_profile(grid, smooth_switch_off, vec)
            U = dg.solve_reduced(problem, F)
            bal = dg.energy_balance(problem, U, 1.0, 2.0)
            ok &= bal.dissipation_defect >= 0.0
            gaps.append(abs(bal.gap))
        order = np.polyfit(np.log(dts), np.log(gaps), 1)[0]
        ok &= order >= 0.9

    elapsed = time.monotonic() - start
    ok &= elapsed < 60.0
    report(5, ok, f"per-step identity at 1e-12; window defect order >= 0.9 ({elapsed:.1f}s)")


def test_criterion_06_first_order_recovery(n6_center, n6_twoboxes, n4_empty):
    start = time.monotonic()
    ok = True
    rng = np.random.default_rng(3)
    for _, ops, problem in (n6_center, n6_twoboxes, n4_empty):
        grid = WeightedTimeGrid(1.0, 64, 1.0)
        x = h0_vector(problem, rng)
        J = TimeSignal.from_profile(grid, ramp, x)
        kvec = rng.standard_normal(ops.curl0.shape[0])
        K = TimeSignal.from_profile(grid, ramp, 0.3 * kvec)
        sol = eddy.solve(problem, J, K)
        ok &= max(sol.residuals.values()) <= 1e-8
    elapsed = time.monotonic() - start
    ok &= elapsed < 60.0
    report(6, ok, f"both equations recovered to 1e-8 on all fixtures ({elapsed:.1f}s)")


def test_criterion_07_explicit_constants(n6_center):
    start = time.monotonic()
    _, ops, problem = n6_center
    c = eddy.constants(problem)
    rng = np.random.default_rng(4)
    ok = True

    b0 = problem.parts[0].basis
    for _ in range(100):
        u = b0 @ rng.standard_normal(b0.shape[1])
        ok &= np.linalg.norm(u) <= c.k0 * np.linalg.norm(ops.curl0 @ u) * (1 + 1e-10)

    b2 = problem.parts[2].basis
    for _ in range(100):
        u = b2 @ rng.standard_normal(b2.shape[1])
        ok &= np.linalg.norm(u) <= c.k1 * np.linalg.norm(problem.chi_c(u)) * (1 + 1e-10)

    c_star_formula = 1.0 / max(2.0, 2.0 * c.k1**2, c.k0**2 * (1.0 + 2.0 * max(1.0, c.k1**2)))
    ok &= c.c_star == pytest.approx(c_star_formula, rel=1e-12)
    ok &= c.c0_direct >= c.c0_formula * (1.0 - 1e-10)

    elapsed = time.monotonic() - start
    ok &= elapsed < 60.0
    report(7, ok, f"k0/k1 sample bounds at 1e-10; direct >= closed-form constant ({elapsed:.1f}s)")


def test_criterion_08_saddle_equivalence(n6_center):
    start = time.monotonic()
    mesh, ops, problem = n6_center
    grid = WeightedTimeGrid(1.0, 64, 1.0)
    rng = np.random.default_rng(5)
    x = h0_vector(problem, rng)
    f = TimeSignal.from_profile(grid, ramp, x)

    sad = eddy.saddle_solve(problem, f)
    ref = eddy.solve(
        problem, TimeSignal(grid, -f.values), TimeSignal.zeros(grid, ops.curl0.shape[0])
    )
    f_norm = weighted_norm(f)
    ok = weighted_norm(sad.E - ref.E) <= 1e-8 * f_norm
    ok &= weighted_norm(sad.p) <= 1e-8 * f_norm

    G, _ = cx.build_diamond_grad(mesh, ops)
    gap = ss.subspace_gap(ss.column_space(G.toarray()), ss.complement(problem.h0))
    ok &= gap <= 1e-10

    elapsed = time.monotonic() - start
    ok &= elapsed < 120.0
    report(8, ok, f"saddle = reduced, multiplier vanishes, range matches annihilator ({elapsed:.1f}s)")


def test_criterion_09_singular_limit(n6_center):
    start = time.monotonic()
    _, _, problem = n6_center
    grid = WeightedTimeGrid(2.0, 128, 1.0)
    rng = np.random.default_rng(7)
    f = TimeSignal.from_profile(grid, ramp, h0_vector(problem, rng))
    rep = maxwell.limit_study(problem, f, [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], k=0)

    ok = rep.fitted_order is not None and rep.fitted_order >= 0.9
    ok &= rep.max_ratio <= 10.0 * rep.median_ratio
    elapsed = time.monotonic() - start
    ok &= elapsed < 600.0
    report(
        9,
        ok,
        f"fitted order {rep.fitted_order:.3f} >= 0.9, ratios bounded ({elapsed:.1f}s)",
    )


def test_criterion_10_bidomain_preset():
    start = time.monotonic()
    m = 32
    sigma1, sigma2 = 1.0, 2.0
    problem, info = dg.bidomain_problem(m, sigma1, sigma2)

    ok = problem.decomposition.parts[2].dim == 0

    n = info["nodes_per_component"]
    chi = np.concatenate([np.ones(n), -np.ones(n)])
    expected = ss.Subspace(2 * n, (chi / np.linalg.norm(chi))[:, None])
    ok &= ss.subspace_gap(ss.complement(problem.h0), expected) <= 1e-10

    # independent oracle for the mean-zero eigenvalue: analytic path-graph
    # spectrum of the 1-D chain, smallest nonzero mode k = 1
    poincare = 4.0 * m**2 * np.sin(np.pi / (2 * (m + 1))) ** 2
    ok &= problem.c1 >= min(1.0, min(sigma1, sigma2) * poincare) * (1.0 - 1e-10)

    elapsed = time.monotonic() - start
    ok &= elapsed < 30.0
    report(10, ok, f"trivial remainder, correct null pair, c1 >= min(1, c^2) ({elapsed:.1f}s)")
