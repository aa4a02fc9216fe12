"""Vanishing displacement current: the quasi-static model is the limit.

The full two-field solver carries the displacement term eps * dE/dt.  As
eps shrinks, its solution approaches the degenerate quasi-static one at
first order, measured in a twice-antidifferentiated weighted norm.  The
difference obeys an exact discrete identity, so the observed rate is clean.
"""

import numpy as np

from evoeddy import complex3d as cx
from evoeddy import eddy, maxwell
from evoeddy.subspaces import project
from evoeddy.weighted_time import TimeSignal, WeightedTimeGrid

mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
ops = cx.build_operators(mesh)
problem = eddy.assemble(mesh, ops, sigma_tilde=1.0, mu=1.0)

grid = WeightedTimeGrid(horizon=2.0, steps=128, rho=1.0)
rng = np.random.default_rng(7)
x = project(problem.h0, rng.standard_normal(problem.num_edges))
x /= np.linalg.norm(x)
ramp = lambda t: float(np.sin(0.5 * np.pi * min(t / 0.5, 1.0)) ** 2)
f = TimeSignal.from_profile(grid, ramp, x)

eps_values = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
report = maxwell.limit_study(problem, f, eps_values, k=0)

print("   eps     |   error    |  error/eps")
for eps, err, ratio in zip(report.epsilon_values, report.errors, report.ratios):
    print(f"  {eps:7.0e} | {err:10.4e} | {ratio:10.4e}")

print(f"\nfitted log-log order         : {report.fitted_order:.4f}  (first order)")
print(f"max ratio / median ratio     : {report.max_ratio / report.median_ratio:.3f}  "
      f"(uniformly bounded)")
print(f"difference identity residual : {report.identity_max_rel:.2e}")
print("  (E_eps - E_0 equals the eps-solver applied to -eps * dE_0/dt, "
      "step for step)")

# the dissipativity of the full solver with a magnetic kick and no conduction
mesh0 = cx.build_mesh(4)
ops0 = cx.build_operators(mesh0)
free = eddy.assemble(mesh0, ops0)
mp = maxwell.from_eddy(free, 0.5)
kick = np.zeros((grid.num_nodes, mp.num_faces))
kick[1] = np.random.default_rng(0).standard_normal(mp.num_faces)
sol = maxwell.maxwell_solve(
    mp, TimeSignal.zeros(grid, mp.num_edges), TimeSignal(grid, kick)
)
energy = 0.5 * (0.5 * np.sum(sol.E.values**2, axis=1)
                + np.sum(sol.H.values**2, axis=1))
print(f"\nafter a magnetic kick with zero conductivity, the discrete energy")
print(f"only decays: max increase = {np.diff(energy[1:]).max():.2e}")
