"""Causal weighted-time solvers for degenerate parabolic evolution systems.

The package is organized bottom-up:

- :mod:`evoeddy.weighted_time` — exponentially weighted time grids, causal
  difference/antidifference calculus, truncation, shifted norms.
- :mod:`evoeddy.subspaces` — kernels, ranges, intersections, complements,
  projectors, and orthogonal decompositions of state spaces.
- :mod:`evoeddy.evo_core` — certified backward-Euler solver for
  (d0 M0 + M1 + A) U = F with the truncated a-priori estimate.
- :mod:`evoeddy.degenerate` — reduction of (d0 eta + C^T C) U = F to the
  effective state space, energy balance, first-order-pair recovery.
- :mod:`evoeddy.complex3d` — staggered-grid grad/curl/div complex on the
  unit box with a strictly interior conducting region.
- :mod:`evoeddy.eddy` — assembled degenerate eddy-current problem, explicit
  well-posedness constants, and the multiplier (saddle-point) formulation.
- :mod:`evoeddy.maxwell` — full Maxwell stepping with displacement current
  and the vanishing-displacement convergence study.
- :mod:`evoeddy.cli` — configuration-driven command line front end.
"""

from .weighted_time import (
    TimeSignal,
    WeightedTimeGrid,
    d0,
    d0_inverse,
    truncate,
    weighted_inner,
    weighted_norm,
)
from .subspaces import (
    DecompositionReport,
    Subspace,
    column_space,
    complement,
    intersect,
    kernel,
    project,
    subspace_gap,
    three_way_decompose,
)
from .evo_core import EvoProblem, causal_bound_check, certify_positivity, solve

__version__ = "0.1.0"

__all__ = [
    "TimeSignal",
    "WeightedTimeGrid",
    "d0",
    "d0_inverse",
    "truncate",
    "weighted_inner",
    "weighted_norm",
    "DecompositionReport",
    "Subspace",
    "column_space",
    "complement",
    "intersect",
    "kernel",
    "project",
    "subspace_gap",
    "three_way_decompose",
    "EvoProblem",
    "causal_bound_check",
    "certify_positivity",
    "solve",
    "__version__",
]
