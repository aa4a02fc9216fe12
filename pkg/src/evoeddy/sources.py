"""Named source profiles for configuration-driven runs.

Time profiles are scalar functions of t; spatial profiles produce an edge
vector, projected onto the reduced state space when requested.  Names match
the configuration schema of the command line front end.
"""

from __future__ import annotations

import numpy as np

from . import eddy as ed
from .complex3d import edge_midpoints
from .subspaces import project
from .weighted_time import TimeSignal, WeightedTimeGrid

__all__ = ["time_profile", "spatial_profile", "source_signal"]


def time_profile(name: str, params: dict):
    """Scalar time profile by name: 'step', 'ramp', or 'gaussian'.

    step: 0 for t < t0, 1 afterwards.
    ramp: sin^2-smoothed switch-on between t0 and t1, 1 afterwards.
    gaussian: pulse centered at t0 with the given width.
    """
    if name == "step":
        t0 = float(params.get("t0", 0.0))
        return lambda t: 1.0 if t >= t0 else 0.0
    if name == "ramp":
        t0 = float(params.get("t0", 0.0))
        t1 = float(params.get("t1", t0 + 0.5))
        if t1 <= t0:
            raise ValueError(f"ramp needs t1 > t0, got [{t0}, {t1}]")

        def ramp(t):
            if t <= t0:
                return 0.0
            if t >= t1:
                return 1.0
            return float(np.sin(0.5 * np.pi * (t - t0) / (t1 - t0)) ** 2)

        return ramp
    if name == "gaussian":
        t0 = float(params.get("t0", 0.5))
        width = float(params.get("width", 0.1))
        if width <= 0.0:
            raise ValueError("gaussian width must be positive")
        return lambda t: float(np.exp(-0.5 * ((t - t0) / width) ** 2))
    raise ValueError(f"unknown time profile {name!r}; use step, ramp, or gaussian")


def spatial_profile(problem: ed.EddyProblem, name: str, params: dict, seed: int = 0):
    """Edge vector by name: 'random_h0' or 'monomial'.

    random_h0: seeded unit Gaussian in the reduced coordinates.
    monomial: x^a y^b z^c at edge midpoints placed on the edges of one axis
    (or all axes), projected onto the reduced state space and normalized.
    """
    if name == "random_h0":
        rng = np.random.default_rng(int(params.get("seed", seed)))
        coords = rng.standard_normal(problem.h0.dim)
        vec = problem.h0.basis @ coords
        return vec / max(np.linalg.norm(vec), 1e-300)
    if name == "monomial":
        exps = params.get("exponents", [1, 0, 0])
        if len(exps) != 3:
            raise ValueError("monomial exponents must be three integers")
        axis = params.get("axis", "all")
        mids = edge_midpoints(problem.mesh)
        vals = np.prod(mids ** np.asarray(exps, dtype=float), axis=1)
        if axis != "all":
            axis = int(axis)
            vals = np.where(problem.mesh.edge_axis == axis, vals, 0.0)
        vec = project(problem.h0, vals)
        norm = np.linalg.norm(vec)
        if norm <= 1e-12:
            raise ValueError(
                "monomial profile projects to (numerically) zero in the "
                "reduced state space; pick different exponents"
            )
        return vec / norm
    raise ValueError(f"unknown spatial profile {name!r}; use random_h0 or monomial")


def source_signal(
    problem: ed.EddyProblem,
    grid: WeightedTimeGrid,
    source_cfg: dict,
    seed: int = 0,
) -> TimeSignal:
    """Separable edge-space signal s(t) * j(x) from a config block."""
    tname = source_cfg.get("time_profile", "ramp")
    sname = source_cfg.get("spatial_profile", "random_h0")
    profile = time_profile(tname, source_cfg)
    vec = spatial_profile(problem, sname, source_cfg, seed=seed)
    amplitude = float(source_cfg.get("amplitude", 1.0))
    return TimeSignal.from_profile(grid, profile, amplitude * vec)
