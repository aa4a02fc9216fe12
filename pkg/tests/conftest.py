import numpy as np
import pytest

from evoeddy import complex3d as cx
from evoeddy import eddy


@pytest.fixture(scope="session")
def n6_center():
    """Canonical 6^3 mesh with a centered 2^3 conducting block."""
    mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
    ops = cx.build_operators(mesh)
    problem = eddy.assemble(mesh, ops, sigma_tilde=1.0, mu=1.0)
    return mesh, ops, problem


@pytest.fixture(scope="session")
def n4_empty():
    """4^3 mesh without any conducting region (sigma = 0)."""
    mesh = cx.build_mesh(4)
    ops = cx.build_operators(mesh)
    problem = eddy.assemble(mesh, ops, sigma_tilde=1.0, mu=1.0)
    return mesh, ops, problem


@pytest.fixture(scope="session")
def n6_twoboxes():
    """Two conducting slabs with a one-cell gap (two components)."""
    mesh = cx.build_mesh(6, [[[1, 2], [2, 4], [2, 4]], [[4, 5], [2, 4], [2, 4]]])
    ops = cx.build_operators(mesh)
    problem = eddy.assemble(mesh, ops, sigma_tilde=2.0, mu=1.0)
    return mesh, ops, problem


def h0_vector(problem, rng):
    """Unit vector in the reduced state space of an assembled problem."""
    v = problem.h0.basis @ rng.standard_normal(problem.h0.dim)
    return v / np.linalg.norm(v)
