import numpy as np
import pytest

from evoeddy import complex3d as cx
from evoeddy import subspaces as ss


def brute_force_counts(n):
    """Slow enumeration of interior nodes and interior edges."""
    nodes = sum(
        1
        for i in range(n + 1)
        for j in range(n + 1)
        for k in range(n + 1)
        if 0 < i < n and 0 < j < n and 0 < k < n
    )
    edges = 0
    for axis in range(3):
        for i in range(n + 1):
            for j in range(n + 1):
                for k in range(n + 1):
                    coords = [i, j, k]
                    if coords[axis] >= n:
                        continue
                    tang = [coords[t] for t in range(3) if t != axis]
                    if all(0 < c < n for c in tang):
                        edges += 1
    return nodes, edges


class TestBuildMesh:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_entity_counts_against_enumeration(self, n):
        mesh = cx.build_mesh(n)
        nodes, edges = brute_force_counts(n)
        assert mesh.num_interior_nodes == nodes == (n - 1) ** 3
        assert mesh.num_interior_edges == edges == 3 * n * (n - 1) ** 2

    def test_central_cell_masks(self):
        mesh = cx.build_mesh(3, [[[1, 2], [1, 2], [1, 2]]])
        # brute-force edge classification for the single central cell
        n = 3
        conducting = np.zeros((n, n, n), dtype=bool)
        conducting[1, 1, 1] = True
        expected_closure = expected_strict = 0
        for axis, i, j, k in zip(mesh.edge_axis, *mesh.edge_coords.T):
            cells = []
            t1, t2 = [t for t in range(3) if t != axis]
            base = [i, j, k]
            for d1 in (-1, 0):
                for d2 in (-1, 0):
                    c = list(base)
                    c[t1] += d1
                    c[t2] += d2
                    cells.append(conducting[c[0], c[1], c[2]])
            expected_closure += any(cells)
            expected_strict += all(cells)
        assert mesh.edge_conducting_mask.sum() == expected_closure == 12
        assert mesh.edge_strict_mask.sum() == expected_strict == 0
        assert mesh.num_components == 1

    def test_margin_violation(self):
        with pytest.raises(ValueError, match="strictly inside"):
            cx.build_mesh(6, [[[0, 2], [2, 4], [2, 4]]])
        with pytest.raises(ValueError, match="strictly inside"):
            cx.build_mesh(6, [[[2, 4], [2, 4], [4, 6]]])

    def test_face_touching_boxes_merge(self):
        # boxes sharing a cell face form one connected region
        mesh = cx.build_mesh(6, [[[1, 3], [2, 4], [2, 4]], [[3, 5], [2, 4], [2, 4]]])
        assert mesh.num_components == 1

    def test_corner_touching_closures_rejected(self):
        # distinct components whose closures share the node line (3, 3, *)
        with pytest.raises(ValueError, match="disjoint closures"):
            cx.build_mesh(6, [[[1, 3], [1, 3], [2, 4]], [[3, 5], [3, 5], [2, 4]]])

    def test_two_components_detected(self):
        mesh = cx.build_mesh(6, [[[1, 2], [2, 4], [2, 4]], [[4, 5], [2, 4], [2, 4]]])
        assert mesh.num_components == 2

    def test_conducting_edges_inside_closure_nodes(self):
        mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
        closure = mesh.closure_node_mask()
        for eid in np.nonzero(mesh.edge_conducting_mask)[0]:
            axis = mesh.edge_axis[eid]
            tail = mesh.edge_coords[eid].copy()
            head = tail.copy()
            head[axis] += 1
            assert closure[tuple(tail)] and closure[tuple(head)]


@pytest.fixture(scope="module")
def ops4():
    mesh = cx.build_mesh(4, [[[1, 3], [1, 3], [1, 3]]])
    return mesh, cx.build_operators(mesh)


class TestOperators:
    def test_chain_matrix_is_exactly_zero(self, ops4):
        _, ops = ops4
        assert np.abs((ops.curl0 @ ops.grad0).toarray()).max() == 0.0

    def test_chain_identity_on_random_vectors(self, ops4):
        # sequential application leaves only floating-point roundoff at the
        # 1/h^2 scale of the composed stencil
        mesh, ops = ops4
        rng = np.random.default_rng(0)
        scale = mesh.n**2
        for _ in range(100):
            phi = rng.standard_normal(ops.grad0.shape[1])
            bound = 1e-14 * scale * max(1.0, np.linalg.norm(phi))
            assert np.abs(ops.curl0 @ (ops.grad0 @ phi)).max() <= bound

    def test_unconstrained_divergence_chain(self, ops4):
        _, ops = ops4
        prod = ops.div @ ops.curl_full
        assert np.abs(prod.toarray()).max() == 0.0

    def test_transpose_realizes_adjoint(self, ops4):
        _, ops = ops4
        rng = np.random.default_rng(1)
        for _ in range(10):
            e = rng.standard_normal(ops.curl0.shape[1])
            g = rng.standard_normal(ops.curl0.shape[0])
            lhs = np.dot(ops.curl0 @ e, g)
            rhs = np.dot(e, ops.curl0.T @ g)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_exactness_against_dense_svd_oracle(self, n):
        mesh = cx.build_mesh(n)
        ops = cx.build_operators(mesh)
        report = cx.exactness_report(ops)
        # independent oracle: dense SVD ranks
        rank_grad = np.linalg.matrix_rank(ops.grad0.toarray(), tol=1e-10)
        rank_curl = np.linalg.matrix_rank(ops.curl0.toarray(), tol=1e-10)
        dim_ker_curl = ops.curl0.shape[1] - rank_curl
        assert report["rank_grad0"] == rank_grad
        assert report["dim_kernel_curl0"] == dim_ker_curl
        assert report["dim_kernel_curl0"] == report["rank_grad0"]
        assert report["exact"]

    def test_grad_scaling(self):
        # a linear potential phi = x has unit gradient on x-edges
        mesh = cx.build_mesh(4)
        ops = cx.build_operators(mesh)
        idx = mesh.interior_node_index()
        phi = np.zeros(mesh.num_interior_nodes)
        for i in range(1, 4):
            for j in range(1, 4):
                for k in range(1, 4):
                    phi[idx[i, j, k]] = i * mesh.h
        g = ops.grad0 @ phi
        x_edges = mesh.edge_axis == 0
        interior_tangential = np.all(
            (mesh.edge_coords[:, 1:] >= 1) & (mesh.edge_coords[:, 1:] <= 2), axis=1
        )
        # x-edges strictly inside see the exact slope 1
        inner = x_edges & interior_tangential & (mesh.edge_coords[:, 0] >= 1) & (
            mesh.edge_coords[:, 0] <= 2
        )
        np.testing.assert_allclose(g[inner], 1.0, atol=1e-13)


class TestKernelLocalization:
    def test_empty_region_trivially_passes(self):
        mesh = cx.build_mesh(4)
        ops = cx.build_operators(mesh)
        rep = cx.check_kernel_localization(mesh, ops)
        assert rep["passed"]
        assert rep["conducting_kernel_localization"]["constrained_dim"] == 0

    def test_single_box(self, ):
        mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
        ops = cx.build_operators(mesh)
        rep = cx.check_kernel_localization(mesh, ops)
        assert rep["passed"]

    def test_two_disjoint_boxes(self):
        mesh = cx.build_mesh(6, [[[1, 2], [2, 4], [2, 4]], [[4, 5], [2, 4], [2, 4]]])
        ops = cx.build_operators(mesh)
        assert mesh.num_components == 2
        rep = cx.check_kernel_localization(mesh, ops)
        assert rep["passed"]


class TestDiamondGrad:
    def test_empty_region_returns_grad(self):
        mesh = cx.build_mesh(3)
        ops = cx.build_operators(mesh)
        G, info = cx.build_diamond_grad(mesh, ops)
        assert info["multiplier_dim"] == (3 - 1) ** 3
        assert np.abs((G - ops.grad0).toarray()).max() == 0.0

    def test_multiplier_counting(self):
        mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
        ops = cx.build_operators(mesh)
        G, info = cx.build_diamond_grad(mesh, ops)
        # counting oracle: closure nodes of the 2^3 block form a 3^3 grid
        closure_nodes = 27
        free = mesh.num_interior_nodes - closure_nodes
        assert info["free_nodes"] == free
        assert info["multiplier_dim"] == free + 1
        assert info["sigma_min"] > 0.0

    def test_range_annihilates_reduced_space(self):
        from evoeddy import eddy

        mesh = cx.build_mesh(6, [[[2, 4], [2, 4], [2, 4]]])
        ops = cx.build_operators(mesh)
        problem = eddy.assemble(mesh, ops)
        G, _ = cx.build_diamond_grad(mesh, ops)
        h0_perp = ss.complement(problem.h0)
        assert ss.subspace_gap(ss.column_space(G.toarray()), h0_perp) <= 1e-10


class TestRefinementSweep:
    @pytest.mark.parametrize("n", range(3, 9))
    def test_identities_hold(self, n):
        mesh = cx.build_mesh(n)
        ops = cx.build_operators(mesh)
        chain = ops.curl0 @ ops.grad0
        assert np.abs(chain.toarray()).max() <= 1e-14
        report = cx.exactness_report(ops)
        assert report["exact"]
