"""P2 periodic finite-element reference solver."""
import numpy as np
import pytest

from vpaw1d import ModelParams, SmoothPotential, build_mesh, fem_solve
from vpaw1d.errors import MeshError
from vpaw1d.fem import _K_REF, _M_REF, _shape
from vpaw1d.quadrature import gl_rule


class TestMesh:
    def test_sites_are_nodes(self):
        mesh = build_mesh(0.4, 100)
        assert mesh.nodes[0] == 0.0
        assert mesh.nodes[mesh.index_of_a] == 0.4
        assert np.all(np.diff(mesh.nodes) > 0)

    def test_snapping_moves_nearest(self):
        mesh = build_mesh(0.40003, 128)
        assert mesh.nodes[mesh.index_of_a] == 0.40003
        # snapped neighbors stay within half a cell of uniform
        assert mesh.h_max < 1.5 / 128

    def test_too_coarse_rejected(self):
        with pytest.raises(MeshError):
            build_mesh(0.4, 4)

    def test_reference_matrices_match_quadrature(self):
        # exact P2 element matrices against a 5-point Gauss rule
        xi, w = gl_rule(5)
        xi = 0.5 * (xi + 1)
        w = 0.5 * w
        shp = _shape(xi)
        h = 1e-3
        dshp = np.array([(4 * xi - 3), (4 - 8 * xi), (4 * xi - 1)])
        K = (dshp * w) @ dshp.T  # 1/h scaling folded out
        M = (shp * w) @ shp.T
        np.testing.assert_allclose(K, _K_REF, atol=1e-14)
        np.testing.assert_allclose(M, _M_REF, atol=1e-15)


class TestFemSolve:
    def test_free_laplacian(self):
        # honest P2 eigenvalue convergence is ~lambda^3 h^4 / 690: relative
        # 1.3e-7 at 64 elements, passing 1e-8 one refinement later
        m = ModelParams(Z0=0.0, Za=0.0, a=0.4)
        want = (2 * np.pi) ** 2
        res64 = fem_solve(m, 64, 3)
        assert abs(res64.values[0]) < 1e-8
        for got in res64.values[1:]:
            assert got == pytest.approx(want, rel=2e-7)
        res128 = fem_solve(m, 128, 3)
        for got in res128.values[1:]:
            assert got == pytest.approx(want, rel=1e-8)

    def test_matches_analytic_at_production_mesh(self, model, spectrum10):
        res = fem_solve(model, 4096, 2)
        for got, p in zip(res.values, spectrum10[:2]):
            assert got == pytest.approx(p.E, rel=1e-10)

    def test_from_above_and_mesh_doubling(self, model, spectrum10):
        exact = spectrum10[0].E
        errs = []
        for n in [64, 128, 256, 512]:
            E = fem_solve(m_elems := model, n, 1).values[0]
            assert E >= exact - 1e-12
            errs.append(E - exact)
        diffs = [abs(a - b) for a, b in zip(errs[:-1], errs[1:])]
        assert diffs == sorted(diffs, reverse=True)

    def test_perturbed_model_richardson_stable(self):
        m = ModelParams(Z0=10.0, Za=10.0, a=0.4, W=SmoothPotential(10.0, 1, 0.2))
        Es = {n: fem_solve(m, n, 1).values[0] for n in [1024, 2048, 4096]}
        r1 = Es[2048] + (Es[2048] - Es[1024]) / 15
        r2 = Es[4096] + (Es[4096] - Es[2048]) / 15
        assert abs(r1 - r2) <= 1e-10 * abs(r2)

    def test_dense_sparse_agree(self, model):
        a = fem_solve(model, 128, 4, solver="dense")
        b = fem_solve(model, 128, 4, solver="sparse")
        np.testing.assert_allclose(a.values, b.values, rtol=1e-11)

    def test_residuals_small(self, model):
        res = fem_solve(model, 256, 3)
        assert (res.residuals <= 1e-7).all()
