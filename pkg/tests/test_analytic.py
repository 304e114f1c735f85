"""Exact-spectrum module: secular functions, eigenpairs, atomic functions."""
import numpy as np
import pytest

from vpaw1d import (ModelParams, atomic_spectrum, eval_eigenfunction,
                    secular_value, solve_spectrum)
from vpaw1d.analytic import COS_BRANCH, COSH_BRANCH, NEGATIVE, POSITIVE
from vpaw1d.errors import OrderOutOfRange, SideRequired

from conftest import quad_piecewise


class TestSecular:
    def test_vanishes_at_zero(self, model):
        assert abs(secular_value(1e-10, model, NEGATIVE)) < 1e-12
        assert abs(secular_value(1e-10, model, POSITIVE)) < 1e-12

    def test_positive_branch_at_2pi(self, model):
        # 1 - cos and sin vanish at 2 pi, leaving only the product term.
        # (Sign per the determinant of the continuity/jump system: the term
        # enters with a minus, the analytic continuation of the negative
        # branch; note sin(2 pi (1-a)) = -sin(2 pi a).)
        got = secular_value(2 * np.pi, model, POSITIVE)
        want = -model.Z0 * model.Za * np.sin(2 * np.pi * model.a) * np.sin(2 * np.pi * (1 - model.a))
        assert got == pytest.approx(want, rel=1e-12)
        assert got > 0  # equals +Z0 Za sin^2(2 pi a)

    def test_negative_branch_two_sign_changes(self, model):
        ws = np.arange(1e-3, 20.0, 1e-3)
        vals = secular_value(ws, model, NEGATIVE)
        changes = int(np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
        assert changes == 2

    def test_rejects_perturbed_model(self, model):
        from vpaw1d import SmoothPotential
        pert = ModelParams(Z0=10, Za=10, a=0.4, W=SmoothPotential(10, 1, 0.2))
        with pytest.raises(ValueError):
            secular_value(1.0, pert, NEGATIVE)


def bilinear_form(pair, u, v=None):
    """a(u, u) = int u'^2 - Z0 u(0)^2 - Za u(a)^2 by independent quadrature."""
    p = pair.params
    du = lambda x: eval_eigenfunction(pair, x, 1)
    val = quad_piecewise(lambda x: du(x) ** 2, [1e-12, p.a, 1 - 1e-12])
    u0 = eval_eigenfunction(pair, 0.0)
    ua = eval_eigenfunction(pair, p.a)
    return val - p.Z0 * u0 ** 2 - p.Za * ua ** 2


class TestSpectrum:
    def test_two_negative_eigenvalues(self, spectrum10):
        assert sum(1 for p in spectrum10 if p.E < 0) == 2
        assert spectrum10[0].E < spectrum10[1].E < 0

    def test_sorted(self, spectrum10):
        Es = [p.E for p in spectrum10]
        assert Es == sorted(Es)

    def test_secular_residual(self, model, spectrum10):
        for p in spectrum10:
            f = secular_value(p.omega, model, p.branch)
            h = 1e-6
            fp = (secular_value(p.omega + h, model, p.branch)
                  - secular_value(p.omega - h, model, p.branch)) / (2 * h)
            assert abs(f) <= 1e-12 * (1 + abs(fp))

    def test_continuity(self, spectrum10):
        for p in spectrum10:
            a = p.params.a
            scale = max(1.0, abs(eval_eigenfunction(p, a)))
            va = eval_eigenfunction(p, a - 1e-15) - eval_eigenfunction(p, a + 1e-15)
            v0 = eval_eigenfunction(p, 1e-16) - eval_eigenfunction(p, 1 - 1e-16)
            assert abs(va) <= 1e-12 * scale
            assert abs(v0) <= 1e-12 * scale

    def test_jump_conditions(self, spectrum10):
        for p in spectrum10:
            a = p.params.a
            j0 = (eval_eigenfunction(p, 0.0, 1, side=+1)
                  - eval_eigenfunction(p, 0.0, 1, side=-1))
            ja = (eval_eigenfunction(p, a, 1, side=+1)
                  - eval_eigenfunction(p, a, 1, side=-1))
            w0 = -p.params.Z0 * eval_eigenfunction(p, 0.0)
            wa = -p.params.Za * eval_eigenfunction(p, a)
            scale = max(abs(w0), abs(wa), 1.0)
            assert abs(j0 - w0) <= 1e-10 * scale
            assert abs(ja - wa) <= 1e-10 * scale

    def test_l2_normalized(self, spectrum10):
        for p in spectrum10:
            a = p.params.a
            val = quad_piecewise(lambda x: eval_eigenfunction(p, x) ** 2,
                                 [1e-14, a, 1 - 1e-14])
            assert val == pytest.approx(1.0, abs=1e-12)

    def test_rayleigh_quotient(self, spectrum10):
        for p in spectrum10:
            assert bilinear_form(p, None) == pytest.approx(p.E, rel=1e-9)

    def test_symmetric_configuration(self):
        # equal strengths at distance 1/2: shifting by half a period maps the
        # potential to itself, so each eigenfunction is sym/antisym under it
        m = ModelParams(Z0=10.0, Za=10.0, a=0.5)
        p0 = solve_spectrum(m, 1)[0]
        xs = np.linspace(0.01, 0.99, 173)
        v = eval_eigenfunction(p0, xs)
        vs = eval_eigenfunction(p0, (xs + 0.5) % 1.0)
        sigma = np.sign(np.sum(v * vs))
        assert np.abs(vs - sigma * v).max() < 1e-9

    @pytest.mark.parametrize("Z0", [5.0, 10.0, 20.0])
    @pytest.mark.parametrize("Za", [5.0, 10.0, 20.0])
    @pytest.mark.parametrize("a", [0.3, 0.4, 0.5])
    def test_negative_count_matches_fem_across_grid(self, Z0, Za, a):
        # Two negative eigenvalues at strong coupling; at weak coupling the
        # antisymmetric state moves above zero and only one remains.  The
        # secular count must match the independent finite-element oracle
        # either way (and equals two at the canonical parameters).
        from vpaw1d import fem_solve
        m = ModelParams(Z0=Z0, Za=Za, a=a)
        pairs = solve_spectrum(m, 4)
        n_neg = sum(1 for p in pairs if p.E < 0)
        fem_neg = int(np.sum(fem_solve(m, 1024, 4).values < -1e-8))
        assert n_neg == fem_neg
        assert n_neg in (1, 2)
        if (Z0, Za, a) == (10.0, 10.0, 0.4):
            assert n_neg == 2

    def test_matches_fem_reference(self, model, spectrum10):
        from vpaw1d import fem_solve
        fem = fem_solve(model, 4096, 10)
        for p, ef in zip(spectrum10, fem.values):
            assert ef == pytest.approx(p.E, rel=1e-9)


class TestAtomic:
    def test_cosh_root_matches_bisection_oracle(self):
        # independent oracle: bisection on the jump residual of the closed form
        Z, om = 10.0, None

        def residual(w):
            # [phi']_0 + Z phi(0) with phi = cosh(w (x - 1/2))
            jump = -2 * w * np.sinh(w / 2)
            return jump + Z * np.cosh(w / 2)

        lo, hi = 1e-6, 30.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if residual(lo) * residual(mid) <= 0:
                hi = mid
            else:
                lo = mid
        om = 0.5 * (lo + hi)
        fn = atomic_spectrum(Z, 1)[0]
        assert fn.branch == COSH_BRANCH
        assert fn.eps < 0
        assert fn.omega == pytest.approx(om, abs=1e-12)

    def test_weak_form_oracle(self):
        # int phi' v' - Z phi(0) v(0) = eps int phi v for random periodic v
        Z = 10.0
        fns = atomic_spectrum(Z, 3)
        rng = np.random.default_rng(7)
        for fn in fns:
            for _ in range(20):
                ks = rng.integers(1, 6, size=3)
                cs = rng.standard_normal(3)
                ss = rng.standard_normal(3)
                v = lambda x: sum(c * np.cos(2 * np.pi * k * x) + s * np.sin(2 * np.pi * k * x)
                                  for k, c, s in zip(ks, cs, ss))
                dv = lambda x: sum(2 * np.pi * k * (-c * np.sin(2 * np.pi * k * x)
                                                    + s * np.cos(2 * np.pi * k * x))
                                   for k, c, s in zip(ks, cs, ss))
                lhs = quad_piecewise(
                    lambda x: eval_eigenfunction(fn, x, 1) * dv(x), [1e-14, 1 - 1e-14])
                lhs -= Z * fn.value_at_site * v(0.0)
                rhs = fn.eps * quad_piecewise(
                    lambda x: eval_eigenfunction(fn, x) * v(x), [1e-14, 1 - 1e-14])
                scale = max(abs(lhs), abs(rhs), 1.0)
                assert abs(lhs - rhs) <= 1e-9 * scale

    def test_ordering_and_nonvanishing(self):
        fns = atomic_spectrum(10.0, 4)
        eps = [f.eps for f in fns]
        assert eps[0] < 0 < eps[1] < eps[2] < eps[3]
        assert all(abs(f.value_at_site) > 0 for f in fns)
        oms = [f.omega for f in fns]
        assert len(set(oms)) == len(oms)

    def test_jump_condition(self):
        for fn in atomic_spectrum(10.0, 3):
            jump = (eval_eigenfunction(fn, fn.site, 1, side=+1)
                    - eval_eigenfunction(fn, fn.site, 1, side=-1))
            want = -fn.Z * fn.value_at_site
            assert jump == pytest.approx(want, rel=1e-10)

    def test_agrees_with_single_site_secular_limit(self, model):
        # Za -> 0 limit of the secular functions factors through the atomic
        # jump equations; atomic omegas must zero the limit functions
        Z = 10.0
        fns = atomic_spectrum(Z, 3)
        w = fns[0].omega
        g = 2 * w**2 * (1 - np.cosh(w)) + Z * w * np.sinh(w)
        assert abs(g) <= 1e-9 * abs(2 * w**2 * np.cosh(w))
        for fn in fns[1:]:
            w = fn.omega
            g = 2 * w**2 * (1 - np.cos(w)) + Z * w * np.sin(w)
            assert abs(g) <= 1e-9 * (2 * w**2 + Z * w)

    def test_site_translation(self):
        fn = atomic_spectrum(10.0, 2, site=0.4)[1]
        fn0 = atomic_spectrum(10.0, 2, site=0.0)[1]
        xs = np.linspace(0, 1, 57)
        got = eval_eigenfunction(fn, xs + 0.4)
        want = eval_eigenfunction(fn0, xs)
        np.testing.assert_allclose(got, want, atol=1e-12)


class TestEvaluation:
    def test_cosh_branch_even_about_center(self):
        fn = atomic_spectrum(10.0, 1)[0]
        assert eval_eigenfunction(fn, 0.5, 1) == pytest.approx(0.0, abs=1e-12)

    def test_jump_recheck_at_a(self, spectrum10):
        p = spectrum10[0]
        a = p.params.a
        diff = (eval_eigenfunction(p, a, 1, side=+1)
                - eval_eigenfunction(p, a, 1, side=-1))
        assert diff == pytest.approx(-p.params.Za * eval_eigenfunction(p, a), rel=1e-10)

    def test_cos_branch_satisfies_ode(self):
        fn = atomic_spectrum(10.0, 2)[1]
        xs = np.array([0.13, 0.31, 0.62, 0.87])
        got = eval_eigenfunction(fn, xs, 2)
        want = -fn.omega ** 2 * eval_eigenfunction(fn, xs)
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_side_required(self, spectrum10):
        with pytest.raises(SideRequired):
            eval_eigenfunction(spectrum10[0], 0.0, 1)

    def test_order_cap(self, spectrum10):
        with pytest.raises(OrderOutOfRange):
            eval_eigenfunction(spectrum10[0], 0.3, 9)
        # order 8 is within contract
        val = eval_eigenfunction(spectrum10[0], 0.3, 8)
        assert np.isfinite(val)
