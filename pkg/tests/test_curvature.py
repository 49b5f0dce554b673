import numpy as np
import pytest

from genricci.curvature import (Divergence, action_value, background_equations,
                                dsquared, flow_admissibility, gradient_check, gric,
                                gric_contract, gric_div_shift_check, gric_flip_check,
                                gric_matrix, ricci_flow, scalar_curvature,
                                tangency_check)
from genricci.errors import AlgebraError
from genricci.genmetric import (GeneralizedMetric, IsotropicSubalgebra, deform,
                                vplus_of_double)
from genricci.liealg import (QuadraticLieAlgebra, build_abelian, double,
                             killing_form, build_su, InvolutiveSplitting)

from conftest import graded_double


def gric_bruteforce(alg, v, eps=None):
    """GRic from first principles: explicit dual bases and elementwise loops."""
    g = alg.metric
    sp, sm = v.span_plus, v.span_minus
    gram_inv = np.linalg.inv(sp.T @ g @ sp)
    dual_plus = sp @ gram_inv.T   # <dual_a, e_b> = delta
    proj_minus = np.eye(alg.dim) - sp @ gram_inv @ sp.T @ g
    proj_plus = np.eye(alg.dim) - proj_minus
    r, k = sp.shape[1], sm.shape[1]
    out = np.zeros((r, k))
    for a in range(r):
        for bb in range(k):
            val = 0.0
            if eps is not None:
                val += eps @ g @ (proj_plus @ alg.bracket(sm[:, bb], sp[:, a]))
            tr = 0.0
            for b in range(r):
                w = alg.bracket(proj_minus @ alg.bracket(sp[:, b], sm[:, bb]), sp[:, a])
                tr += dual_plus[:, b] @ g @ (proj_plus @ w)
            out[a, bb] = val - tr
    return out


def random_metric(alg, rank, rng, tries=50):
    for _ in range(tries):
        span = rng.normal(size=(alg.dim, rank))
        try:
            return GeneralizedMetric(alg, span)
        except Exception:
            continue
    raise RuntimeError("could not sample a nondegenerate V+")


class TestGRic:
    def test_abelian_is_flat(self):
        dbl = double(build_abelian(2, np.eye(2)), 0.0,
                     InvolutiveSplitting((), (0, 1)))
        v = vplus_of_double(dbl)
        assert np.allclose(gric(dbl.algebra, v).matrix, 0.0)
        assert scalar_curvature(dbl.algebra, v) == 0.0

    def test_matches_bruteforce_su2(self):
        dbl = graded_double("su2", 0.0)
        v = vplus_of_double(dbl)
        assert np.allclose(gric_matrix(dbl.algebra, v), gric_bruteforce(dbl.algebra, v),
                           atol=1e-12)

    def test_matches_bruteforce_with_divergence(self, rng):
        dbl = graded_double("so32", -0.5)
        v = vplus_of_double(dbl)
        eps = rng.normal(size=dbl.dim)
        got = gric_matrix(dbl.algebra, v, Divergence(eps))
        assert np.allclose(got, gric_bruteforce(dbl.algebra, v, eps), atol=1e-11)

    @pytest.mark.parametrize("c", [-1.0, -0.5, 0.0, 0.7, 1.0])
    def test_block_lemma_su2(self, c):
        dbl = graded_double("su2", c)
        v = vplus_of_double(dbl)
        gm = gric_matrix(dbl.algebra, v)
        kil = killing_form(build_su(2))
        idx = list(dbl.base_split.indices1)
        assert np.allclose(gm[:, :2], 0.5 * (c - 1.0) * kil[np.ix_(idx, idx)],
                           atol=1e-10)
        assert np.allclose(gm[:, 2:], 0.0, atol=1e-10)   # a0 directions

    def test_covariance_under_basis_change(self, rng):
        dbl = graded_double("su3", 0.3)
        v = vplus_of_double(dbl)
        m = rng.normal(size=(v.rank, v.rank)) + np.eye(v.rank)
        n = rng.normal(size=(dbl.dim - v.rank,) * 2) + np.eye(dbl.dim - v.rank)
        w = GeneralizedMetric(dbl.algebra, v.span_plus @ m, v.span_minus @ n)
        assert np.allclose(gric_matrix(dbl.algebra, w),
                           m.T @ gric_matrix(dbl.algebra, v) @ n, atol=1e-9)


class TestDivergenceIdentities:
    def test_shift_zero(self, rng):
        dbl = graded_double("su2", 0.3)
        v = vplus_of_double(dbl)
        d0 = Divergence(np.zeros(dbl.dim))
        rep = gric_div_shift_check(dbl.algebra, v, d0, d0)
        assert rep.max_residual == 0.0

    def test_shift_random(self, rng):
        dbl = graded_double("su2", 0.3)
        v = vplus_of_double(dbl)
        d0 = Divergence(rng.normal(size=dbl.dim))
        d1 = Divergence(rng.normal(size=dbl.dim))
        assert gric_div_shift_check(dbl.algebra, v, d0, d1).max_residual < 1e-9
        # both sides independently
        lhs = gric_bruteforce(dbl.algebra, v, d1.eps) - gric_bruteforce(dbl.algebra, v, d0.eps)
        e_plus = v.proj_plus @ (d1.eps - d0.eps)
        g = dbl.algebra.metric
        rhs = np.array([[-(dbl.algebra.bracket(e_plus, v.span_plus[:, a]) @ g
                           @ v.span_minus[:, b])
                         for b in range(dbl.dim - v.rank)] for a in range(v.rank)])
        assert np.allclose(lhs, rhs, atol=1e-10)

    def test_shift_in_vminus_vanishes(self, rng):
        dbl = graded_double("su2", 0.0)
        v = vplus_of_double(dbl)
        eps = v.span_minus @ rng.normal(size=dbl.dim - v.rank)
        g0 = gric_matrix(dbl.algebra, v)
        g1 = gric_matrix(dbl.algebra, v, Divergence(eps))
        # e_+ = 0, so the tensors agree up to the div term <eps, [b-, a+]_+>
        shift = g1 - g0
        brute = gric_bruteforce(dbl.algebra, v, eps) - gric_bruteforce(dbl.algebra, v)
        assert np.allclose(shift, brute, atol=1e-11)

    def test_flip_symmetric_at_zero_div(self):
        for name in ("su2", "su3", "so32"):
            dbl = graded_double(name, 0.4)
            v = vplus_of_double(dbl)
            assert gric_flip_check(dbl.algebra, v).max_residual < 1e-9

    def test_flip_with_invariant_divergence(self):
        dbl = graded_double("su2", 0.0)
        v = vplus_of_double(dbl)
        # eps in the a0 direction: [eps, .] preserves V+ (adapted grading)
        eps = np.zeros(dbl.dim)
        eps[0] = 1.3
        assert gric_flip_check(dbl.algebra, v, Divergence(eps)).max_residual < 1e-9


class TestScalarAndAction:
    @pytest.mark.parametrize("c,lam", [(1.0, -1.0), (0.0, -1.0), (0.7, -2.0)])
    def test_biggamma_value(self, c, lam):
        from genricci.liealg import rescale_metric, split_su_u1block
        dbl = double(rescale_metric(build_su(2), lam), c, split_su_u1block(2))
        v = vplus_of_double(dbl)
        assert abs(scalar_curvature(dbl.algebra, v) - (1 + c) / 4 * lam * 2) < 1e-12

    def test_spot_value_minus_one(self):
        from genricci.liealg import rescale_metric, split_su_u1block
        dbl = double(rescale_metric(build_su(2), -1.0), 1.0, split_su_u1block(2))
        assert abs(scalar_curvature(dbl.algebra, vplus_of_double(dbl)) + 1.0) < 1e-12

    def test_divergence_shift_of_scalar(self, rng):
        dbl = graded_double("su3", 0.2)
        v = vplus_of_double(dbl)
        eps = rng.normal(size=dbl.dim)
        base = scalar_curvature(dbl.algebra, v)
        shifted = scalar_curvature(dbl.algebra, v, Divergence(eps))
        eps_plus = v.proj_plus @ eps
        assert abs(shifted - base - eps_plus @ dbl.algebra.metric @ eps_plus) < 1e-10

    def test_action_spot_value(self):
        from genricci.liealg import rescale_metric, split_su_u1block
        dbl = double(rescale_metric(build_su(2), -1.0), 1.0, split_su_u1block(2))
        assert abs(action_value(dbl.algebra, vplus_of_double(dbl)) - 0.5) < 1e-12

    def test_frame_independence(self, rng):
        dbl = graded_double("su3", -0.4)
        v = vplus_of_double(dbl)
        s0 = scalar_curvature(dbl.algebra, v)
        m = rng.normal(size=(v.rank, v.rank)) + 2 * np.eye(v.rank)
        w = GeneralizedMetric(dbl.algebra, v.span_plus @ m)
        assert abs(scalar_curvature(dbl.algebra, w) - s0) < 1e-9
        assert abs(action_value(dbl.algebra, w) - action_value(dbl.algebra, v)) < 1e-9


class TestGradient:
    def test_zero_deformation(self):
        dbl = graded_double("su2", 0.1)
        v = vplus_of_double(dbl)
        rep = gradient_check(dbl.algebra, v, np.zeros((2, 4)))
        assert rep.info["numeric"] == 0.0 and rep.info["analytic"] == 0.0

    @pytest.mark.parametrize("name", ["su2", "su3", "so32"])
    def test_random_pairs(self, name, rng):
        dbl = graded_double(name, 0.2)
        for _ in range(5):
            v = random_metric(dbl.algebra, vplus_of_double(dbl).rank, rng)
            phi = rng.normal(size=(v.rank, dbl.dim - v.rank)) * 0.3
            rep = gradient_check(dbl.algebra, v, phi)
            assert rep.residuals["gradient_rel_err"] < 1e-5


class TestDsquared:
    def test_abelian(self):
        assert dsquared(build_abelian(3, np.eye(3))) == 0.0

    def test_su2_against_triple_sum(self, su2):
        raised = np.einsum("abc,ai,bj,ck->ijk", su2.structure, su2.metric_inv,
                           su2.metric_inv, su2.metric_inv)
        brute = -sum(su2.structure[a, b, c] * raised[a, b, c]
                     for a in range(3) for b in range(3) for c in range(3)) / 48.0
        assert abs(dsquared(su2) - brute) < 1e-14

    def test_orthogonal_frame_invariance(self, su2, rng):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        metric = q.T @ su2.metric @ q
        structure = np.einsum("abc,ai,bj,ck->ijk", su2.structure, q, q, q)
        rotated = QuadraticLieAlgebra(3, metric, structure)
        assert abs(dsquared(rotated) - dsquared(su2)) < 1e-12


class TestTangency:
    def test_admissible_setup_vanishes(self, su2_double):
        v = vplus_of_double(su2_double)
        sv = np.zeros((6, 1))
        sv[0, 0] = 1.0
        s = IsotropicSubalgebra(su2_double.algebra, sv)
        assert tangency_check(su2_double.algebra, v, s).max_residual < 1e-12

    def test_non_invariant_control(self, su2_double, rng):
        sv = np.zeros((6, 1))
        sv[0, 0] = 1.0
        s = IsotropicSubalgebra(su2_double.algebra, sv)
        v = random_metric(su2_double.algebra, 2, rng)
        assert tangency_check(su2_double.algebra, v, s).max_residual > 1e-6


class TestFlow:
    def test_dt_positive_required(self, su2_double):
        v = vplus_of_double(su2_double)
        with pytest.raises(AlgebraError):
            ricci_flow(su2_double.algebra, v, None, 1.0, 0.0)

    def test_abelian_constant(self):
        dbl = double(build_abelian(2, np.eye(2)), 0.0,
                     InvolutiveSplitting((), (0, 1)))
        v = vplus_of_double(dbl)
        res = ricci_flow(dbl.algebra, v, None, 0.1, 0.01)
        assert res.completed
        assert all(abs(st.action) < 1e-14 for st in res.states)
        assert np.allclose(res.states[-1].metric.proj_plus, v.proj_plus, atol=1e-12)

    def test_chain_rule_along_flow(self, su2_double):
        v0 = vplus_of_double(su2_double)
        res = ricci_flow(su2_double.algebra, v0, None, 0.2, 1e-3)
        algebra = su2_double.algebra
        for st in res.states[::50]:
            v = st.metric
            gm = gric_matrix(algebra, v)
            phi = (v.gram_minus_inv @ gm.T).T
            analytic = gric_contract(v, gm, phi)
            h = 1e-6
            num = (action_value(algebra, deform(v, phi, h))
                   - action_value(algebra, deform(v, phi, -h))) / (2 * h)
            assert abs(num - analytic) < 1e-4 * max(1.0, abs(analytic))

    def test_monotone_for_definite_complement(self, su2):
        # V+ = (1+t) a is positive definite with V- = (1-t) a negative definite
        dbl = double(su2, 0.0)
        n = su2.dim
        span = np.vstack([np.eye(n), np.eye(n)])
        rng = np.random.default_rng(3)
        v0 = GeneralizedMetric(dbl.algebra, span + 0.2 * rng.normal(size=span.shape))
        res = ricci_flow(dbl.algebra, v0, None, 0.5, 1e-2)
        actions = [st.action for st in res.states]
        assert all(b <= a + 1e-12 for a, b in zip(actions, actions[1:]))

    def test_flow_tangency(self, su2_double):
        v0 = vplus_of_double(su2_double)
        sv = np.zeros((6, 1))
        sv[0, 0] = 1.0
        s = IsotropicSubalgebra(su2_double.algebra, sv)
        res = ricci_flow(su2_double.algebra, v0, None, 0.3, 1e-2)
        assert flow_admissibility(res, s) < 1e-8

    def test_csv_export(self, su2_double):
        v0 = vplus_of_double(su2_double)
        res = ricci_flow(su2_double.algebra, v0, None, 0.02, 1e-2)
        text = res.to_csv_string()
        lines = text.strip().splitlines()
        assert lines[0].startswith("# schema: genricci-flow-v1")
        header = lines[1].split(",")
        assert header[:3] == ["t", "S", "norm_gric"]
        assert len(header) == 3 + v0.span_plus.size
        assert len(lines) == 2 + 3


class TestBackgroundEquations:
    def test_abelian_satisfied(self):
        dbl = double(build_abelian(2, np.eye(2)), 0.0,
                     InvolutiveSplitting((), (0, 1)))
        assert background_equations(dbl.algebra, vplus_of_double(dbl)).passed

    def test_random_violated(self, rng):
        dbl = graded_double("su3", 0.5)
        v = random_metric(dbl.algebra, 5, rng)
        assert not background_equations(dbl.algebra, v).passed
