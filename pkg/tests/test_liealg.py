import numpy as np
import pytest
from hypothesis import given, strategies as st

from genricci.errors import AlgebraError, DegeneracyError, DimensionError, SignatureError
from genricci.liealg import (DoubleAlgebra, InvolutiveSplitting, QuadraticLieAlgebra,
                             build_abelian, build_so, build_su, check, direct_sum,
                             double, grading_check, killing_form, rescale_metric,
                             split_so_last, split_su_so, split_su_u1block)

from conftest import graded_double


def killing_oracle(alg):
    """Tr(ad_x ad_y) from explicitly assembled ad matrices."""
    n = alg.dim
    ads = [alg.ad(np.eye(n)[i]) for i in range(n)]
    return np.array([[np.trace(ads[i] @ ads[j]) for j in range(n)] for i in range(n)])


class TestBuilders:
    def test_so3_is_standard(self):
        alg = build_so(3, 0)
        assert alg.dim == 3
        assert alg.jacobi_violation < 1e-12
        # bracket table proportional to the Levi-Civita symbol
        f = alg.brackets
        eps = np.zeros((3, 3, 3))
        for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
            eps[i, j, k] = 1.0
            eps[i, k, j] = -1.0
        ratio = f[np.abs(eps) > 0] / eps[np.abs(eps) > 0]
        assert np.allclose(ratio, ratio[0])

    def test_so42_dimension(self):
        alg = build_so(4, 2)
        assert alg.dim == 15
        assert alg.jacobi_violation < 1e-9

    def test_so_too_small(self):
        with pytest.raises(DimensionError):
            build_so(1, 0)

    def test_su2_killing_is_minus_four(self):
        alg = build_su(2)
        kil = killing_form(alg)
        assert np.allclose(kil, -4.0 * np.eye(3), atol=1e-12)
        assert np.allclose(kil, killing_oracle(alg), atol=1e-12)

    def test_su3(self):
        alg = build_su(3)
        assert alg.dim == 8
        assert np.allclose(killing_form(alg), killing_oracle(alg), atol=1e-10)

    def test_su_too_small(self):
        with pytest.raises(DimensionError):
            build_su(1)

    def test_abelian(self):
        alg = build_abelian(2, np.eye(2))
        assert alg.jacobi_violation == 0.0
        assert np.allclose(killing_form(alg), 0.0)

    def test_abelian_rejects_indefinite(self):
        with pytest.raises(SignatureError):
            build_abelian(1, np.array([[-1.0]]))

    @given(st.integers(2, 4), st.integers(0, 2))
    def test_so_invariants_hold(self, p, q):
        alg = build_so(p, q)
        assert alg.antisymmetry_violation < 1e-10
        assert alg.jacobi_violation < 1e-9


class TestKillingAndRescale:
    def test_so42_killing_indefinite(self):
        kil = killing_form(build_so(4, 2))
        w = np.linalg.eigvalsh(kil)
        assert (w > 0).any() and (w < 0).any()

    def test_rescale_sets_metric(self, su2):
        # su2 fixture is already Killing/(-1)
        raw = build_su(2)
        assert np.allclose(su2.metric, -killing_form(raw))

    def test_rescale_zero_rejected(self):
        with pytest.raises(AlgebraError):
            rescale_metric(build_su(2), 0.0)

    def test_rescale_abelian_rejected(self):
        with pytest.raises(DegeneracyError):
            rescale_metric(build_abelian(2, np.eye(2)), 1.0)

    @given(st.sampled_from([-3.0, -1.0, 0.5, 2.0]))
    def test_rescale_preserves_brackets(self, lam):
        alg = build_su(3)
        assert np.allclose(rescale_metric(alg, lam).brackets, alg.brackets, atol=1e-10)


class TestDouble:
    @pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
    @pytest.mark.parametrize("name", ["su2", "su3", "so32"])
    def test_jacobi(self, name, c):
        dbl = graded_double(name, c)
        assert dbl.algebra.jacobi_violation < 1e-10

    def test_pairing_blocks(self, su2):
        dbl = double(su2, 0.7)
        n = su2.dim
        g = dbl.algebra.metric
        assert np.allclose(g[:n, :n], 0.0)
        assert np.allclose(g[n:, n:], 0.0)
        assert np.allclose(g[:n, n:], su2.metric)

    def test_bracket_blocks(self, su2):
        c = -0.3
        dbl = double(su2, c)
        n = su2.dim
        rng = np.random.default_rng(1)
        u, v = rng.normal(size=n), rng.normal(size=n)
        base = su2.bracket(u, v)
        ext = np.zeros(2 * n)
        # [u, v] = [u,v]
        ext[:n] = u
        lhs = dbl.algebra.bracket(np.concatenate([u, np.zeros(n)]),
                                  np.concatenate([v, np.zeros(n)]))
        assert np.allclose(lhs, np.concatenate([base, np.zeros(n)]))
        # [u, tv] = t[u,v]
        lhs = dbl.algebra.bracket(np.concatenate([u, np.zeros(n)]),
                                  np.concatenate([np.zeros(n), v]))
        assert np.allclose(lhs, np.concatenate([np.zeros(n), base]))
        # [tu, tv] = c[u,v]
        lhs = dbl.algebra.bracket(np.concatenate([np.zeros(n), u]),
                                  np.concatenate([np.zeros(n), v]))
        assert np.allclose(lhs, np.concatenate([c * base, np.zeros(n)]))

    def test_abelian_double(self):
        dbl = double(build_abelian(1, np.eye(1)), 0.0)
        assert dbl.algebra.dim == 2
        assert np.allclose(dbl.algebra.structure, 0.0)
        assert dbl.algebra.metric[0, 1] == 1.0

    def test_grading_induced(self, su2_double):
        grad = su2_double.grading
        assert grad.dim1 == 4 and grad.dim0 == 2


class TestDirectSum:
    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            direct_sum([])

    def test_two_abelian(self):
        s = direct_sum([build_abelian(1, np.eye(1)), build_abelian(2, 2 * np.eye(2))])
        assert s.dim == 3 and s.block_offsets == (0, 1)

    def test_su2_su2(self, su2):
        s = direct_sum([su2, su2])
        assert s.jacobi_violation < 1e-10

    def test_killing_block_diagonal(self, su2, su3):
        s = direct_sum([su2, su3])
        kil = killing_form(s)
        assert np.allclose(kil[:3, :3], killing_form(su2), atol=1e-10)
        assert np.allclose(kil[3:, 3:], killing_form(su3), atol=1e-10)
        assert np.allclose(kil[:3, 3:], 0.0)


class TestCheckAndGrading:
    def test_abelian_report(self):
        rep = check(build_abelian(2, np.eye(2)))
        assert rep.passed and rep.max_residual == 0.0

    def test_su3_report(self, su3):
        rep = check(su3)
        assert rep.passed and rep.max_residual < 1e-10

    def test_corrupted_tensor_flagged(self, su2):
        c = su2.structure.copy()
        c[0, 1, 2] += 0.37
        bad = QuadraticLieAlgebra(su2.dim, su2.metric, c, validate=False)
        rep = check(bad)
        assert not rep.passed
        assert rep.residuals["antisymmetry"] > 0.1

    def test_su2_u1_grading(self, su2):
        rep = grading_check(su2, split_su_u1block(2))
        assert rep.passed

    def test_abelian_any_split(self):
        alg = build_abelian(3, np.eye(3))
        rep = grading_check(alg, InvolutiveSplitting((0,), (1, 2)))
        assert rep.residuals["bracket_00_in_0"] == 0.0

    def test_su3_wrong_split_fails(self, su3):
        # {H1, A12} is not closed: [H1, A12] lands on S12
        rep = grading_check(su3, InvolutiveSplitting((0, 2), (1,) + tuple(range(3, 8))))
        assert not rep.passed

    @pytest.mark.parametrize("name,maker", [
        ("su2", lambda: (build_su(2), split_su_u1block(2))),
        ("su3", lambda: (build_su(3), split_su_so(3))),
        ("so32", lambda: (build_so(3, 2), split_so_last(3, 2))),
        ("so6", lambda: (build_so(6, 0), split_so_last(6, 0))),
    ])
    def test_shipped_splits(self, name, maker):
        alg, split = maker()
        assert grading_check(alg, split).passed

    def test_split_overlap_rejected(self):
        with pytest.raises(AlgebraError):
            InvolutiveSplitting((0, 1), (1, 2))


def test_double_requires_grading_for_vectors(su2):
    dbl = double(su2, 0.0)
    with pytest.raises(AlgebraError):
        dbl.plus_vectors()
    assert isinstance(graded_double("su2", 0.0), DoubleAlgebra)
