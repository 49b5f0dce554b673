"""Generating Dirac operator of a double, decomposed on the base exterior algebra.

On S = Lambda a* (letters = the dual basis of a, identified via the inner
product K) the generating operator of B_c (x) a with zero divergence reduces to

    D0 = d_CE - c * iota_f,
    d_CE   = -(1/2) f^{abg} j_a j_b iota_g      (Chevalley-Eilenberg),
    iota_f = (1/6) f^{abg} iota_a iota_b iota_g,

with j_a = wedge by K(E_a, .) and iota_a = contraction by the vector E_a;
indices are raised with K.  Both terms vanish separately on a0-invariant
forms in Lambda a1*.
"""

from __future__ import annotations

import numpy as np

from . import exterior as ext
from . import spinor as sp
from .errors import AlgebraError
from .liealg import DoubleAlgebra, InvolutiveSplitting, QuadraticLieAlgebra
from .report import ResidualReport


def d_ce(algebra: QuadraticLieAlgebra) -> ext.LetterWordOp:
    """Chevalley-Eilenberg differential on Lambda a* (degree +1, squares to zero)."""
    m = algebra.dim
    # c_{de}^g: last index raised with K
    mixed = np.einsum("dez,zg->deg", algebra.structure, algebra.metric_inv)
    terms = []
    for d in range(m):
        for e in range(d + 1, m):
            for g in range(m):
                coeff = mixed[d, e, g]
                if coeff != 0.0:
                    # factor 2 from restricting the antisymmetric sum to d < e
                    terms.append((-coeff, (("w", d), ("w", e), ("c", g))))
    return ext.LetterWordOp(m, terms)


def iota_f(algebra: QuadraticLieAlgebra) -> ext.LetterWordOp:
    """Triple contraction with the fully raised structure tensor (degree -3)."""
    m = algebra.dim
    gi = algebra.metric_inv
    raised = np.einsum("abc,ax,by,cz->xyz", algebra.structure, gi, gi, gi)
    terms = []
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                coeff = raised[a, b, c]
                if coeff != 0.0:
                    # 6 orderings of the antisymmetric sum, against the 1/6 prefactor
                    terms.append((coeff, (("c", a), ("c", b), ("c", c))))
    return ext.LetterWordOp(m, terms)


def d0(dbl: DoubleAlgebra, div_eps: np.ndarray | None = None) -> ext.LetterWordOp:
    """D0 = d_CE - c * iota_f, plus the Clifford element eps/2 for div = <eps, .>.

    eps, when given, is a vector in the double (a-part acts by contraction,
    t-part by wedge through K).
    """
    op = d_ce(dbl.base) + iota_f(dbl.base).scaled(-dbl.c_param)
    if div_eps is not None:
        eps = np.asarray(div_eps, dtype=float)
        n = dbl.base.dim
        if eps.shape != (2 * n,):
            raise AlgebraError("divergence vector must live in the double")
        terms = []
        for i in range(n):
            if eps[i] != 0.0:
                terms.append((0.5 * eps[i], (("c", i),)))
        lowered = dbl.base.metric @ eps[n:]
        for i in range(n):
            if lowered[i] != 0.0:
                terms.append((0.5 * lowered[i], (("w", i),)))
        op = op + ext.LetterWordOp(n, terms)
    return op


def coadjoint_letter_matrix(algebra: QuadraticLieAlgebra, s_vec: np.ndarray,
                            letters: tuple[int, ...]) -> np.ndarray:
    """Matrix of the coadjoint action of s on the dual basis of the letter subset.

    Requires [s, span(letters)] inside span(letters); entries are taken from
    the bracket coefficients, so the letter basis need not be orthonormal.
    """
    ad = algebra.ad(np.asarray(s_vec, dtype=float))
    rows = np.array(letters)
    sub = ad[np.ix_(rows, rows)]
    outside = np.delete(ad[:, rows], rows, axis=0)
    if outside.size and np.max(np.abs(outside)) > 1e-9:
        raise AlgebraError("letter subset is not invariant under ad_s")
    return -sub.T


def invariant_a1_forms(algebra: QuadraticLieAlgebra, split: InvolutiveSplitting,
                       tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of (Lambda a1*)^{a0} as coefficient columns."""
    letters = tuple(sorted(split.indices1))
    ops = []
    for i in split.indices0:
        s_vec = np.zeros(algebra.dim)
        s_vec[i] = 1.0
        mat = coadjoint_letter_matrix(algebra, s_vec, letters)
        ops.append(ext.LetterWordOp(len(letters), ext.derivation_terms(mat)).matrix())
    if not ops:
        return np.eye(1 << len(letters))
    return sp.invariant_forms(ops, tol)


def d0_on_invariants_check(dbl: DoubleAlgebra,
                           split: InvolutiveSplitting | None = None) -> ResidualReport:
    """Both D0 terms must vanish separately on every a0-invariant a1-form."""
    if split is None:
        split = dbl.base_split
    if split is None:
        raise AlgebraError("no involutive splitting available")
    base = dbl.base
    inv = invariant_a1_forms(base, split)
    dce_op = d_ce(base)
    iota_op = iota_f(base).scaled(dbl.c_param)
    worst_d, worst_i = 0.0, 0.0
    for k in range(inv.shape[1]):
        big = ext.embed_states(inv[:, k].astype(complex), tuple(sorted(split.indices1)),
                               base.dim)
        worst_d = max(worst_d, float(np.linalg.norm(dce_op.apply(big))))
        worst_i = max(worst_i, float(np.linalg.norm(iota_op.apply(big))))
    return ResidualReport({"d_ce_on_invariants": worst_d,
                           "c_iota_f_on_invariants": worst_i},
                          tolerance=1e-9,
                          info={"n_invariants": float(inv.shape[1])})
