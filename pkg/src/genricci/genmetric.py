"""Generalized (pseudo)metrics V+ in a quadratic Lie algebra.

V+ is stored as a spanning matrix so deformations act on the basis directly;
projectors and Gram data are derived and cached.  V- defaults to the
orthogonal complement (SVD basis) but constructors that know a natural
complement basis pass it explicitly.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import AlgebraError, DegeneracyError, DimensionError
from .liealg import DoubleAlgebra, QuadraticLieAlgebra
from .report import ResidualReport

GRAM_DET_TOL = 1e-12


def _normalized_gram_det(gram: np.ndarray, span: np.ndarray,
                         metric: np.ndarray) -> float:
    """|det gram| scaled by the euclidean column sizes and the metric magnitude.

    Using the span's own euclidean norms (not the gram diagonal) keeps null
    and near-null columns detectable.
    """
    scale = np.linalg.norm(span, axis=0) ** 2 * max(np.max(np.abs(metric)), 1e-300)
    scale[scale == 0] = 1e-300
    return float(abs(np.linalg.det(gram)) / np.prod(scale))


class GeneralizedMetric:
    """Subspace V+ on which the ambient pairing is nondegenerate."""

    def __init__(self, algebra: QuadraticLieAlgebra, span_plus: np.ndarray,
                 span_minus: np.ndarray | None = None):
        span_plus = np.asarray(span_plus, dtype=float)
        if span_plus.ndim != 2 or span_plus.shape[0] != algebra.dim:
            raise DimensionError(
                f"span_plus shape {span_plus.shape} incompatible with dim {algebra.dim}")
        if span_plus.shape[1] == 0:
            raise DegeneracyError("V+ must have positive rank")
        self.algebra = algebra
        self.span_plus = span_plus
        gram = span_plus.T @ algebra.metric @ span_plus
        if _normalized_gram_det(gram, span_plus, algebra.metric) < GRAM_DET_TOL:
            raise DegeneracyError("pairing restricted to V+ is numerically degenerate")
        self.gram = gram
        if span_minus is not None:
            span_minus = np.asarray(span_minus, dtype=float)
            if span_minus.shape != (algebra.dim, algebra.dim - self.rank):
                raise DimensionError("span_minus has wrong shape")
            if np.max(np.abs(span_minus.T @ algebra.metric @ span_plus)) > 1e-9:
                raise AlgebraError("span_minus is not orthogonal to span_plus")
            self._span_minus = span_minus
        else:
            self._span_minus = None

    @property
    def rank(self) -> int:
        return self.span_plus.shape[1]

    @cached_property
    def gram_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gram)

    @cached_property
    def proj_plus(self) -> np.ndarray:
        """<,>-orthogonal projector onto V+."""
        s, g = self.span_plus, self.algebra.metric
        return s @ self.gram_inv @ s.T @ g

    @cached_property
    def proj_minus(self) -> np.ndarray:
        return np.eye(self.algebra.dim) - self.proj_plus

    @cached_property
    def reflection(self) -> np.ndarray:
        return 2.0 * self.proj_plus - np.eye(self.algebra.dim)

    @cached_property
    def span_minus(self) -> np.ndarray:
        if self._span_minus is not None:
            return self._span_minus
        # orthogonal complement: kernel of span_plus^T G
        _, _, vt = np.linalg.svd(self.span_plus.T @ self.algebra.metric)
        basis = vt[self.rank:].T
        if basis.shape[1] != self.algebra.dim - self.rank:
            raise DegeneracyError("could not derive a complement basis")
        return basis

    @cached_property
    def gram_minus(self) -> np.ndarray:
        gm = self.span_minus.T @ self.algebra.metric @ self.span_minus
        if self.algebra.dim > self.rank and _normalized_gram_det(
                gm, self.span_minus, self.algebra.metric) < GRAM_DET_TOL:
            raise DegeneracyError("pairing restricted to V- is numerically degenerate")
        return gm

    @cached_property
    def gram_minus_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gram_minus)

    def orthonormalized(self) -> "GeneralizedMetric":
        """Basis with Gram = diag(+-1), fixed by the eigendecomposition ordering."""
        w, q = np.linalg.eigh(self.gram)
        if np.min(np.abs(w)) < GRAM_DET_TOL:
            raise DegeneracyError("Gram matrix has a near-null eigenvalue")
        new = self.span_plus @ q @ np.diag(1.0 / np.sqrt(np.abs(w)))
        return GeneralizedMetric(self.algebra, new)


def vplus_of_double(dbl: DoubleAlgebra) -> GeneralizedMetric:
    """V+ = (1+t) a1 inside B_c (x) a, with the natural complement basis.

    The complement columns are ordered [(1-t) a1 | a0 | t a0]; the Gram of the
    plus span is 2 K|_{a1}.
    """
    if dbl.base_split is None:
        raise AlgebraError("double carries no grading; cannot form V+")
    plus = dbl.plus_vectors()
    n = dbl.base.dim
    cols = [dbl.minus_vectors()]
    for i in dbl.base_split.indices0:
        v = np.zeros(2 * n)
        v[i] = 1.0
        cols.append(v[:, None])
    for i in dbl.base_split.indices0:
        v = np.zeros(2 * n)
        v[n + i] = 1.0
        cols.append(v[:, None])
    minus = np.hstack(cols)
    return GeneralizedMetric(dbl.algebra, plus, minus)


def signature(v: GeneralizedMetric, tol: float = 1e-10) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of the Gram matrix of V+."""
    w = np.linalg.eigvalsh(v.gram)
    scale = np.max(np.abs(w))
    if scale == 0 or np.min(np.abs(w)) < tol * scale:
        raise DegeneracyError("Gram matrix has a near-zero eigenvalue")
    return int(np.sum(w > 0)), int(np.sum(w < 0))


class IsotropicSubalgebra:
    """Isotropic, closed, unimodular subalgebra s (the reduction data)."""

    def __init__(self, algebra: QuadraticLieAlgebra, span_s: np.ndarray,
                 tol: float = 1e-9):
        span_s = np.asarray(span_s, dtype=float)
        if span_s.ndim != 2 or span_s.shape[0] != algebra.dim:
            raise DimensionError("span_s shape incompatible with the algebra")
        self.algebra = algebra
        self.span_s = span_s
        iso = np.max(np.abs(span_s.T @ algebra.metric @ span_s), initial=0.0)
        if iso > 1e-10:
            raise AlgebraError(f"subspace is not isotropic (max |<s,s>| = {iso:.3e})")
        closure, struct = self._closure_residual()
        if closure > tol:
            raise AlgebraError(f"subspace is not closed under the bracket ({closure:.3e})")
        self.structure_coeffs = struct  # [s_i, s_j] = struct[k, i, j] s_k
        unimod = float(np.max(np.abs(np.einsum("kik->i", struct)), initial=0.0))
        if unimod > tol:
            raise AlgebraError(f"subalgebra is not unimodular (max |tr ad| = {unimod:.3e})")

    @property
    def dim(self) -> int:
        return self.span_s.shape[1]

    def _closure_residual(self) -> tuple[float, np.ndarray]:
        s = self.span_s
        k = self.dim
        coeffs = np.zeros((k, k, k))
        worst = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                b = self.algebra.bracket(s[:, i], s[:, j])
                sol, *_ = np.linalg.lstsq(s, b, rcond=None)
                worst = max(worst, float(np.max(np.abs(b - s @ sol), initial=0.0)))
                coeffs[:, i, j] = sol
                coeffs[:, j, i] = -sol
        return worst, coeffs


def admissible_check(v: GeneralizedMetric, s: IsotropicSubalgebra) -> ResidualReport:
    """Orthogonality <s, V+> = 0 and invariance [s, V+] in V+."""
    if v.algebra is not s.algebra and v.algebra.dim != s.algebra.dim:
        raise DimensionError("metric and subalgebra live in different algebras")
    ortho = float(np.max(np.abs(s.span_s.T @ v.algebra.metric @ v.span_plus)))
    worst = 0.0
    for j in range(s.dim):
        for a in range(v.rank):
            b = v.algebra.bracket(s.span_s[:, j], v.span_plus[:, a])
            worst = max(worst, float(np.max(np.abs(v.proj_minus @ b))))
    return ResidualReport({"orthogonality": ortho, "invariance": worst}, tolerance=1e-9)


def deform(v: GeneralizedMetric, phi: np.ndarray, eps: float) -> GeneralizedMetric:
    """Move the V+ basis by e_a -> e_a + eps * phi[a, abar] e_abar.

    phi is an (r, n-r) matrix in the current V+/V- bases; the complement is
    re-derived, so first-order motion of V- is the implied skew extension.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (v.rank, v.algebra.dim - v.rank):
        raise DimensionError(f"phi shape {phi.shape} != ({v.rank},{v.algebra.dim - v.rank})")
    new_span = v.span_plus + eps * v.span_minus @ phi.T
    return GeneralizedMetric(v.algebra, new_span)
