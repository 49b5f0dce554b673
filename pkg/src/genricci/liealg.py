"""Quadratic Lie algebras: ad-invariant pairings, gradings, doubles.

A quadratic Lie algebra is stored as a dense metric G_{ab} = <e_a, e_b>
together with the fully lowered structure tensor c_{abc} = <e_a, [e_b, e_c]>,
which is totally antisymmetric exactly when the pairing is invariant.  All
constructors below produce bases in which both tensors have exact small
rational entries, so invariant checks pass at tight tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AlgebraError, DegeneracyError, DimensionError, SignatureError
from .report import ResidualReport

ANTISYM_TOL = 1e-10
JACOBI_TOL = 1e-9
METRIC_COND_MAX = 1e10  # condition number above which the pairing counts as singular


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadraticLieAlgebra:
    """Lie algebra with an invariant nondegenerate symmetric pairing."""

    dim: int
    metric: np.ndarray      # (n, n), G_{ab}
    structure: np.ndarray   # (n, n, n), c_{abc} = <e_a, [e_b, e_c]>
    labels: tuple[str, ...] | None = None
    block_offsets: tuple[int, ...] | None = None
    validate: bool = True   # False defers invariant reporting to check()

    def __post_init__(self):
        n = self.dim
        metric = _freeze(self.metric)
        structure = _freeze(self.structure)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "structure", structure)
        if metric.shape != (n, n) or structure.shape != (n, n, n):
            raise DimensionError(
                f"shape mismatch: dim={n}, metric {metric.shape}, structure {structure.shape}")
        if not self.validate:
            return
        if np.max(np.abs(metric - metric.T), initial=0.0) > ANTISYM_TOL:
            raise AlgebraError("metric is not symmetric")
        if self.metric_condition > METRIC_COND_MAX:
            raise DegeneracyError(
                f"metric numerically singular (cond = {self.metric_condition:.3e})")
        if self.antisymmetry_violation > ANTISYM_TOL:
            raise AlgebraError(
                f"structure tensor not totally antisymmetric "
                f"(max violation {self.antisymmetry_violation:.3e})")
        if self.jacobi_violation > JACOBI_TOL:
            raise AlgebraError(
                f"Jacobi identity violated (max residual {self.jacobi_violation:.3e})")

    @cached_property
    def metric_inv(self) -> np.ndarray:
        return np.linalg.inv(self.metric)

    @cached_property
    def metric_condition(self) -> float:
        return float(np.linalg.cond(self.metric))

    @cached_property
    def brackets(self) -> np.ndarray:
        """f[g, a, b]: [e_a, e_b] = f[g, a, b] e_g (structure with first index raised)."""
        return np.einsum("gd,dab->gab", self.metric_inv, self.structure)

    @cached_property
    def antisymmetry_violation(self) -> float:
        c = self.structure
        swaps = (c.transpose(1, 0, 2), c.transpose(0, 2, 1), c.transpose(2, 1, 0))
        return float(max(np.max(np.abs(c + s)) for s in swaps))

    @cached_property
    def jacobi_violation(self) -> float:
        f = self.brackets
        # [[e_a, e_b], e_c] summed over cyclic permutations of (a, b, c)
        jac = np.einsum("dab,edc->eabc", f, f, optimize=True)
        jac = jac + jac.transpose(0, 2, 3, 1) + jac.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(jac)))

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("gab,a,b->g", self.brackets, x, y)

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad_x = [x, .] in the algebra basis."""
        return np.einsum("gab,a->gb", self.brackets, x)

    def pairing(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.metric @ y)


def check(algebra: QuadraticLieAlgebra) -> ResidualReport:
    """Aggregate the defining invariants into a report."""
    return ResidualReport(
        residuals={
            "antisymmetry": algebra.antisymmetry_violation,
            "jacobi": algebra.jacobi_violation,
        },
        tolerance=JACOBI_TOL,
        info={"metric_condition": algebra.metric_condition},
    )


def _structure_from_matrices(mats: list[np.ndarray], metric: np.ndarray) -> np.ndarray:
    """c_{abc} = <M_a, [M_b, M_c]> for a matrix realization with trace-form metric."""
    n = len(mats)
    c = np.zeros((n, n, n))
    for b in range(n):
        for cc in range(b + 1, n):
            comm = mats[b] @ mats[cc] - mats[cc] @ mats[b]
            for a in range(n):
                val = np.trace(mats[a] @ comm)
                val = float(np.real(val))
                c[a, b, cc] = val
                c[a, cc, b] = -val
    # entries are exact small integers/halves up to float rounding; snap them
    c[np.abs(c) < 1e-12] = 0.0
    np.testing.assert_allclose(metric, metric.T, atol=1e-12)
    return c


def build_so(p: int, q: int) -> QuadraticLieAlgebra:
    """so(p, q) on generators E_ij = e_i (eta e_j)^T - e_j (eta e_i)^T, i < j lexicographic.

    The pairing is the defining-representation trace form <X, Y> = Tr(XY).
    """
    n = p + q
    if n < 2:
        raise DimensionError(f"so({p},{q}) needs p+q >= 2, got {n}")
    eta = np.diag([1.0] * p + [-1.0] * q)
    mats, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.outer(np.eye(n)[i], eta[j]) - np.outer(np.eye(n)[j], eta[i])
            mats.append(m)
            labels.append(f"E{i + 1}{j + 1}")
    dim = len(mats)
    metric = np.array([[np.trace(a @ b) for b in mats] for a in mats])
    structure = _structure_from_matrices(mats, metric)
    return QuadraticLieAlgebra(dim, metric, structure, labels=tuple(labels))


def build_su(n: int) -> QuadraticLieAlgebra:
    """su(n) as the real span of i H_d, (E_jk - E_kj), i (E_jk + E_kj).

    Generators are scaled so that the real trace form is exactly -identity;
    the Killing form is then -2n * identity (2n * trace form).
    """
    if n < 2:
        raise DimensionError(f"su(n) needs n >= 2, got {n}")
    mats: list[np.ndarray] = []
    labels: list[str] = []
    for d in range(n - 1):
        h = np.zeros((n, n), dtype=complex)
        h[d, d] = 1j
        h[d + 1, d + 1] = -1j
        mats.append(h / np.sqrt(2.0))
        labels.append(f"H{d + 1}")
    for j in range(n):
        for k in range(j + 1, n):
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = 1.0
            a[k, j] = -1.0
            mats.append(a / np.sqrt(2.0))
            labels.append(f"A{j + 1}{k + 1}")
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = 1j
            s[k, j] = 1j
            mats.append(s / np.sqrt(2.0))
            labels.append(f"S{j + 1}{k + 1}")
    dim = len(mats)
    metric = np.array([[float(np.real(np.trace(a @ b))) for b in mats] for a in mats])
    metric[np.abs(metric) < 1e-12] = 0.0
    structure = _structure_from_matrices(mats, metric)
    return QuadraticLieAlgebra(dim, metric, structure, labels=tuple(labels))


def build_abelian(k: int, metric: np.ndarray) -> QuadraticLieAlgebra:
    """Abelian algebra with a positive definite inner product."""
    if k < 1:
        raise DimensionError(f"abelian algebra needs dim >= 1, got {k}")
    metric = np.atleast_2d(np.asarray(metric, dtype=float))
    if metric.shape != (k, k):
        raise DimensionError(f"metric shape {metric.shape} != ({k},{k})")
    if np.max(np.abs(metric - metric.T)) > ANTISYM_TOL:
        raise AlgebraError("metric is not symmetric")
    if np.min(np.linalg.eigvalsh(metric)) <= 0:
        raise SignatureError("abelian block metric must be positive definite")
    return QuadraticLieAlgebra(k, metric, np.zeros((k, k, k)),
                               labels=tuple(f"b{i + 1}" for i in range(k)))


def killing_form(algebra: QuadraticLieAlgebra) -> np.ndarray:
    """K(x, y) = Tr(ad_x ad_y)."""
    f = algebra.brackets
    return np.einsum("dag,gbd->ab", f, f)


def rescale_metric(algebra: QuadraticLieAlgebra, lam: float) -> QuadraticLieAlgebra:
    """Replace the pairing by Killing/lam; brackets are unchanged."""
    if lam == 0:
        raise AlgebraError("rescale parameter must be nonzero")
    kil = killing_form(algebra) / lam
    if np.linalg.cond(kil) > METRIC_COND_MAX:
        raise DegeneracyError("Killing form is degenerate; cannot rescale")
    structure = np.einsum("ad,dbc->abc", kil, algebra.brackets)
    return QuadraticLieAlgebra(algebra.dim, kil, structure, labels=algebra.labels,
                               block_offsets=algebra.block_offsets)


@dataclass(frozen=True)
class InvolutiveSplitting:
    """Index partition of an adapted basis into even (0) and odd (1) parts."""

    indices0: tuple[int, ...]
    indices1: tuple[int, ...]

    def __post_init__(self):
        overlap = set(self.indices0) & set(self.indices1)
        if overlap:
            raise AlgebraError(f"splitting index sets overlap: {sorted(overlap)}")

    @property
    def dim0(self) -> int:
        return len(self.indices0)

    @property
    def dim1(self) -> int:
        return len(self.indices1)

    def shifted(self, offset: int) -> "InvolutiveSplitting":
        return InvolutiveSplitting(tuple(i + offset for i in self.indices0),
                                   tuple(i + offset for i in self.indices1))


def concat_splittings(splits: list[InvolutiveSplitting], dims: list[int]) -> InvolutiveSplitting:
    idx0: list[int] = []
    idx1: list[int] = []
    off = 0
    for s, d in zip(splits, dims):
        idx0.extend(i + off for i in s.indices0)
        idx1.extend(i + off for i in s.indices1)
        off += d
    return InvolutiveSplitting(tuple(idx0), tuple(idx1))


def grading_check(algebra: QuadraticLieAlgebra, split: InvolutiveSplitting) -> ResidualReport:
    """Residuals of [a0,a0] in a0, [a1,a1] in a0, [a0,a1] in a1, and G(a0, a1) = 0."""
    if set(split.indices0) | set(split.indices1) != set(range(algebra.dim)):
        raise DimensionError("splitting does not partition the basis index set")
    i0 = list(split.indices0)
    i1 = list(split.indices1)
    f = algebra.brackets

    def leak(rows, a, b):
        if not (len(rows) and len(a) and len(b)):
            return 0.0
        sub = f[np.ix_(rows, a, b)]
        return float(np.max(np.abs(sub)))

    residuals = {
        "bracket_00_in_0": leak(i1, i0, i0),
        "bracket_11_in_0": leak(i1, i1, i1),
        "bracket_01_in_1": leak(i0, i0, i1),
        "metric_cross_block": float(np.max(np.abs(algebra.metric[np.ix_(i0, i1)])))
        if i0 and i1 else 0.0,
    }
    return ResidualReport(residuals, tolerance=JACOBI_TOL)


def split_so_last(p: int, q: int) -> InvolutiveSplitting:
    """so(p,q) > so(p,q-1) (or so(p-1) when q=0): generators touching the last index are odd."""
    n = p + q
    odd, even, pos = [], [], 0
    for i in range(n):
        for j in range(i + 1, n):
            (odd if j == n - 1 else even).append(pos)
            pos += 1
    return InvolutiveSplitting(tuple(even), tuple(odd))


def split_su_u1block(n: int) -> InvolutiveSplitting:
    """su(n) > s(u(1) + u(n-1)): generators mixing row 1 with the rest are odd."""
    alg = _su_labels(n)
    odd = tuple(i for i, lab in enumerate(alg)
                if lab[0] in "AS" and lab[1] == "1")
    even = tuple(i for i in range(len(alg)) if i not in odd)
    return InvolutiveSplitting(even, odd)


def split_su_so(n: int) -> InvolutiveSplitting:
    """su(n) > so(n): the real antisymmetric generators are even, the rest odd."""
    alg = _su_labels(n)
    even = tuple(i for i, lab in enumerate(alg) if lab[0] == "A")
    odd = tuple(i for i in range(len(alg)) if i not in even)
    return InvolutiveSplitting(even, odd)


def _su_labels(n: int) -> list[str]:
    labels = [f"H{d + 1}" for d in range(n - 1)]
    for j in range(n):
        for k in range(j + 1, n):
            labels.append(f"A{j + 1}{k + 1}")
            labels.append(f"S{j + 1}{k + 1}")
    return labels


NAMED_SPLITS = {
    "last_row": lambda spec: split_so_last(spec[0], spec[1]),
    "u1_block": lambda spec: split_su_u1block(spec[0]),
    "so_real": lambda spec: split_su_so(spec[0]),
}


@dataclass(frozen=True)
class DoubleAlgebra:
    """B_c (x) a on the basis (a-part, then t*a-part).

    Bracket blocks: [u, v], [u, tv] = t[u, v], [tu, tv] = c [u, v]; the pairing
    reads off the t-linear coefficient: <u, tv> = K(u, v), <u, v> = <tu, tv> = 0.
    """

    base: QuadraticLieAlgebra
    c_param: float
    algebra: QuadraticLieAlgebra
    base_split: InvolutiveSplitting | None = None

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def a_indices(self) -> tuple[int, ...]:
        return tuple(range(self.base.dim))

    @property
    def t_indices(self) -> tuple[int, ...]:
        return tuple(range(self.base.dim, 2 * self.base.dim))

    @property
    def grading(self) -> InvolutiveSplitting:
        """Induced splitting: B_c (x) a0 even, B_c (x) a1 odd."""
        if self.base_split is None:
            raise AlgebraError("double carries no base splitting")
        n = self.base.dim
        s = self.base_split
        return InvolutiveSplitting(s.indices0 + tuple(i + n for i in s.indices0),
                                   s.indices1 + tuple(i + n for i in s.indices1))

    def plus_vectors(self) -> np.ndarray:
        """Columns (1+t) e_a for the odd base indices a."""
        return self._graded_vectors(+1.0)

    def minus_vectors(self) -> np.ndarray:
        """Columns (1-t) e_a for the odd base indices a."""
        return self._graded_vectors(-1.0)

    def _graded_vectors(self, sign: float) -> np.ndarray:
        if self.base_split is None:
            raise AlgebraError("double carries no base splitting")
        n = self.base.dim
        cols = []
        for i in self.base_split.indices1:
            v = np.zeros(2 * n)
            v[i] = 1.0
            v[n + i] = sign
            cols.append(v)
        if not cols:
            raise DegeneracyError("odd part of the splitting is empty")
        return np.column_stack(cols)


def double(base: QuadraticLieAlgebra, c: float,
           base_split: InvolutiveSplitting | None = None) -> DoubleAlgebra:
    """Tensor the algebra with R[t]/(t^2 - c)."""
    n = base.dim
    k = base.metric
    f = base.brackets
    metric = np.zeros((2 * n, 2 * n))
    metric[:n, n:] = k
    metric[n:, :n] = k
    brackets = np.zeros((2 * n, 2 * n, 2 * n))
    brackets[:n, :n, :n] = f                # [u, v]
    brackets[n:, :n, n:] = f                # [u, tv] = t[u,v]
    brackets[n:, n:, :n] = f                # [tu, v] = t[u,v]
    brackets[:n, n:, n:] = c * f            # [tu, tv] = c[u,v]
    structure = np.einsum("ad,dbc->abc", metric, brackets)
    labels = None
    if base.labels is not None:
        labels = base.labels + tuple("t" + lab for lab in base.labels)
    alg = QuadraticLieAlgebra(2 * n, metric, structure, labels=labels)
    return DoubleAlgebra(base=base, c_param=float(c), algebra=alg, base_split=base_split)


def direct_sum(blocks: list[QuadraticLieAlgebra]) -> QuadraticLieAlgebra:
    """Orthogonal direct sum with block-diagonal metric and structure tensor."""
    if not blocks:
        raise DimensionError("direct sum of an empty list")
    dims = [b.dim for b in blocks]
    n = sum(dims)
    offsets = np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(int)
    metric = np.zeros((n, n))
    structure = np.zeros((n, n, n))
    labels: list[str] = []
    for idx, blk in enumerate(blocks):
        o, d = offsets[idx], blk.dim
        metric[o:o + d, o:o + d] = blk.metric
        structure[o:o + d, o:o + d, o:o + d] = blk.structure
        labels.extend((blk.labels[i] if blk.labels else f"e{i}") + f"[{idx}]"
                      for i in range(d))
    return QuadraticLieAlgebra(n, metric, structure, labels=tuple(labels),
                               block_offsets=tuple(int(o) for o in offsets))
