"""Spinors of a split quadratic vector space as the exterior algebra of L1.

For a Lagrangian splitting V = L1 + L2 the Clifford algebra (relation
uv + vu = <u, v>) acts on Lambda L1: L1 by wedge, L2 by contraction through
the pairing block <L1_i, L2_j>.  The half-line twist (top L1)^(-1/2) is
trivialized to 1 throughout, so the spinor pairing is the top coefficient
of (theta F1) wedge F2 in the ordered L1 basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import exterior as ext
from .errors import AlgebraError, DegeneracyError, DimensionError

CLIFFORD_TOL = 1e-10


class LagrangianSplitting:
    """V = L1 + L2 with both halves isotropic for the ambient pairing."""

    def __init__(self, metric: np.ndarray, basis_l1: np.ndarray, basis_l2: np.ndarray):
        metric = np.asarray(metric, dtype=float)
        basis_l1 = np.asarray(basis_l1, dtype=float)
        basis_l2 = np.asarray(basis_l2, dtype=float)
        n = metric.shape[0]
        if n % 2 != 0:
            raise DimensionError("ambient dimension must be even")
        if basis_l1.shape != (n, n // 2) or basis_l2.shape != (n, n // 2):
            raise DimensionError("Lagrangian halves must be n x n/2")
        for name, b in (("L1", basis_l1), ("L2", basis_l2)):
            iso = np.max(np.abs(b.T @ metric @ b))
            if iso > CLIFFORD_TOL:
                raise AlgebraError(f"{name} is not isotropic (max {iso:.3e})")
        self.metric = metric
        self.basis_l1 = basis_l1
        self.basis_l2 = basis_l2
        self.pairing_block = basis_l1.T @ metric @ basis_l2
        if np.linalg.cond(self.pairing_block) > 1e12:
            raise DegeneracyError("pairing block of the splitting is singular")

    @property
    def n_letters(self) -> int:
        return self.basis_l1.shape[1]

    @property
    def dim_spinor(self) -> int:
        return 1 << self.n_letters

    @cached_property
    def _decompose_inv(self) -> np.ndarray:
        return np.linalg.inv(np.hstack([self.basis_l1, self.basis_l2]))

    def decompose(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """u = L1 alpha + L2 beta."""
        x = self._decompose_inv @ u
        m = self.n_letters
        return x[:m], x[m:]


@dataclass
class Spinor:
    """Complex coefficients over subsets of the L1 basis (bit j = letter j)."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or (coeffs.size & (coeffs.size - 1)) != 0:
            raise DimensionError("spinor length must be a power of two")
        if not np.all(np.isfinite(coeffs)):
            raise AlgebraError("spinor has non-finite coefficients")
        self.coeffs = coeffs

    @property
    def n_letters(self) -> int:
        return self.coeffs.size.bit_length() - 1

    @property
    def parity(self) -> str:
        deg = ext.popcounts(self.n_letters)
        even = np.linalg.norm(self.coeffs[deg % 2 == 0])
        odd = np.linalg.norm(self.coeffs[deg % 2 == 1])
        scale = max(even, odd)
        if scale == 0.0:
            return "even"
        if odd <= 1e-12 * scale:
            return "even"
        if even <= 1e-12 * scale:
            return "odd"
        return "mixed"

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def to_json_triples(self) -> list[tuple[int, float, float]]:
        return [(int(i), float(z.real), float(z.imag))
                for i, z in enumerate(self.coeffs) if z != 0]

    @staticmethod
    def from_json_triples(n_letters: int, triples) -> "Spinor":
        coeffs = np.zeros(1 << n_letters, dtype=complex)
        for bitmask, re, im in triples:
            coeffs[int(bitmask)] = complex(re, im)
        return Spinor(coeffs)

    @staticmethod
    def unit(n_letters: int) -> "Spinor":
        coeffs = np.zeros(1 << n_letters, dtype=complex)
        coeffs[0] = 1.0
        return Spinor(coeffs)

    @staticmethod
    def basis_state(n_letters: int, bitmask: int) -> "Spinor":
        coeffs = np.zeros(1 << n_letters, dtype=complex)
        coeffs[bitmask] = 1.0
        return Spinor(coeffs)


def clifford_coeffs(u: np.ndarray, coeffs: np.ndarray,
                    split: LagrangianSplitting) -> np.ndarray:
    """Clifford action of the ambient vector u on raw coefficients (axis 0)."""
    if u.shape[0] != split.metric.shape[0]:
        raise DimensionError("vector dimension does not match the splitting")
    alpha, beta = split.decompose(np.asarray(u, dtype=float))
    m = split.n_letters
    out = np.zeros_like(coeffs)
    for i in range(m):
        if alpha[i] != 0.0:
            ext.add_wedge(out, coeffs, m, i, alpha[i])
    pb = split.pairing_block
    for j in range(m):
        if beta[j] == 0.0:
            continue
        for i in range(m):
            if pb[i, j] != 0.0:
                ext.add_contract(out, coeffs, m, i, beta[j] * pb[i, j])
    return out


def clifford_apply(u: np.ndarray, f: Spinor, split: LagrangianSplitting) -> Spinor:
    return Spinor(clifford_coeffs(u, f.coeffs, split))


def clifford_matrix(u: np.ndarray, split: LagrangianSplitting,
                    dtype=complex) -> np.ndarray:
    """Dense matrix of the Clifford action (dim <= 2^12)."""
    dim = split.dim_spinor
    if dim > 1 << 12:
        raise MemoryError("spinor space too large to materialize")
    return clifford_coeffs(u, np.eye(dim, dtype=dtype), split)


def theta(f: Spinor) -> Spinor:
    """Degree twist a -> i^{|a|} a, componentwise."""
    deg = ext.popcounts(f.n_letters)
    return Spinor(f.coeffs * (1j ** (deg % 4)))


def mukai_pairing(f1: Spinor, f2: Spinor) -> complex:
    """(F1, F2) = top coefficient of (theta F1) wedge F2."""
    if f1.n_letters != f2.n_letters:
        raise DimensionError("spinors live on different splittings")
    return ext.top_coefficient(theta(f1).coeffs, f2.coeffs, f1.n_letters)


def _hodge_tables(m: int, diag: np.ndarray, orientation: int):
    """(dst, coeff) tables for the star on an orthogonal basis with norms diag."""
    states = np.arange(1 << m, dtype=np.int64)
    comp = (~states) & ((1 << m) - 1)
    # <e^S, e^S> = prod over letters of 1/diag = prod of signs for unit norms
    norm = np.ones(1 << m)
    for i in range(m):
        has = ((states >> i) & 1) == 1
        norm[has] *= 1.0 / diag[i]
    coeff = norm * ext.complement_sign(m) * orientation
    vol = float(np.sqrt(abs(np.prod(diag))))
    return comp, coeff * vol


def hodge(f: Spinor, metric: np.ndarray, orientation: int = 1) -> Spinor:
    """Star operator with xi wedge (star eta) = <xi, eta> * omega.

    metric is the inner product of the underlying vector space in the basis
    whose dual indexes the letters; it must be diagonal (orthogonal basis).
    omega is the ordered-basis unit volume form times orientation.
    """
    metric = np.atleast_2d(np.asarray(metric, dtype=float))
    m = f.n_letters
    if metric.shape != (m, m):
        raise DimensionError("metric shape does not match the letter count")
    off = metric - np.diag(np.diag(metric))
    if np.max(np.abs(off), initial=0.0) > 1e-12:
        raise AlgebraError("hodge star requires an orthogonal (diagonal-metric) basis")
    diag = np.diag(metric)
    if np.min(np.abs(diag)) < 1e-12:
        raise DegeneracyError("degenerate metric in hodge star")
    comp, coeff = _hodge_tables(m, diag, orientation)
    out = np.zeros_like(f.coeffs)
    out[comp] = coeff * f.coeffs
    return Spinor(out)


def _frame_signature(v, split: LagrangianSplitting) -> tuple[np.ndarray, np.ndarray]:
    frame = np.asarray(getattr(v, "span_plus", v), dtype=float)
    gram = frame.T @ split.metric @ frame
    diag = np.diag(gram).copy()
    if np.max(np.abs(gram - np.diag(diag))) > 1e-9 or np.max(np.abs(np.abs(diag) - 1)) > 1e-9:
        raise AlgebraError("V+ frame is not orthonormal (need <e_a,e_b> = +-delta)")
    return frame, diag


def r_vplus_apply(v, f: Spinor, split: LagrangianSplitting) -> Spinor:
    """R_{V+} = 2^{n/2} e_1 ... e_n for an oriented orthonormal frame of V+.

    v is a GeneralizedMetric (span_plus used as the frame, column order = the
    orientation) or a raw frame matrix.
    """
    frame, _ = _frame_signature(v, split)
    n = frame.shape[1]
    coeffs = f.coeffs * (2.0 ** (n / 2.0))
    for a in range(n - 1, -1, -1):
        coeffs = clifford_coeffs(frame[:, a], coeffs, split)
    return Spinor(coeffs)


def r_vplus_matrix(v, split: LagrangianSplitting) -> np.ndarray:
    """Dense matrix of R_{V+} (dim <= 2^12): the generator chain applied to identity."""
    frame, _ = _frame_signature(v, split)
    dim = split.dim_spinor
    if dim > 1 << 12:
        raise MemoryError("spinor space too large to materialize")
    n = frame.shape[1]
    mat = np.eye(dim) * (2.0 ** (n / 2.0))
    for a in range(n - 1, -1, -1):
        mat = clifford_coeffs(frame[:, a], mat, split)
    return mat


def r_square_sign(v, split: LagrangianSplitting) -> int:
    """Sign of R^2: (-1)^{n(n-1)/2 + q} with q = negative directions of V+.

    Follows from uv + vu = <u, v> by reversing the generator product; for even
    n the exponent equals [(n+1)/2] + q mod 2.
    """
    _, diag = _frame_signature(v, split)
    n = diag.size
    q = int(np.sum(diag < 0))
    return -1 if ((n * (n - 1) // 2 + q) % 2) else 1


def self_dual_project(v, f_hat: Spinor, split: LagrangianSplitting) -> Spinor:
    """F = F_hat + R_{V+} F_hat; requires R^2 = +1."""
    if r_square_sign(v, split) != 1:
        raise AlgebraError("R^2 = -1 in this configuration; no real self-dual spinors")
    return Spinor(f_hat.coeffs + r_vplus_apply(v, f_hat, split).coeffs)


def invariant_forms(action_ops: list[np.ndarray], tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the joint kernel of the stacked operators."""
    if not action_ops:
        raise DimensionError("need at least one operator (possibly zero) for the action")
    dim = action_ops[0].shape[1]
    for op in action_ops:
        if op.shape != (action_ops[0].shape[0], dim) and op.shape[1] != dim:
            raise DimensionError("operators act on different spaces")
    stacked = np.vstack([np.asarray(op) for op in action_ops])
    _, sv, vt = np.linalg.svd(stacked)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    nkernel = int(np.sum(sv <= tol * scale)) + (dim - len(sv))
    if nkernel == 0:
        return np.zeros((dim, 0))
    return vt[dim - nkernel:].conj().T


def annihilator_invariants(j_span: np.ndarray, split: LagrangianSplitting,
                           tol: float = 1e-9) -> np.ndarray:
    """Basis of {A : u A = 0 for all u in J}, J isotropic."""
    j_span = np.atleast_2d(np.asarray(j_span, dtype=float))
    if j_span.shape[0] != split.metric.shape[0]:
        j_span = j_span.T
    if j_span.shape[1] == 0:
        return np.eye(split.dim_spinor)
    iso = np.max(np.abs(j_span.T @ split.metric @ j_span))
    if iso > CLIFFORD_TOL:
        raise AlgebraError(f"J is not isotropic (max {iso:.3e})")
    ops = [clifford_matrix(j_span[:, k], split) for k in range(j_span.shape[1])]
    return invariant_forms(ops, tol)
