"""Generalized Ricci tensor, scalar curvature, action and Ricci flow over a point.

With a trivial anchor every divergence is pairing against a fixed element eps,
all derivative terms drop, and the curvature quantities become finite tensor
contractions of the structure constants in a frame adapted to V+ / V-:

    GRic(a+, b-)   = <eps, [b-, a+]_+>  -  Tr_{V+} [[., b-]_-, a+]_+
    R              = <eps_+, eps_+> - (1/6) c_abc c^abc - (1/2) c_abc' c^abc'
    S              = -(1/2) * ( -(1/6) c_abc c^abc - (1/2) c_abc' c^abc' )

Dual bases are taken per subspace from the Gram inverses (primed index = V-).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import AlgebraError, DegeneracyError
from .genmetric import GeneralizedMetric, IsotropicSubalgebra, admissible_check, deform
from .liealg import QuadraticLieAlgebra
from .report import ResidualReport


@dataclass(frozen=True)
class Divergence:
    """div = <eps, .>; over a point the affine space of divergences is the algebra itself."""

    eps: np.ndarray

    @staticmethod
    def zero(algebra: QuadraticLieAlgebra) -> "Divergence":
        return Divergence(np.zeros(algebra.dim))


def _eps(algebra: QuadraticLieAlgebra, div: Divergence | None) -> np.ndarray:
    if div is None:
        return np.zeros(algebra.dim)
    eps = np.asarray(div.eps, dtype=float)
    if eps.shape != (algebra.dim,):
        raise AlgebraError(f"divergence vector has shape {eps.shape}, expected ({algebra.dim},)")
    return eps


@dataclass
class GRicTensor:
    """GRic in the chosen bases: matrix[a, abar] = GRic(e_a, e_abar)."""

    matrix: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise AlgebraError("GRic has non-finite entries")

    @property
    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.matrix ** 2)))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix)))


def _trace_term(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                minus_cols: np.ndarray) -> np.ndarray:
    """T[a, B] = Tr_{V+} [[., col_B]_-, e_a]_+ for each column of minus_cols."""
    f = algebra.brackets
    sp = v.span_plus
    # [e_b, col_B], then project to V-
    br1 = np.einsum("gab,ai,bj->gij", f, sp, minus_cols, optimize=True)
    br1 = np.einsum("pg,gij->pij", v.proj_minus, br1, optimize=True)
    # [., e_a] of that, coefficients along V+ via the Gram-inverse dual basis
    br2 = np.einsum("dpa,pij,ak->dijk", f, br1, sp, optimize=True)
    coeff = np.einsum("cb,bd,dijk->cijk", v.gram_inv, sp.T @ algebra.metric, br2, optimize=True)
    return np.einsum("iijk->jk", coeff).T  # -> [a(+ index k), B] after transpose


def gric_matrix(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                div: Divergence | None = None,
                minus_cols: np.ndarray | None = None) -> np.ndarray:
    """GRic(e_a, col_B) for arbitrary columns col_B in V-."""
    if minus_cols is None:
        minus_cols = v.span_minus
    eps = _eps(algebra, div)
    f = algebra.brackets
    # div term: <eps, [col_B, e_a]_+>
    br = np.einsum("gab,ai,bj->gij", f, minus_cols, v.span_plus, optimize=True)
    div_term = np.einsum("g,gp,pij->ji", eps, algebra.metric, np.einsum(
        "qp,pij->qij", v.proj_plus, br))
    trace = _trace_term(algebra, v, minus_cols)
    return div_term - trace


def gric(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
         div: Divergence | None = None) -> GRicTensor:
    return GRicTensor(gric_matrix(algebra, v, div))


def gric_div_shift_check(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                         div: Divergence, div_prime: Divergence) -> ResidualReport:
    """Residual of GRic_{div'} - GRic_{div} + <[e_+, a_+], b_->, e = eps' - eps."""
    g0 = gric_matrix(algebra, v, div)
    g1 = gric_matrix(algebra, v, div_prime)
    e_plus = v.proj_plus @ (_eps(algebra, div_prime) - _eps(algebra, div))
    br = algebra.ad(e_plus) @ v.span_plus           # [e_+, e_a]
    shift = (algebra.metric @ br).T @ v.span_minus  # <[e_+, e_a], e_abar>
    return ResidualReport({"divergence_shift": float(np.max(np.abs(g1 - g0 + shift)))},
                          tolerance=1e-9)


def gric_flip_check(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                    div: Divergence | None = None) -> ResidualReport:
    """Residual of GRic_{V-,div}(b-, a+) = GRic_{V+,div}(a+, b-)."""
    flipped = GeneralizedMetric(algebra, v.span_minus, v.span_plus)
    g_plus = gric_matrix(algebra, v, div)
    g_minus = gric_matrix(algebra, flipped, div)
    return ResidualReport({"flip": float(np.max(np.abs(g_minus.T - g_plus)))},
                          tolerance=1e-9)


def _frame_c_tensors(algebra: QuadraticLieAlgebra, v: GeneralizedMetric):
    """Lowered structure constants restricted to the adapted frame."""
    sp, sm = v.span_plus, v.span_minus
    c = algebra.structure
    c_ppp = np.einsum("abc,ai,bj,ck->ijk", c, sp, sp, sp, optimize=True)
    c_ppm = np.einsum("abc,ai,bj,ck->ijk", c, sp, sp, sm, optimize=True)
    return c_ppp, c_ppm


def laplacian_scalar(algebra: QuadraticLieAlgebra, v: GeneralizedMetric) -> float:
    """The (scalar) Laplacian of V+ over a point."""
    c_ppp, c_ppm = _frame_c_tensors(algebra, v)
    gp, gm = v.gram_inv, v.gram_minus_inv
    raised_ppp = np.einsum("ijk,ia,jb,kc->abc", c_ppp, gp, gp, gp)
    raised_ppm = np.einsum("ijk,ia,jb,kc->abc", c_ppm, gp, gp, gm)
    term3 = float(np.einsum("ijk,ijk->", c_ppp, raised_ppp))
    term2 = float(np.einsum("ijk,ijk->", c_ppm, raised_ppm))
    return -term3 / 6.0 - term2 / 2.0


def scalar_curvature(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                     div: Divergence | None = None) -> float:
    """R_{V+,div} = <eps_+, eps_+> + Laplacian scalar."""
    eps = _eps(algebra, div)
    eps_plus = v.proj_plus @ eps
    return float(eps_plus @ algebra.metric @ eps_plus) + laplacian_scalar(algebra, v)


def action_value(algebra: QuadraticLieAlgebra, v: GeneralizedMetric) -> float:
    """S = -(1/2) Delta_{V+} with unit total measure (divergence-independent)."""
    return -0.5 * laplacian_scalar(algebra, v)


def gric_contract(v: GeneralizedMetric, gm: np.ndarray, phi: np.ndarray) -> float:
    """Full contraction GRic(phi) for a deformation matrix phi[a, abar]."""
    return float(np.sum(gm * (v.gram_inv @ phi)))


def gradient_check(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                   phi: np.ndarray, h: float = 1e-5) -> ResidualReport:
    """Central-difference dS/deps against the contraction GRic(phi) at div = 0."""
    phi = np.asarray(phi, dtype=float)
    s_fwd = action_value(algebra, deform(v, phi, h))
    s_bwd = action_value(algebra, deform(v, phi, -h))
    numeric = (s_fwd - s_bwd) / (2.0 * h)
    analytic = gric_contract(v, gric_matrix(algebra, v), phi)
    scale = max(abs(numeric), abs(analytic), 1e-12)
    report = ResidualReport({"gradient_rel_err": abs(numeric - analytic) / scale},
                            tolerance=1e-5,
                            info={"numeric": numeric, "analytic": analytic})
    return report


def background_equations(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                         div: Divergence | None = None,
                         tolerance: float = 1e-8) -> ResidualReport:
    """Residuals of GRic = 0 and R = 0."""
    gm = gric_matrix(algebra, v, div)
    r = scalar_curvature(algebra, v, div)
    return ResidualReport({"gric": float(np.max(np.abs(gm))), "scalar": abs(r)},
                          tolerance=tolerance, info={"scalar_value": r})


def dsquared(algebra: QuadraticLieAlgebra) -> float:
    """Square of the generating Dirac operator over a point: -(1/48) c_abc c^abc."""
    raised = np.einsum("abc,ai,bj,ck->ijk", algebra.structure, algebra.metric_inv,
                       algebra.metric_inv, algebra.metric_inv)
    return float(-np.einsum("abc,abc->", algebra.structure, raised) / 48.0)


def tangency_check(algebra: QuadraticLieAlgebra, v: GeneralizedMetric,
                   s: IsotropicSubalgebra) -> ResidualReport:
    """GRic(V+, chi(s)) = 0 for admissible metrics."""
    gm = gric_matrix(algebra, v, None, minus_cols=s.span_s)
    return ResidualReport({"tangency": float(np.max(np.abs(gm)))}, tolerance=1e-9)


@dataclass
class FlowState:
    t: float
    metric: GeneralizedMetric
    action: float
    gric_norm: float


@dataclass
class FlowResult:
    states: list[FlowState] = field(default_factory=list)
    completed: bool = True
    message: str = ""

    def to_csv(self, stream) -> None:
        writer = csv.writer(stream)
        if not self.states:
            return
        ncoord = self.states[0].metric.span_plus.size
        stream.write("# schema: genricci-flow-v1\n")
        writer.writerow(["t", "S", "norm_gric"] + [f"v{i}" for i in range(ncoord)])
        for st in self.states:
            coords = [f"{x:.12g}" for x in st.metric.span_plus.ravel()]
            writer.writerow([f"{st.t:.12g}", f"{st.action:.12g}",
                             f"{st.gric_norm:.12g}"] + coords)

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def _flow_velocity(algebra: QuadraticLieAlgebra, v: GeneralizedMetric) -> np.ndarray:
    """d(span_plus)/dt for the flow of V+ generated by GRic (V- index raised)."""
    gm = gric_matrix(algebra, v)
    return v.span_minus @ (v.gram_minus_inv @ gm.T)


def ricci_flow(algebra: QuadraticLieAlgebra, v0: GeneralizedMetric,
               div: Divergence | None, t_end: float, dt: float,
               renormalize: bool = True) -> FlowResult:
    """Fixed-step RK4 on the span coordinates, re-orthonormalizing each step.

    A nonzero divergence shifts the flow by the inner derivation -[e_+, .];
    over a point the div term of GRic enters the velocity through gric_matrix.
    """
    if dt <= 0:
        raise AlgebraError("flow step dt must be positive")
    if t_end < 0:
        raise AlgebraError("flow horizon must be nonnegative")

    def velocity(span: np.ndarray) -> np.ndarray:
        w = GeneralizedMetric(algebra, span)
        gm = gric_matrix(algebra, w, div)
        return w.span_minus @ (w.gram_minus_inv @ gm.T)

    result = FlowResult()
    v = v0
    t = 0.0
    nsteps = int(round(t_end / dt))
    for step in range(nsteps + 1):
        gm = gric_matrix(algebra, v, div)
        result.states.append(FlowState(t, v, action_value(algebra, v),
                                       float(np.sqrt(np.sum(gm ** 2)))))
        if step == nsteps:
            break
        try:
            s0 = v.span_plus
            k1 = velocity(s0)
            k2 = velocity(s0 + 0.5 * dt * k1)
            k3 = velocity(s0 + 0.5 * dt * k2)
            k4 = velocity(s0 + dt * k3)
            new_span = s0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            v = GeneralizedMetric(algebra, new_span)
            if renormalize:
                v = v.orthonormalized()
        except DegeneracyError as exc:
            result.completed = False
            result.message = f"flow halted at t = {t:.6g}: {exc}"
            return result
        t += dt
    return result


def flow_admissibility(result: FlowResult, s: IsotropicSubalgebra) -> float:
    """Worst admissibility residual along a trajectory."""
    worst = 0.0
    for st in result.states:
        rep = admissible_check(st.metric, s)
        worst = max(worst, rep.max_residual)
    return worst
