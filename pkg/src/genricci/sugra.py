"""Symmetric-space configurations and the algebraic generalized-SUGRA systems.

A configuration is a list of graded blocks (algebra, involution, lambda_k,
c_k) with block 0 the Lorentzian factor, an optional abelian block, and a
Ramond-Ramond flux ansatz.  Assembly produces the doubled algebra g, the
generalized metric V+ = (1+t) a1 per block, the isotropic subalgebra
s = sum of a0's, and a spinor context on Lambda (a1-total)* (10 letters,
orthonormal, one timelike direction from block 0).

Two independent evaluation routes are kept deliberately separate:

* check_equations evaluates the specialized block system (scalar equation,
  (c_k - 1) Killing = psi_F per block, psi_F(b, b) = 0) with psi_F computed
  by the wedge/Hodge formula;
* generic_equivalence evaluates GRic entrywise on the (1-t)a1 and s columns
  against (i / 8 nu) (u+ F, v- F) through the raw Clifford/pairing route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import exterior as ext
from .curvature import gric_matrix
from .errors import AlgebraError, ConfigError, DegeneracyError, DimensionError
from .genmetric import GeneralizedMetric, IsotropicSubalgebra
from .liealg import (DoubleAlgebra, InvolutiveSplitting, QuadraticLieAlgebra,
                     NAMED_SPLITS, build_abelian, build_so, build_su,
                     concat_splittings, direct_sum, double, rescale_metric)
from .report import ResidualReport
from .spinor import LagrangianSplitting, Spinor, hodge

N_PHYSICAL = 10


# ---------------------------------------------------------------------------
# configuration dataclasses


@dataclass(frozen=True)
class AlgebraSpec:
    """One simple factor with a named adapted involution."""

    family: str                 # "so" | "su"
    p: int = 0
    q: int = 0
    n: int = 0
    involution: str = "last_row"

    def build(self) -> tuple[QuadraticLieAlgebra, InvolutiveSplitting]:
        if self.family == "so":
            alg = build_so(self.p, self.q)
            key = (self.p, self.q)
        elif self.family == "su":
            alg = build_su(self.n)
            key = (self.n,)
        else:
            raise ConfigError(f"unknown algebra family {self.family!r}")
        try:
            split = NAMED_SPLITS[self.involution](key)
        except KeyError:
            raise ConfigError(f"unknown involution scheme {self.involution!r}") from None
        return alg, split


@dataclass(frozen=True)
class BlockSpec:
    """A graded block: product of factors, common rescaling lambda and c."""

    factors: tuple[AlgebraSpec, ...]
    lam: float
    c: float

    def build(self) -> tuple[QuadraticLieAlgebra, InvolutiveSplitting]:
        parts = [f.build() for f in self.factors]
        alg = direct_sum([a for a, _ in parts]) if len(parts) > 1 else parts[0][0]
        split = concat_splittings([s for _, s in parts], [a.dim for a, _ in parts])
        return rescale_metric(alg, self.lam), split


@dataclass(frozen=True)
class AbelianSpec:
    dim: int
    metric: tuple[tuple[float, ...], ...] | None = None

    def build(self) -> QuadraticLieAlgebra:
        k = np.eye(self.dim) if self.metric is None else np.asarray(self.metric, float)
        return build_abelian(self.dim, k)


@dataclass(frozen=True)
class FluxAnsatz:
    """polynomial: p(Omega) on the CP^M block; volume_products: sum of
    f(h) w0^h0 ^ ... ; raw: explicit (bitmask, re, im) coefficients."""

    kind: str
    poly: tuple[float, ...] = ()
    volume: tuple[tuple[tuple[int, ...], float], ...] = ()
    raw: tuple[tuple[int, float, float], ...] = ()

    @staticmethod
    def volume_products(coeffs: dict) -> "FluxAnsatz":
        items = tuple(sorted((tuple(int(x) for x in h), float(v))
                             for h, v in coeffs.items()))
        return FluxAnsatz(kind="volume_products", volume=items)

    @staticmethod
    def polynomial(coeffs) -> "FluxAnsatz":
        return FluxAnsatz(kind="polynomial", poly=tuple(float(c) for c in coeffs))

    def volume_dict(self) -> dict[tuple[int, ...], float]:
        return {h: v for h, v in self.volume}


@dataclass(frozen=True)
class SugraConfig:
    blocks: tuple[BlockSpec, ...]
    abelian: AbelianSpec | None = None
    flux: FluxAnsatz = FluxAnsatz(kind="volume_products")

    def __post_init__(self):
        if not self.blocks:
            raise ConfigError("need at least the Lorentzian block")
        if abs(self.blocks[0].lam - 1.0) > 1e-14:
            raise ConfigError("block-0 normalization requires lambda_0 = 1")
        for k, blk in enumerate(self.blocks[1:], start=1):
            if blk.lam >= 0:
                raise ConfigError(f"lambda_{k} must be negative, got {blk.lam}")

    @property
    def n_compact(self) -> int:
        return len(self.blocks) - 1

    @property
    def c_values(self) -> tuple[float, ...]:
        return tuple(b.c for b in self.blocks)

    @property
    def lam_values(self) -> tuple[float, ...]:
        return tuple(b.lam for b in self.blocks)


# ---------------------------------------------------------------------------
# assembly


def _orthonormal_letters(base: QuadraticLieAlgebra,
                         split: InvolutiveSplitting) -> tuple[np.ndarray, np.ndarray]:
    """Columns spanning a1 with K(v_a, v_b) = eta_a delta_ab, plus the signs."""
    idx = list(split.indices1)
    sub = base.metric[np.ix_(idx, idx)]
    cols = np.zeros((base.dim, len(idx)))
    off = sub - np.diag(np.diag(sub))
    if np.max(np.abs(off), initial=0.0) < 1e-12:
        diag = np.diag(sub)
        for j, i in enumerate(idx):
            cols[i, j] = 1.0 / math.sqrt(abs(diag[j]))
        eta = np.sign(diag)
    else:
        w, q = np.linalg.eigh(sub)
        order = np.argsort(-w)  # positive directions first, deterministic
        w, q = w[order], q[:, order]
        if np.min(np.abs(w)) < 1e-12:
            raise DegeneracyError("degenerate pairing on a1")
        for j, i in enumerate(idx):
            cols[i, :] = q[j, :] / np.sqrt(np.abs(w))
        eta = np.sign(w)
    return cols, eta


@dataclass
class SpinorContext:
    """Lambda (a1-total)* data: letters, signs, block slices, s-action."""

    n_letters: int
    eta: np.ndarray                       # (n_letters,) signs of K
    block_slices: list[slice]             # letters of blocks 0..N, then abelian
    block_dims: list[int]
    lam: list[float]                      # lambda per graded block (not abelian)
    c: list[float]
    s_terms: list[list[tuple[float, tuple]]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return 1 << self.n_letters

    # -- letter-level Clifford actions ((1 +- t) u for u in a1-total) --------

    def act_plus(self, u: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        return self._act(u, coeffs, +1.0)

    def act_minus(self, u: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        return self._act(u, coeffs, -1.0)

    def _act(self, u: np.ndarray, coeffs: np.ndarray, sign: float) -> np.ndarray:
        out = np.zeros_like(coeffs)
        m = self.n_letters
        for a in range(m):
            if u[a] == 0.0:
                continue
            ext.add_contract(out, coeffs, m, a, u[a])
            ext.add_wedge(out, coeffs, m, a, sign * self.eta[a] * u[a])
        return out

    def theta(self, coeffs: np.ndarray) -> np.ndarray:
        deg = ext.popcounts(self.n_letters)
        return coeffs * (1j ** (deg % 4))

    def mukai(self, f1: np.ndarray, f2: np.ndarray) -> complex:
        return ext.top_coefficient(self.theta(f1), f2, self.n_letters)

    def hodge(self, coeffs: np.ndarray) -> np.ndarray:
        return hodge(Spinor(coeffs), np.diag(self.eta)).coeffs

    def r_apply(self, coeffs: np.ndarray) -> np.ndarray:
        """R_{V+} = * nu theta (valid here: 10 letters, even)."""
        deg = ext.popcounts(self.n_letters)
        nu = np.where(deg % 2 == 0, 1.0 + 0j, 1j)
        return self.hodge(nu * (1j ** (deg % 4)) * coeffs)

    def s_action(self, coeffs: np.ndarray, which: int) -> np.ndarray:
        out = np.zeros_like(coeffs)
        m = self.n_letters
        for coeff, word in self.s_terms[which]:
            out += coeff * ext.apply_word(coeffs, m, word)
        return out

    def volume_form(self, block: int) -> np.ndarray:
        sl = self.block_slices[block]
        mask = 0
        for i in range(sl.start, sl.stop):
            mask |= 1 << i
        out = np.zeros(self.dim, dtype=complex)
        out[mask] = 1.0
        return out

    def invariance_residual(self, coeffs: np.ndarray) -> float:
        worst = 0.0
        for j in range(len(self.s_terms)):
            worst = max(worst, float(np.linalg.norm(self.s_action(coeffs, j))))
        return worst

    def parity_residual(self, coeffs: np.ndarray) -> tuple[float, str]:
        s = Spinor(coeffs)
        deg = ext.popcounts(self.n_letters)
        even = float(np.linalg.norm(coeffs[deg % 2 == 0]))
        odd = float(np.linalg.norm(coeffs[deg % 2 == 1]))
        return min(even, odd), s.parity


@dataclass
class AssembledModel:
    """g, V+, s, and the reduced spinor context of a configuration."""

    config: SugraConfig
    algebra: QuadraticLieAlgebra
    vplus: GeneralizedMetric
    isotropic: IsotropicSubalgebra
    ctx: SpinorContext
    doubles: list[DoubleAlgebra]
    offsets: list[int]

    @property
    def s_dim(self) -> int:
        return self.isotropic.dim

    def reduced_splitting(self) -> tuple[LagrangianSplitting, np.ndarray]:
        """Ambient double of a1-total with L1 = t-part: the generic-route spinor data.

        Returns the splitting and the orthonormal oriented frame of V+ in it.
        """
        n = self.ctx.n_letters
        eta = self.ctx.eta
        g = np.zeros((2 * n, 2 * n))
        g[:n, n:] = np.diag(eta)
        g[n:, :n] = np.diag(eta)
        l1 = np.vstack([np.zeros((n, n)), np.eye(n)])
        l2 = np.vstack([np.eye(n), np.zeros((n, n))])
        frame = np.vstack([np.eye(n), np.eye(n)]) / math.sqrt(2.0)
        return LagrangianSplitting(g, l1, l2), frame


def assemble(config: SugraConfig) -> AssembledModel:
    """Build g = sum of B_{c_k} (x) a^(k) (+ abelian), V+, s and the spinor context."""
    bases: list[tuple[QuadraticLieAlgebra, InvolutiveSplitting]] = []
    for blk in config.blocks:
        bases.append(blk.build())
    if config.abelian is not None:
        b_alg = config.abelian.build()
        b_split = InvolutiveSplitting((), tuple(range(b_alg.dim)))
        bases.append((b_alg, b_split))

    dim_v = sum(s.dim1 for _, s in bases)
    if dim_v != N_PHYSICAL:
        raise DimensionError(
            f"dim V+ = {dim_v}, the configuration must total {N_PHYSICAL}")

    letters = []
    etas = []
    slices = []
    doubles = []
    pos = 0
    for k, (base, split) in enumerate(bases):
        cols, eta = _orthonormal_letters(base, split)
        c_k = config.blocks[k].c if k < len(config.blocks) else 0.0
        doubles.append(double(base, c_k, split))
        letters.append(cols)
        etas.append(eta)
        slices.append(slice(pos, pos + cols.shape[1]))
        pos += cols.shape[1]
    eta = np.concatenate(etas)

    if not (np.sum(etas[0] < 0) == 1 and np.sum(eta < 0) == 1):
        raise AlgebraError("block 0 must carry exactly one timelike direction")

    g = direct_sum([d.algebra for d in doubles])
    offsets = list(g.block_offsets)

    nfull = g.dim
    plus_cols, minus_t_cols, s_cols, ts_cols = [], [], [], []
    for k, (base, split) in enumerate(bases):
        nb = base.dim
        off = offsets[k]
        cols = letters[k]
        for a in range(cols.shape[1]):
            for sign, dest in ((+1.0, plus_cols), (-1.0, minus_t_cols)):
                v = np.zeros(nfull)
                v[off:off + nb] = cols[:, a]
                v[off + nb:off + 2 * nb] = sign * cols[:, a]
                dest.append(v)
        for i in split.indices0:
            v = np.zeros(nfull)
            v[off + i] = 1.0
            s_cols.append(v)
            w = np.zeros(nfull)
            w[off + nb + i] = 1.0
            ts_cols.append(w)

    span_plus = np.column_stack(plus_cols)
    span_minus = np.column_stack(minus_t_cols + s_cols + ts_cols)
    vplus = GeneralizedMetric(g, span_plus, span_minus)
    p, q = _gram_signature(vplus.gram)
    if q != 1:
        raise AlgebraError(f"V+ must be Lorentzian, got signature ({p},{q})")
    isotropic = IsotropicSubalgebra(g, np.column_stack(s_cols))

    ctx = SpinorContext(
        n_letters=N_PHYSICAL,
        eta=eta,
        block_slices=slices,
        block_dims=[s.stop - s.start for s in slices],
        lam=[b.lam for b in config.blocks],
        c=[b.c for b in config.blocks],
    )
    # s-action: coadjoint derivation of each a0 generator on its block letters
    for k, (base, split) in enumerate(bases):
        cols = letters[k]
        sl = slices[k]
        sub_eta = etas[k]
        for i in split.indices0:
            s_vec = np.zeros(base.dim)
            s_vec[i] = 1.0
            ad = base.ad(s_vec)
            # [s, v_a] = sum_c A[c, a] v_c in the orthonormal letter basis
            amat = np.diag(sub_eta) @ cols.T @ base.metric @ ad @ cols
            terms = []
            for d in range(cols.shape[1]):
                for b in range(cols.shape[1]):
                    val = -amat[b, d]
                    if abs(val) > 1e-13:
                        terms.append((float(val),
                                      (("w", sl.start + d), ("c", sl.start + b))))
            ctx.s_terms.append(terms)
    return AssembledModel(config=config, algebra=g, vplus=vplus,
                          isotropic=isotropic, ctx=ctx, doubles=doubles,
                          offsets=offsets)


def _gram_signature(gram: np.ndarray) -> tuple[int, int]:
    w = np.linalg.eigvalsh(gram)
    return int(np.sum(w > 0)), int(np.sum(w < 0))


# ---------------------------------------------------------------------------
# flux spinors


def _sparse_wedge(a: dict[int, complex], b: dict[int, complex]) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for s1, c1 in a.items():
        for s2, c2 in b.items():
            if s1 & s2:
                continue
            sign = _shuffle_sign(s1, s2)
            key = s1 | s2
            out[key] = out.get(key, 0.0) + sign * c1 * c2
    return {k: v for k, v in out.items() if v != 0.0}


def _shuffle_sign(s1: int, s2: int) -> int:
    sign = 1
    t = s2
    while t:
        low = t & -t
        pos = low.bit_length() - 1
        if bin(s1 >> (pos + 1)).count("1") % 2:
            sign = -sign
        t ^= low
    return sign


def symplectic_form(model: AssembledModel, block: int = 1) -> np.ndarray:
    """Omega = e1^e2 + ... + e_{2M-1}^e_{2M} on the chosen block letters.

    The letter pairing follows the adapted su(M+1) basis (A_{1k}, S_{1k})
    couples; s-invariance is validated, not assumed.
    """
    sl = model.ctx.block_slices[block]
    width = sl.stop - sl.start
    if width % 2:
        raise AlgebraError("symplectic ansatz needs an even-dimensional block")
    coeffs = np.zeros(model.ctx.dim, dtype=complex)
    for j in range(width // 2):
        mask = (1 << (sl.start + 2 * j)) | (1 << (sl.start + 2 * j + 1))
        coeffs[mask] = 1.0
    res = model.ctx.invariance_residual(coeffs)
    if res > 1e-9:
        raise AlgebraError(f"symplectic form is not s-invariant (residual {res:.3e})")
    return coeffs


def build_flux(model: AssembledModel, ansatz: FluxAnsatz | None = None) -> Spinor:
    """F = F_hat + R_{V+} F_hat for the configured ansatz."""
    ctx = model.ctx
    if ansatz is None:
        ansatz = model.config.flux
    if ansatz.kind == "volume_products":
        nblocks = len(ctx.block_slices)
        f_hat = np.zeros(ctx.dim, dtype=complex)
        for h, val in ansatz.volume:
            if len(h) != nblocks:
                raise ConfigError(
                    f"flux key {h} must have {nblocks} entries for this configuration")
            mask = 0
            for k, bit in enumerate(h):
                if bit:
                    sl = ctx.block_slices[k]
                    for i in range(sl.start, sl.stop):
                        mask |= 1 << i
            f_hat[mask] += val
    elif ansatz.kind == "polynomial":
        omega = symplectic_form(model)
        term = {0: 1.0 + 0j}
        f_sparse: dict[int, complex] = {}
        omega_sparse = {int(s): omega[s] for s in np.flatnonzero(omega)}
        for n, d in enumerate(ansatz.poly):
            if n > 0:
                term = _sparse_wedge(term, omega_sparse)
            for s, v in term.items():
                f_sparse[s] = f_sparse.get(s, 0.0) + d / math.factorial(n) * v
        f_hat = np.zeros(ctx.dim, dtype=complex)
        for s, v in f_sparse.items():
            f_hat[s] = v
    elif ansatz.kind == "raw":
        f_hat = Spinor.from_json_triples(ctx.n_letters, ansatz.raw).coeffs
    else:
        raise ConfigError(f"unknown flux ansatz kind {ansatz.kind!r}")
    return Spinor(f_hat + ctx.r_apply(f_hat))


# ---------------------------------------------------------------------------
# the flux bilinear form and the specialized residual system


def psi_f(model: AssembledModel, f: Spinor) -> np.ndarray:
    """psi_F(u, v) = (1/4) ([(iota_u + j_u)(iota_v - j_v) F] wedge *F)^top."""
    ctx = model.ctx
    m = ctx.n_letters
    star_f = ctx.hodge(f.coeffs)
    psi = np.zeros((m, m), dtype=complex)
    unit = np.eye(m)
    for b in range(m):
        inner = ctx.act_minus(unit[b], f.coeffs)
        for a in range(m):
            outer = ctx.act_plus(unit[a], inner)
            psi[a, b] = 0.25 * ext.top_coefficient(outer, star_f, m)
    return psi


def _killing_on_letters(model: AssembledModel, block: int) -> np.ndarray:
    """Killing form of a^(k) restricted to the orthonormal letters: lam_k * eta."""
    sl = model.ctx.block_slices[block]
    lam = model.ctx.lam[block]
    return lam * np.diag(model.ctx.eta[sl])


def scalar_equation_residual(config: SugraConfig, dims: list[int]) -> float:
    """(1 + c0) dim a1^0 - sum_k (-lambda_k)(1 + c_k) dim a1^k (signed)."""
    lhs = (1.0 + config.blocks[0].c) * dims[0]
    rhs = sum(-config.blocks[k].lam * (1.0 + config.blocks[k].c) * dims[k]
              for k in range(1, len(config.blocks)))
    return lhs - rhs


def check_equations(model: AssembledModel, f: Spinor | None = None,
                    tolerance: float = 1e-8) -> ResidualReport:
    """Residuals of the block-diagonal system plus spinor preconditions."""
    ctx = model.ctx
    if f is None:
        f = build_flux(model)
    residuals: dict[str, float] = {}
    info: dict[str, float] = {}

    self_dual = float(np.linalg.norm(ctx.r_apply(f.coeffs) - f.coeffs))
    invariance = ctx.invariance_residual(f.coeffs)
    parity_res, parity = ctx.parity_residual(f.coeffs)
    residuals["self_duality"] = self_dual
    residuals["s_invariance"] = invariance
    residuals["parity"] = parity_res
    info["parity_odd"] = 1.0 if parity == "odd" else 0.0

    psi = psi_f(model, f)
    residuals["psi_imag"] = float(np.max(np.abs(psi.imag)))
    psi_re = psi.real

    nblocks = len(model.config.blocks)
    dims = ctx.block_dims
    residuals["scalar"] = abs(scalar_equation_residual(model.config, dims))
    expected = np.zeros((ctx.n_letters, ctx.n_letters))
    for k in range(nblocks):
        sl = ctx.block_slices[k]
        kil = _killing_on_letters(model, k)
        expected[sl, sl] = (model.config.blocks[k].c - 1.0) * kil
        blk_res = psi_re[sl, sl] - expected[sl, sl]
        residuals[f"block_{k}"] = float(np.sqrt(np.sum(blk_res ** 2)))
    if model.config.abelian is not None:
        sl = ctx.block_slices[-1]
        residuals["abelian"] = float(np.max(np.abs(psi_re[sl, sl])))
    off = psi_re - expected
    for k in range(len(ctx.block_slices)):
        sl = ctx.block_slices[k]
        off[sl, sl] = 0.0
    residuals["off_block"] = float(np.max(np.abs(off)))
    return ResidualReport(residuals, tolerance=tolerance, info=info)


def generic_equivalence(model: AssembledModel, f: Spinor | None = None,
                        tolerance: float = 1e-8) -> ResidualReport:
    """Entrywise match of the raw GRic / Clifford route with the block system.

    Convention fixed here: 2 * [GRic(u+, v-) - (i / 8 nu)(u+ F, v- F)] on the
    (1-t) a1 columns must equal the specialized residual matrix
    (c_k - 1) Killing - psi_F (block-diagonal, zero off-block and on the
    abelian block); on the s columns both sides must vanish (tangency).
    """
    ctx = model.ctx
    if f is None:
        f = build_flux(model)
    parity = Spinor(f.coeffs).parity
    if parity == "mixed":
        raise AlgebraError("generic route needs a definite-parity flux")
    nu = 1.0 if parity == "even" else 1j

    n_l = ctx.n_letters
    s_dim = model.s_dim
    minus_cols = model.vplus.span_minus[:, :n_l + s_dim]
    gm = gric_matrix(model.algebra, model.vplus, minus_cols=minus_cols)

    unit = np.eye(n_l)
    plus_acted = [ctx.act_plus(unit[a], f.coeffs) for a in range(n_l)]
    minus_acted = [ctx.act_minus(unit[b], f.coeffs) for b in range(n_l)]
    spin_side = np.zeros((n_l, n_l), dtype=complex)
    for a in range(n_l):
        for b in range(n_l):
            spin_side[a, b] = (1j / (8.0 * nu)) * ctx.mukai(plus_acted[a],
                                                            minus_acted[b])
    if np.max(np.abs(spin_side.imag)) > 1e-9:
        raise AlgebraError("spinor side of the flow equation is not real")

    generic = 2.0 * (gm[:, :n_l] - spin_side.real)
    expected = np.zeros((n_l, n_l))
    psi = psi_f(model, f).real
    for k in range(len(model.config.blocks)):
        sl = ctx.block_slices[k]
        expected[sl, sl] = (model.config.blocks[k].c - 1.0) * _killing_on_letters(model, k)
    specialized = expected - psi
    residuals = {
        "oracle_entrywise": float(np.max(np.abs(generic - specialized))),
        "tangency_columns": float(np.max(np.abs(gm[:, n_l:]), initial=0.0)),
        "scalar_vs_curvature": _scalar_consistency(model),
    }
    return ResidualReport(residuals, tolerance=tolerance)


def _scalar_consistency(model: AssembledModel) -> float:
    """|r_scalar - 4 * scalar_curvature(g, V+, 0)|."""
    from .curvature import scalar_curvature
    r = scalar_curvature(model.algebra, model.vplus)
    signed = scalar_equation_residual(model.config, model.ctx.block_dims)
    return abs(signed - 4.0 * r)


# ---------------------------------------------------------------------------
# first ansatz (polynomial flux on AdS_{10-2M} x CP^M)


def first_ansatz_system(m_cp: int, c0: float, c1: float, lam1: float,
                        d: np.ndarray) -> np.ndarray:
    """Signed residuals of the four closed-form constraints, M in {1, 2, 3}."""
    if m_cp not in (1, 2, 3):
        raise ConfigError(f"M must be 1, 2 or 3, got {m_cp}")
    d = np.asarray(d, dtype=float)
    if d.shape != (m_cp + 1,):
        raise ConfigError(f"need {m_cp + 1} polynomial coefficients")
    binom = np.array([math.comb(m_cp, n) for n in range(m_cp + 1)], dtype=float)
    weights = np.array([2 * n - m_cp for n in range(m_cp + 1)], dtype=float)
    r1 = (5.0 - m_cp) * (1.0 + c0) + lam1 * m_cp * (1.0 + c1)
    r2 = 2.0 * (1.0 - c0) - float(np.sum(d ** 2 * binom))
    r3 = -lam1 * 2.0 * m_cp * (1.0 - c1) - float(np.sum(d ** 2 * binom * weights))
    r4 = float(sum(d[n] * d[n - 1] * math.comb(m_cp - 1, n - 1)
                   for n in range(1, m_cp + 1)))
    return np.array([r1, r2, r3, r4])


def first_ansatz_residuals(m_cp: int, c0: float, c1: float, lam1: float,
                           d, tolerance: float = 1e-8) -> ResidualReport:
    res = first_ansatz_system(m_cp, c0, c1, lam1, np.asarray(d, dtype=float))
    names = ["scalar", "flux_norm", "flux_weighted", "flux_adjacent"]
    return ResidualReport({n: abs(v) for n, v in zip(names, res)},
                          tolerance=tolerance)


def first_ansatz_config(m_cp: int, c0: float, c1: float, lam1: float,
                        d) -> SugraConfig:
    """AdS_{10-2M} x CP^M configuration carrying the polynomial flux."""
    m = 10 - 2 * m_cp
    return SugraConfig(
        blocks=(
            BlockSpec((AlgebraSpec("so", p=m - 1, q=2, involution="last_row"),),
                      lam=1.0, c=c0),
            BlockSpec((AlgebraSpec("su", n=m_cp + 1, involution="u1_block"),),
                      lam=lam1, c=c1),
        ),
        flux=FluxAnsatz.polynomial(d),
    )


# ---------------------------------------------------------------------------
# second ansatz (volume products)


def volume_system(cs, lams, dims, has_abelian: bool,
                  f_map: dict[tuple[int, ...], float]) -> np.ndarray:
    """Signed residuals: scalar equation, then 2(1-c_k) lambda_k = sum_h ... per k.

    cs, lams, dims run over the graded blocks (lams[0] = 1); with an abelian
    block the volume index range gains a final slot with lambda := 0.
    """
    nblocks = len(cs)
    nslots = nblocks + (1 if has_abelian else 0)
    for h in f_map:
        if len(h) != nslots:
            raise ConfigError(f"flux key {h} must have {nslots} entries")
    lhs = (1.0 + cs[0]) * dims[0]
    rhs = sum(-lams[k] * (1.0 + cs[k]) * dims[k] for k in range(1, nblocks))
    out = [lhs - rhs]
    lams_ext = list(lams) + ([0.0] if has_abelian else [])
    cs_ext = list(cs) + ([0.0] if has_abelian else [])
    for k in range(nslots):
        total = sum((-1.0) ** (h[0] + h[k]) * val ** 2 for h, val in f_map.items())
        out.append(2.0 * (1.0 - cs_ext[k]) * lams_ext[k] - total)
    return np.array(out)


def second_ansatz_system(config: SugraConfig, dims: list[int],
                         f_map: dict[tuple[int, ...], float]) -> np.ndarray:
    return volume_system(config.c_values, config.lam_values, dims,
                         config.abelian is not None, f_map)


def second_ansatz_residuals(model: AssembledModel,
                            f_map: dict[tuple[int, ...], float] | None = None,
                            tolerance: float = 1e-8,
                            structural: bool = True) -> ResidualReport:
    """Volume-product residuals; structural adds the contraction hypothesis (diota)."""
    config = model.config
    if f_map is None:
        if config.flux.kind != "volume_products":
            raise ConfigError("configuration does not carry a volume-products flux")
        f_map = config.flux.volume_dict()
    res = second_ansatz_system(config, model.ctx.block_dims, f_map)
    residuals = {"scalar": abs(res[0])}
    for k in range(1, len(res)):
        residuals[f"volume_{k - 1}"] = abs(res[k])
    info: dict[str, float] = {}
    if structural:
        f = build_flux(model, FluxAnsatz.volume_products(f_map))
        residuals["diota"] = _diota_residual(model, f)
        parity_res, _ = model.ctx.parity_residual(f.coeffs)
        residuals["parity"] = parity_res
    return ResidualReport(residuals, tolerance=tolerance, info=info)


def _diota_residual(model: AssembledModel, f: Spinor) -> float:
    """max over u, v of |(iota_u iota_v F wedge *F)^top|."""
    ctx = model.ctx
    m = ctx.n_letters
    star_f = ctx.hodge(f.coeffs)
    worst = 0.0
    for b in range(m):
        inner = np.zeros_like(f.coeffs)
        ext.add_contract(inner, f.coeffs, m, b)
        for a in range(b + 1, m):
            outer = np.zeros_like(inner)
            ext.add_contract(outer, inner, m, a)
            worst = max(worst, abs(ext.top_coefficient(outer, star_f, m)))
    return worst


# ---------------------------------------------------------------------------
# eta family


def eta_family(m: int, block1: BlockSpec | tuple[AlgebraSpec, ...] | AlgebraSpec,
               c0: float) -> SugraConfig:
    """One-parameter family with flux a * (omega_0 + R omega_0), a^2 = 2(1 - c0).

    c1 solves (1+c0)/(1-c0) * m/(10-m) = (1+c1)/(1-c1) and
    lambda_1 = -(1-c0)/(1-c1).
    """
    if not 2 <= m <= 8:
        raise ConfigError(f"m must be in 2..8, got {m}")
    if c0 >= 1.0:
        raise ConfigError(f"need c0 < 1 for a positive flux norm, got {c0}")
    rho = (1.0 + c0) / (1.0 - c0) * m / (10.0 - m)
    if abs(rho + 1.0) < 1e-12:
        raise ConfigError("degenerate family point: c1 would be infinite")
    c1 = (rho - 1.0) / (rho + 1.0)
    if abs(abs(c1) - 1.0) < 1e-12:
        raise ConfigError("degenerate family point: |c1| = 1")
    lam1 = -(1.0 - c0) / (1.0 - c1)
    a = math.sqrt(2.0 * (1.0 - c0))
    if isinstance(block1, AlgebraSpec):
        factors = (block1,)
    elif isinstance(block1, BlockSpec):
        factors = block1.factors
    else:
        factors = tuple(block1)
    return SugraConfig(
        blocks=(
            BlockSpec((AlgebraSpec("so", p=m - 1, q=2, involution="last_row"),),
                      lam=1.0, c=c0),
            BlockSpec(factors, lam=lam1, c=c1),
        ),
        flux=FluxAnsatz.volume_products({(1, 0): a}),
    )


# ---------------------------------------------------------------------------
# numerical solving and scanning


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    message: str = ""


def newton_solve(residual_fn, x0, pins=(), tol: float = 1e-10,
                 max_iter: int = 100, fd_step: float = 1e-7) -> NewtonResult:
    """Damped Newton with a central-difference Jacobian on the unpinned variables."""
    x = np.asarray(x0, dtype=float).copy()
    pins = sorted(set(int(i) for i in pins))
    free = [i for i in range(x.size) if i not in pins]
    if not free:
        r = np.asarray(residual_fn(x), dtype=float)
        ok = float(np.max(np.abs(r))) < tol
        return NewtonResult(x, float(np.max(np.abs(r))), 0, ok,
                            "" if ok else "all variables pinned; residual nonzero")
    r = np.asarray(residual_fn(x), dtype=float)
    norm = float(np.max(np.abs(r)))
    for it in range(1, max_iter + 1):
        if norm < tol:
            return NewtonResult(x, norm, it - 1, True)
        jac = np.zeros((r.size, len(free)))
        for col, i in enumerate(free):
            h = fd_step * max(1.0, abs(x[i]))
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            jac[:, col] = (np.asarray(residual_fn(xp)) - np.asarray(residual_fn(xm))) / (2 * h)
        if not np.all(np.isfinite(jac)):
            return NewtonResult(x, norm, it, False, "non-finite Jacobian")
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[0] == 0 or (sv.size == min(jac.shape) and sv[min(jac.shape) - 1] < 1e-14 * sv[0]
                          and jac.shape[0] >= jac.shape[1]):
            return NewtonResult(x, norm, it, False, "singular Jacobian")
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        lam = 1.0
        for _ in range(12):
            x_try = x.copy()
            for col, i in enumerate(free):
                x_try[i] = x[i] + lam * step[col]
            r_try = np.asarray(residual_fn(x_try), dtype=float)
            norm_try = float(np.max(np.abs(r_try)))
            if norm_try < norm or norm_try < tol:
                x, r, norm = x_try, r_try, norm_try
                break
            lam *= 0.5
        else:
            return NewtonResult(x, norm, it, False, "line search stalled")
    return NewtonResult(x, norm, max_iter, norm < tol,
                        "" if norm < tol else f"no convergence after {max_iter} iterations")


@dataclass
class ScanRow:
    params: dict[str, float]
    report: ResidualReport | None
    status: str  # "ok" | "error"
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "ok" and self.report is not None and self.report.passed


def grid_points(grid: dict[str, list[float]]) -> list[dict[str, float]]:
    """Row-major product over the grid in the given key order."""
    names = list(grid.keys())
    points: list[dict[str, float]] = [{}]
    for name in names:
        points = [dict(p, **{name: float(v)}) for p in points for v in grid[name]]
    return points


def scan(evaluate, grid: dict[str, list[float]], threads: int | None = None) -> list[ScanRow]:
    """Deterministic grid scan; evaluate(params) -> ResidualReport.

    evaluate must be picklable when threads > 1 (a module-level function or
    functools.partial of one); rows keep grid order regardless of worker count.
    """
    points = grid_points(grid)
    if threads is not None and threads > 1 and len(points) > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_scan_eval, evaluate, p) for p in points]
            return [f.result() for f in futures]
    return [_scan_eval(evaluate, p) for p in points]


def _scan_eval(evaluate, params: dict[str, float]) -> ScanRow:
    try:
        report = evaluate(params)
        return ScanRow(params=params, report=report, status="ok")
    except Exception as exc:  # noqa: BLE001 - boundary rows are data, not crashes
        return ScanRow(params=params, report=None, status="error", message=str(exc))
