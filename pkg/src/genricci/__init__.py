"""Generalized Ricci curvature, Dirac operators and SUGRA systems on quadratic Lie algebras."""

from .curvature import (Divergence, GRicTensor, action_value, background_equations,
                        dsquared, gradient_check, gric, gric_div_shift_check,
                        gric_flip_check, ricci_flow, scalar_curvature, tangency_check)
from .errors import (AlgebraError, ConfigError, DegeneracyError, DimensionError,
                     SignatureError)
from .genmetric import (GeneralizedMetric, IsotropicSubalgebra, admissible_check,
                        deform, signature, vplus_of_double)
from .liealg import (DoubleAlgebra, InvolutiveSplitting, QuadraticLieAlgebra,
                     build_abelian, build_so, build_su, check, direct_sum, double,
                     grading_check, killing_form, rescale_metric, split_so_last,
                     split_su_so, split_su_u1block)
from .report import ResidualReport
from .spinor import (LagrangianSplitting, Spinor, annihilator_invariants,
                     clifford_apply, hodge, invariant_forms, mukai_pairing,
                     r_vplus_apply, self_dual_project, theta)
from .sugra import (AlgebraSpec, AssembledModel, BlockSpec, FluxAnsatz, SugraConfig,
                    assemble, build_flux, check_equations, eta_family,
                    first_ansatz_residuals, generic_equivalence, newton_solve,
                    psi_f, scan, second_ansatz_residuals)

__version__ = "0.1.0"
