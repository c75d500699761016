"""Finite strict higher categories with classical or non-commutative
exchange, their involutions and conjugations, convolution algebras over
finite bases, and hypermatrix hyper-C*-algebras with numerically certified
C*-axioms."""

from ._kernels import BACKEND, HAS_NUMBA
from .coeff import (BOTH, CONTRAVARIANT, COVARIANT, NEITHER, ComplexField,
                    CovarianceAssignment, MatrixAlgebra, base_pairs_for,
                    covariance_match, is_commutative, validate_star_algebra)
from .convolution import (ConvolutionAlgebra, Section, conv_norm, convolve, delta,
                          embed, embedded_table_category, exchange_witness,
                          identity_section, involve, left_regular_rep,
                          validate_embedded_category)
from .cstar import (CheckConfig, CollapseReport, SuiteReport, cstar_suite,
                    eh_collapse_all, eh_collapse_check, is_positive,
                    norm_equivalence, op_norm)
from .errors import (CellBudgetExceeded, DimMismatch, HicatError, MissingConjugate,
                     NonCommutingFamily, NotComposable, SpecFileError,
                     UnassignedVariance, UnsupportedCoefficient)
from .hypermatrix import (Hypermatrix, HypermatrixSystem, hinvol, hmul, hnorm,
                          hyper_from_section, load_hyper, save_hyper,
                          section_from_hyper, unit)
from .involutive import (ConjugationData, InvolutionSpec, dagger, ddagger,
                         fold_left, fold_right, generated_involution_group,
                         group_conjugation_fixture, validate_conjugation,
                         validate_functor, validate_involution, validate_transfor1,
                         verify_folding_laws)
from .ncat import (FiniteGlobularCategory, FullDepthCategory, build_double_deloop,
                   build_group_category, build_pair_groupoid, build_product,
                   build_terminal, check_exchange, check_nc_exchange, compose,
                   compose_full_depth, diagonal_block, mask_levels, subset_mask,
                   suspend, validate_full_depth, validate_globular,
                   validate_partial_category)
from .report import ValidationReport, Violation

__version__ = "0.1.0"
