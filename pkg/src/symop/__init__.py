"""Symmetric operator spaces over direct sums of matrix blocks:
singular value functions, symmetric gauges and their duals, hermitian
certification, central splitting and isometry factorization."""

from .algebra import (AlgebraElement, CentralProjection, TracialAlgebra,
                      central_support, commutator, left_support,
                      polar_decompose, right_support, spectral_projection,
                      trace)
from .central import (admissible_splits, central_decomposition,
                      central_split_pair, centrality_defects,
                      verify_bimodule_identity)
from .errors import (ClassificationFailedError, DomainError,
                     FactorizationRejectedError, HypothesisViolatedError,
                     NotFactorableError, NotSurjectiveError, StructureError,
                     SymopError)
from .hermitian import (CentralSplit, HermitianCertificate,
                        HermitianDecomposition, ProjectionBoundReport,
                        SuperOperator, central_split, certify, corner_defect,
                        decompose_hermitian, exp_isometry_defect,
                        max_imag_numerical_range, orthogonality_defect,
                        projection_bound_check)
from .isometry import (ElementaryWitness, IsometryFactorization,
                       IsometryReport, JordanExtraction, JordanIsomorphism,
                       conjugate_left_mult, extract_jordan, factor_isometry,
                       is_elementary, is_isometry, jordan_classify)
from .norms import (KyFanNorm, L1CapLinfNorm, L1PlusLinfNorm, LorentzNorm,
                    LpNorm, SymmetricNorm, TwoAtomNorm, dual_norm, l2_norm,
                    norm, norm_from_config, proportional_to_l2, sip,
                    support_functional)
from .singular import (StepFunction, distribution, mu, mu_from_distribution,
                       mu_with_assignment, product_integral, submajorizes)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
