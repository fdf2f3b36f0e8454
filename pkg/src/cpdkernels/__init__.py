"""Operator-valued kernels over finite direct sums of matrix algebras.

The package decides positive and conditional positive definiteness of
kernels with values in ``M_{d_1} + ... + M_{d_m}``, converts between the two
notions through the base-point shift, factors kernels through Hilbert module
points, splits zero-diagonal conditionally positive tables into sums of
squared differences, certifies kernel majorization by a contraction, and
embeds algebra-valued metrics isometrically into the column module.
"""

from .algebra import (
    DEFAULT_TOL,
    AlgebraDescriptor,
    AlgebraElement,
    DimensionMismatch,
    ModuleElement,
    ToleranceConfig,
    abs_value,
    adjoint,
    is_positive,
    leq,
    module_abs,
    module_inner,
    module_norm,
    op_norm,
    re_part,
    im_part,
)
from .decomposition import (
    CPDDecomposition,
    Factorization,
    MajorizationCertificate,
    PreconditionFailure,
    decompose_cpd,
    factor_kernel,
    factor_pd,
    kernel_leq,
    majorized_kernel,
    reconstruct_cpd,
    recover_contraction,
    sum_sq_diff_decomposition,
    sum_sq_diff_reconstruct,
)
from .embedding import (
    CStarMetric,
    EmbeddingResult,
    InvalidMetric,
    distance_matrix_from_points,
    embed,
    is_embeddable,
    metric_norm,
    metric_to_kernel,
    scalar_metric,
    validate_metric,
)
from .generators import (
    FIXTURE_NAMES,
    GenConfig,
    fixture,
    random_cpd_kernel,
    random_gram_kernel,
    random_hermitian_kernel,
    random_majorized_pair,
    random_metric,
    random_module_element,
    random_non_cpd_kernel,
    random_positive_two_by_two,
)
from .kernels import (
    IndexSet,
    Kernel,
    NotHermitian,
    UnknownLabel,
    Verdict,
    Witness,
    assemble_gram,
    cauchy_schwarz_cpd_check,
    cauchy_schwarz_pd_check,
    compressed_gram,
    cond_positive_matrix_check,
    is_conditionally_positive_definite,
    is_positive_definite,
    kernel_norm,
    recover_affine_part,
    scalar_kernel,
    schur_product,
    shift_transform,
    two_by_two_check,
)
from .serialize import (
    SchemaError,
    dump_json,
    kernel_from_json,
    kernel_to_json,
    load_document,
    metric_from_json,
    metric_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "ModuleElement",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "DimensionMismatch",
    "adjoint",
    "is_positive",
    "leq",
    "abs_value",
    "op_norm",
    "re_part",
    "im_part",
    "module_inner",
    "module_abs",
    "module_norm",
    "IndexSet",
    "Kernel",
    "Verdict",
    "Witness",
    "NotHermitian",
    "UnknownLabel",
    "scalar_kernel",
    "kernel_norm",
    "assemble_gram",
    "compressed_gram",
    "is_positive_definite",
    "is_conditionally_positive_definite",
    "shift_transform",
    "recover_affine_part",
    "cond_positive_matrix_check",
    "two_by_two_check",
    "schur_product",
    "cauchy_schwarz_cpd_check",
    "cauchy_schwarz_pd_check",
    "Factorization",
    "CPDDecomposition",
    "MajorizationCertificate",
    "PreconditionFailure",
    "factor_pd",
    "factor_kernel",
    "decompose_cpd",
    "reconstruct_cpd",
    "sum_sq_diff_decomposition",
    "sum_sq_diff_reconstruct",
    "kernel_leq",
    "majorized_kernel",
    "recover_contraction",
    "CStarMetric",
    "EmbeddingResult",
    "InvalidMetric",
    "scalar_metric",
    "metric_norm",
    "validate_metric",
    "metric_to_kernel",
    "is_embeddable",
    "embed",
    "distance_matrix_from_points",
    "GenConfig",
    "FIXTURE_NAMES",
    "fixture",
    "random_gram_kernel",
    "random_cpd_kernel",
    "random_hermitian_kernel",
    "random_non_cpd_kernel",
    "random_metric",
    "random_module_element",
    "random_positive_two_by_two",
    "random_majorized_pair",
    "SchemaError",
    "dump_json",
    "kernel_to_json",
    "kernel_from_json",
    "metric_to_json",
    "metric_from_json",
    "load_document",
    "__version__",
]
