"""Quadratic forms over quantum affine space: normal-form arithmetic,
the mu-symmetric matrix correspondence, rank classification and verified
constructive factorizations."""

from .correspond import MuSymmetricMatrix, form_to_matrix, matrix_to_form
from .invariants import (
    SIGN_PAIRS,
    RadicalPair,
    mu_det_2,
    mu_det_d7,
    mu_det_d8,
    mu_det_d8_any_sign,
    mu_minors_3,
    radicals,
    sextic,
    twist_simplified_d7,
    twist_simplified_d8,
)
from .oracle import (
    CaseReport,
    InstanceSpec,
    classical_rank,
    random_instances,
    sample_mu,
    selftest,
    verify_factorization,
)
from .parse import ParseError, parse, render, to_quadratic_form
from .rank import (
    Factorization,
    MuRank,
    decompose_3,
    factor_2,
    factor_3,
    mu_rank_2,
    mu_rank_3,
    mu_rank_general,
    square_2,
    square_3,
    square_general,
    unique_factor_2,
)
from .ring import (
    DEFAULT_TOL,
    InputError,
    LinearForm,
    MuMatrix,
    QuadraticForm,
    SkewformError,
    SkewPoly,
    VerificationError,
    is_twist_of_polynomial_ring,
    multiply,
    normal_form,
    permute_form,
    permute_linear,
    product_linear,
    square_linear,
    tau_star_product,
)

__version__ = "0.1.0"

__all__ = [
    "CaseReport",
    "DEFAULT_TOL",
    "Factorization",
    "InputError",
    "InstanceSpec",
    "LinearForm",
    "MuMatrix",
    "MuRank",
    "MuSymmetricMatrix",
    "ParseError",
    "QuadraticForm",
    "RadicalPair",
    "SIGN_PAIRS",
    "SkewPoly",
    "SkewformError",
    "VerificationError",
    "classical_rank",
    "decompose_3",
    "factor_2",
    "factor_3",
    "form_to_matrix",
    "is_twist_of_polynomial_ring",
    "matrix_to_form",
    "mu_det_2",
    "mu_det_d7",
    "mu_det_d8",
    "mu_det_d8_any_sign",
    "mu_minors_3",
    "mu_rank_2",
    "mu_rank_3",
    "mu_rank_general",
    "multiply",
    "normal_form",
    "parse",
    "permute_form",
    "permute_linear",
    "product_linear",
    "radicals",
    "random_instances",
    "render",
    "sample_mu",
    "selftest",
    "sextic",
    "square_2",
    "square_3",
    "square_general",
    "square_linear",
    "tau_star_product",
    "to_quadratic_form",
    "twist_simplified_d7",
    "twist_simplified_d8",
    "unique_factor_2",
    "verify_factorization",
]
