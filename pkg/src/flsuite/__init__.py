"""Double Fourier-Legendre analysis and generalised bounded-variation functionals."""

__version__ = "0.1.0"

from .legendre_core import (  # noqa: E402
    QuadratureRule,
    eval_basis,
    gamma_ratio,
    gauss_rule,
    kernel,
    kernel_tail_integral,
)
from .spectral import (  # noqa: E402
    CoefficientMatrix,
    coefficients,
    partial_sum,
    partial_sum_grid,
    partial_sum_kernel,
    sup_error,
)
from .variation import (  # noqa: E402
    GridFunction2D,
    LambdaWeights,
    lambda_variation_line,
    mixed_lambda_variation,
    modulus_of_variation,
    partial_lambda_variation,
)

__all__ = [
    "QuadratureRule",
    "eval_basis",
    "gamma_ratio",
    "gauss_rule",
    "kernel",
    "kernel_tail_integral",
    "CoefficientMatrix",
    "coefficients",
    "partial_sum",
    "partial_sum_grid",
    "partial_sum_kernel",
    "sup_error",
    "GridFunction2D",
    "LambdaWeights",
    "lambda_variation_line",
    "mixed_lambda_variation",
    "modulus_of_variation",
    "partial_lambda_variation",
]
