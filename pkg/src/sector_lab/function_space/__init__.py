"""Scalar functions on (0, inf), dyadic partitions and the associated norms."""

from .norms import (
    FunctionMatrix,
    HormanderNorm,
    hormander_condition,
    hormander_norm,
    hormander_norm_r,
    localized_orthonormal_family,
    mihlin_norm,
    row_matrix_norm,
    sobolev_inner,
    sobolev_norm,
)
from .partition import DyadicPartition, make_partition
from .scalar import (
    LN2,
    ScalarFunction,
    bump,
    bump_combo,
    constant,
    exp_decay,
    from_string,
    hinf0_presets,
    imag_power,
    resolvent_kernel,
    stirling1,
)

__all__ = [
    "FunctionMatrix",
    "HormanderNorm",
    "hormander_condition",
    "hormander_norm",
    "hormander_norm_r",
    "localized_orthonormal_family",
    "mihlin_norm",
    "row_matrix_norm",
    "sobolev_inner",
    "sobolev_norm",
    "DyadicPartition",
    "make_partition",
    "LN2",
    "ScalarFunction",
    "bump",
    "bump_combo",
    "constant",
    "exp_decay",
    "from_string",
    "hinf0_presets",
    "imag_power",
    "resolvent_kernel",
    "stirling1",
]
