"""Orthonormal systems of Heun functions on [0, 1].

Eigenvalues of the accessory parameter are roots of the Wronskian of the two
endpoint Frobenius series; the weighted norm of each eigenfunction follows in
closed form from quantities already computed during the root search.
"""

__version__ = "0.1.0"

from .core import (
    FunctionClass,
    HeunClass,
    HeunParameters,
    Side,
    class_exponents,
    existence_ok,
    orientation,
    p_factor,
    validate,
    weight,
)
from .errors import HeunError
from .frobenius import (
    Center,
    EvalBundle,
    FrobeniusSeries,
    MutualRegion,
    build_series,
    mutual_region,
)
from .spectral import (
    EigenSolution,
    SpectralBasis,
    continuation_coefficient,
    eval_heun,
    find_eigenvalues,
    normalization_integral,
    orthonormal_basis,
    wronskian,
)

__all__ = [
    "Center",
    "EigenSolution",
    "EvalBundle",
    "FrobeniusSeries",
    "FunctionClass",
    "HeunClass",
    "HeunError",
    "HeunParameters",
    "MutualRegion",
    "Side",
    "SpectralBasis",
    "build_series",
    "class_exponents",
    "continuation_coefficient",
    "eval_heun",
    "existence_ok",
    "find_eigenvalues",
    "mutual_region",
    "normalization_integral",
    "orientation",
    "orthonormal_basis",
    "p_factor",
    "validate",
    "weight",
    "wronskian",
]
