# core package
from core.order import (
    Vector,
    PositiveVector,
    OrderedInterval,
    leq,
    lt_strict,
    lneq,
    relation,
    hadamard,
    reciprocal,
)
from core.matrix_analysis import (
    NonnegMatrix,
    PermutationMatrix,
    NormalFormDecomposition,
    is_irreducible,
    row_all_positive,
    normal_form,
    spectral_radius,
    apply_permutation,
    apply_permutation_vec,
)

__all__ = [
    "Vector",
    "PositiveVector",
    "OrderedInterval",
    "leq",
    "lt_strict",
    "lneq",
    "relation",
    "hadamard",
    "reciprocal",
    "NonnegMatrix",
    "PermutationMatrix",
    "NormalFormDecomposition",
    "is_irreducible",
    "row_all_positive",
    "normal_form",
    "spectral_radius",
    "apply_permutation",
    "apply_permutation_vec",
]
