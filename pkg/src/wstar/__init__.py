"""Hilbert modules over finite-dimensional W*-algebras, computably.

Modules are presented by projections over block matrix algebras; kernels,
complements, polar isometries, Fredholm indices, Hodge theory of finite
complexes and two Lefschetz-type invariants (one K0-valued and angle
resolved, one HC0-valued) are all available as plain functions, and every
result can be replayed against a brute-force complex-linear oracle.
"""

from ._kernels import BACKEND as kernel_backend
from .algebra import (
    AlgElem,
    AlgMatrix,
    BlockAlgebra,
    HC0Class,
    K0Class,
    blocktrace,
    chern_ch0,
    k0_of_projection,
)
from .complexes import (
    ComplexEndomorphism,
    FiniteComplex,
    HarmonicSpaces,
    chern_consistency,
    fredholm_F,
    hodge_spaces,
    lefschetz_L0,
    lefschetz_L1,
    validate_complex,
)
from .modules import (
    HilbertModule,
    ModuleElement,
    Submodule,
    biorthogonal_complement,
    ideal_support_projection,
    inner_product,
    intersect,
    is_direct_summand,
    orthogonal_complement,
    structure_decompose,
    submodule_sum,
)
from .operators import (
    ModuleMap,
    adjoint_map,
    embed_as_summand,
    fredholm_index,
    identity_map,
    kernel_projection,
    operator_sqrt,
    polar_isometry,
    zero_map,
)
from .spectral import (
    SpectralFunction,
    SpectralMeasure,
    conjugation_invariance_check,
    cyclic_trace,
    spectral_function,
    spectral_measure,
)

__version__ = "0.1.0"

__all__ = [
    "AlgElem",
    "AlgMatrix",
    "BlockAlgebra",
    "HC0Class",
    "K0Class",
    "blocktrace",
    "chern_ch0",
    "k0_of_projection",
    "HilbertModule",
    "ModuleElement",
    "Submodule",
    "inner_product",
    "orthogonal_complement",
    "biorthogonal_complement",
    "intersect",
    "submodule_sum",
    "structure_decompose",
    "ideal_support_projection",
    "is_direct_summand",
    "ModuleMap",
    "identity_map",
    "zero_map",
    "adjoint_map",
    "kernel_projection",
    "operator_sqrt",
    "polar_isometry",
    "embed_as_summand",
    "fredholm_index",
    "SpectralMeasure",
    "SpectralFunction",
    "spectral_measure",
    "spectral_function",
    "cyclic_trace",
    "conjugation_invariance_check",
    "FiniteComplex",
    "ComplexEndomorphism",
    "HarmonicSpaces",
    "validate_complex",
    "hodge_spaces",
    "fredholm_F",
    "lefschetz_L1",
    "lefschetz_L0",
    "chern_consistency",
    "kernel_backend",
]
