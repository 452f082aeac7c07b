"""charcong: an exact-arithmetic workbench for congruences among Dirichlet characters.

The package finds coefficient vectors alpha with sum(alpha_chi * chi(x)) = 0
mod M across all Dirichlet characters chi mod N, by reducing the character
value matrix over the quotient ring Z[zeta_e]/(M) with an invariant-carrying
triplet of matrices, and cross-checks every result against two independent
kernel oracles.
"""

from .cyclo_ring import (
    CycloElement,
    InvalidAutomorphismError,
    NotInvertibleError,
    RingDescriptor,
    RingError,
    RingMismatchError,
    UnsupportedRingError,
    cyclotomic_polynomial,
    euler_phi,
    format_element,
    parse_element,
)
from .dirichlet import (
    CharacterMatrix,
    CongruenceVerdict,
    DirichletCharacter,
    character_matrix,
    characters,
    unit_group_structure,
    value_ring,
    verify_congruence,
)
from .kernel_oracle import (
    BudgetExceededError,
    brute_force_kernel,
    kernel_membership,
    scalar_lift_kernel,
    search_space_size,
)
from .sweep import SweepRecord, histograms, run_sweep
from .triplet import (
    InvalidOperationError,
    NothingToUndoError,
    ReductionReport,
    Triplet,
    TripletError,
    new_triplet,
)

__all__ = [
    "BudgetExceededError",
    "CharacterMatrix",
    "CongruenceVerdict",
    "CycloElement",
    "DirichletCharacter",
    "InvalidAutomorphismError",
    "InvalidOperationError",
    "NotInvertibleError",
    "NothingToUndoError",
    "ReductionReport",
    "RingDescriptor",
    "RingError",
    "RingMismatchError",
    "SweepRecord",
    "Triplet",
    "TripletError",
    "UnsupportedRingError",
    "brute_force_kernel",
    "character_matrix",
    "characters",
    "cyclotomic_polynomial",
    "euler_phi",
    "format_element",
    "histograms",
    "kernel_membership",
    "new_triplet",
    "parse_element",
    "run_sweep",
    "scalar_lift_kernel",
    "search_space_size",
    "unit_group_structure",
    "value_ring",
    "verify_congruence",
]

__version__ = "0.1.0"
