"""Stabilizer-state certification: DFE-C and Basis-Min-of-Means.

Symplectic Pauli algebra and tableaux, exact expectations on stabilizer
mixtures, parameter solving, protocol simulation and intrinsic
false-positive estimation.
"""
from .errors import (
    BudgetTooTight,
    CircuitParseError,
    DependentRows,
    DimensionMismatch,
    FactViolation,
    FidelityMismatch,
    InfeasibleGap,
    NotABadState,
    SingularBasis,
    StabCertError,
    TooLarge,
    UnknownGate,
)
from .gf2 import BitMatrix, BitVec, rank, sample_full_rank, solve_coordinates
from .intrinsic import EtaEstimate, eta_bound_curves, eta_exact, eta_monte_carlo, worst_case_search
from .params import ProtocolParams, solve_bmom, solve_dfe, validate
from .pauli import PauliOperator, compose, symplectic_product
from .protocols import (
    CertificateSummary,
    DriftingSource,
    StationarySource,
    measurement_settings_count,
    run_bmom,
    run_dfe_c,
)
from .states import (
    ExpectationProfile,
    StabilizerMixture,
    coset_deficit_family,
    fidelity,
    generator_flip_family,
    orthogonal_state,
)
from .tableau import (
    CircuitTemplate,
    Membership,
    StabilizerTableau,
    group_element,
    membership,
    parse_circuit,
    sample_basis,
    sample_stabilizer,
    tableau_from_circuit,
)

__all__ = [
    "BitMatrix",
    "BitVec",
    "EtaEstimate",
    "PauliOperator",
    "ProtocolParams",
    "compose",
    "eta_bound_curves",
    "eta_exact",
    "eta_monte_carlo",
    "rank",
    "sample_full_rank",
    "solve_bmom",
    "solve_coordinates",
    "solve_dfe",
    "symplectic_product",
    "validate",
    "worst_case_search",
    "BudgetTooTight",
    "CertificateSummary",
    "CircuitParseError",
    "CircuitTemplate",
    "DependentRows",
    "DimensionMismatch",
    "DriftingSource",
    "ExpectationProfile",
    "FactViolation",
    "FidelityMismatch",
    "InfeasibleGap",
    "Membership",
    "NotABadState",
    "SingularBasis",
    "StabCertError",
    "StabilizerMixture",
    "StabilizerTableau",
    "StationarySource",
    "TooLarge",
    "UnknownGate",
    "coset_deficit_family",
    "fidelity",
    "generator_flip_family",
    "group_element",
    "measurement_settings_count",
    "membership",
    "orthogonal_state",
    "parse_circuit",
    "run_bmom",
    "run_dfe_c",
    "sample_basis",
    "sample_stabilizer",
    "tableau_from_circuit",
]

__version__ = "0.1.0"
