"""Band spectrum of the PT-symmetric Hill operator -y'' + 2a cos(2x) y = lambda y."""

from ._core import (
    ConfigError,
    DomainError,
    ModelViolation,
    NumericalFailure,
    PtbandError,
    V_from_a,
    a_from_V,
    antiperiodic_eigenvalues,
    bloch_roots,
    characteristic_N,
    find_singularity,
    find_V2,
    find_Vk,
    hill_discriminant,
    periodic_eigenvalues,
    phase_of,
    real_components,
    roots_P,
    trace_bands,
    verify_properties,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ModelViolation",
    "NumericalFailure",
    "PtbandError",
    "V_from_a",
    "a_from_V",
    "antiperiodic_eigenvalues",
    "bloch_roots",
    "characteristic_N",
    "find_singularity",
    "find_V2",
    "find_Vk",
    "hill_discriminant",
    "periodic_eigenvalues",
    "phase_of",
    "real_components",
    "roots_P",
    "trace_bands",
    "verify_properties",
]
