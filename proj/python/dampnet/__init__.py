"""Optimal inflow control for damped transport on tree networks."""

from ._dampnet import (
    DampingShape,
    DomainError,
    Error,
    Experiment,
    InfeasibleError,
    IoError,
    JacobiDemandSpec,
    NonInvertibleError,
    NumericsError,
    RangeError,
    SchemaError,
    SineTerm,
    StepTerm,
    TimeFunction,
    ValidationError,
    backward_damp,
    conditional_mean,
    derive_seed,
    forward_damp,
    simulate_jacobi,
    validate_config,
)

__all__ = [
    "DampingShape",
    "DomainError",
    "Error",
    "Experiment",
    "InfeasibleError",
    "IoError",
    "JacobiDemandSpec",
    "NonInvertibleError",
    "NumericsError",
    "RangeError",
    "SchemaError",
    "SineTerm",
    "StepTerm",
    "TimeFunction",
    "ValidationError",
    "backward_damp",
    "conditional_mean",
    "derive_seed",
    "forward_damp",
    "simulate_jacobi",
    "validate_config",
]
