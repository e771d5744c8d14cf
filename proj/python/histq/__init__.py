"""Decoherence functionals, ILS operators and history-space diagnostics."""

from ._core import (
    D_form,
    ILSOperator,
    NumericalError,
    ShapeError,
    SizeError,
    ValidationError,
    build_M,
    check_consistent,
    d_direct,
    d_series,
    d_stream,
    diag_excess_search,
    divergence_witness,
    embed,
    evaluate,
    prng_version,
    truncated_d,
    unboundedness_probe,
    verify_axioms,
)

__all__ = [
    "D_form",
    "ILSOperator",
    "NumericalError",
    "ShapeError",
    "SizeError",
    "ValidationError",
    "build_M",
    "check_consistent",
    "d_direct",
    "d_series",
    "d_stream",
    "diag_excess_search",
    "divergence_witness",
    "embed",
    "evaluate",
    "prng_version",
    "truncated_d",
    "unboundedness_probe",
    "verify_axioms",
]
