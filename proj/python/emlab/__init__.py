"""Emergence laboratory: dynamics, W1 transport, covering numbers, jets, sinks."""

from ._emlab import (  # noqa: F401
    DegenerateDataError,
    EscapeError,
    SaturationError,
    SystemSpec,
    UsageError,
    cover_constant_jet,
    covering_number,
    doubling,
    emergence_curve,
    henon,
    identity,
    orbit,
    parablender_core,
    parablender_full,
    planted_sinks,
    quantize,
    rotation,
    sink_census,
    step,
    verify_covered_domain,
    w1,
)

__all__ = [
    "DegenerateDataError",
    "EscapeError",
    "SaturationError",
    "SystemSpec",
    "UsageError",
    "cover_constant_jet",
    "covering_number",
    "doubling",
    "emergence_curve",
    "henon",
    "identity",
    "orbit",
    "parablender_core",
    "parablender_full",
    "planted_sinks",
    "quantize",
    "rotation",
    "sink_census",
    "step",
    "verify_covered_domain",
    "w1",
]
