"""DEIM/W-DEIM model order reduction in weighted inner-product spaces."""

from ._deimkit import (
    CanonicalStructure,
    ConfigError,
    NumericalError,
    Projector,
    build_deim,
    build_wdeim_generalized,
    build_wdeim_pointwise,
    build_wdeim_scaled,
    fem_weights,
    pod,
    run_example,
    select,
    srrqr,
)

__all__ = [
    "CanonicalStructure",
    "ConfigError",
    "NumericalError",
    "Projector",
    "build_deim",
    "build_wdeim_generalized",
    "build_wdeim_pointwise",
    "build_wdeim_scaled",
    "fem_weights",
    "pod",
    "run_example",
    "select",
    "srrqr",
]
