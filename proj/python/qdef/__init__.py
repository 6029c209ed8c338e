"""q-deformed su(2) toolkit at q = exp(is): classification, representations, potentials, Hopf checks."""

from ._core import (
    DomainError,
    NumericalFailure,
    build_rep,
    classify,
    eigenvalues,
    hopf_report,
    potential,
    qnumber,
    spectral_flow,
    thresholds,
    transition,
    unitarity_window,
    unitary_ok,
    verify_algebra,
)

__version__ = "1.0.0"
