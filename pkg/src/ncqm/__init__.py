"""Quantum mechanics on the noncommutative plane in the Hilbert-Schmidt formulation.

States are Hilbert-Schmidt operators on a truncated boson Fock space; see
:mod:`ncqm.qspace` for the representation, :mod:`ncqm.states` and
:mod:`ncqm.overlap` for coherent-state structures, :mod:`ncqm.spectra` for
exactly solvable models and :mod:`ncqm.classical` for the classical
``(z, v)`` dynamics.
"""
from ._backend import BACKEND, available_backends
from .errors import (
    DegenerateModel,
    DimensionMismatch,
    DomainError,
    NCQMError,
    QuadratureWarning,
    SeriesTruncationWarning,
    StepSizeError,
)
from .qspace import ModelParams, SuperOp, hs_inner, hs_norm, position_momentum_ops

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "ModelParams",
    "SuperOp",
    "hs_inner",
    "hs_norm",
    "position_momentum_ops",
    "NCQMError",
    "DomainError",
    "DimensionMismatch",
    "DegenerateModel",
    "StepSizeError",
    "QuadratureWarning",
    "SeriesTruncationWarning",
]
