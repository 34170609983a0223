"""Simulation toolkit for the four-qubit cluster-state Bell experiment."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .nonlocality import (
    SC_TERMS,
    CorrelationTerm,
    bell_parameter,
    bell_parameter_of_state,
    ghz_argument_check,
    lhv_maximum,
)
from .pauli import PauliAxis, PauliString, apply, enumerate_stabilizers, expectation, multiply
from .qstate import QuantumState, ghz, linear_cluster, target_cluster, w3

__all__ = [
    "BACKEND",
    "SC_TERMS",
    "CorrelationTerm",
    "PauliAxis",
    "PauliString",
    "QuantumState",
    "apply",
    "bell_parameter",
    "bell_parameter_of_state",
    "enumerate_stabilizers",
    "expectation",
    "ghz",
    "ghz_argument_check",
    "linear_cluster",
    "lhv_maximum",
    "multiply",
    "target_cluster",
    "w3",
]
