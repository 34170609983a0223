import functools

import numpy as np
import pytest

from clusterbell import _pykernels, kernels

try:
    from clusterbell import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
KERNEL_NAMES = ["apply_pauli", "expectation_pure", "expectation_mixed", "stabilizer_scan", "lhv_scan"]

# independent dense single-qubit matrices; Y|0> = i|1>
DENSE = {
    "I": np.eye(2),
    "0": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def dense_pauli(text, sign=1):
    """Dense matrix of a Pauli word, qubit 1 leftmost (most significant)."""
    return sign * functools.reduce(np.kron, [DENSE[c] for c in text])


def dense_expectation(vec_or_rho, text):
    m = dense_pauli(text)
    a = np.asarray(vec_or_rho)
    if a.ndim == 1:
        return np.vdot(a, m @ a)
    return np.trace(a @ m)


def schmidt_entropy(vec, left_dim):
    """Entanglement entropy in bits from the singular values of the amplitude matrix."""
    sv = np.linalg.svd(np.asarray(vec).reshape(left_dim, -1), compute_uv=False)
    p = sv**2
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p)))


@pytest.fixture(params=BACKENDS, ids=lambda m: m.BACKEND)
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the duration of a test."""
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(request.param, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
