import itertools

import numpy as np
import pytest

from clusterbell import _pykernels, kernels
from clusterbell.pauli import PauliString

from conftest import BACKENDS, dense_pauli

WORDS4 = ["".join(w) for w in itertools.product("IXYZ", repeat=4)]


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_apply_matches_dense_for_all_strings(impl, rng):
    states = rng.normal(size=(50, 16)) + 1j * rng.normal(size=(50, 16))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    for word in WORDS4:
        x, z, coef = PauliString.parse(word).masks()
        m = dense_pauli(word)
        for v in states:
            np.testing.assert_allclose(impl.apply_pauli(v, x, z, coef), m @ v, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_expectations_match_dense(impl, rng):
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    v /= np.linalg.norm(v)
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    for word in WORDS4:
        x, z, coef = PauliString.parse(word).masks()
        m = dense_pauli(word)
        assert impl.expectation_pure(v, x, z, coef) == pytest.approx(np.vdot(v, m @ v), abs=1e-12)
        assert impl.expectation_mixed(rho, x, z, coef) == pytest.approx(np.trace(rho @ m), abs=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree_on_stabilizer_scan(rng):
    from clusterbell.qstate import linear_cluster

    v = linear_cluster(5).vector
    py = sorted(BACKENDS[0].stabilizer_scan(v, 5, 1e-9))
    cy = sorted(BACKENDS[1].stabilizer_scan(v, 5, 1e-9))
    assert [(x, z) for x, z, _ in py] == [(x, z) for x, z, _ in cy]
    assert len(py) == 31


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_lhv_scan_chsh(impl):
    # bits: 0 = A, 1 = A', 2 = B, 3 = B'; |AB + AB'| + |A'B - A'B'|
    bits = np.array([[0, 2], [0, 3], [1, 2], [1, 3]])
    best, idx = impl.lhv_scan(bits, [1, 1, 1, -1], [0, 0, 1, 1], 2, 4)
    # brute force over the 16 strategies
    vals = []
    for s in range(16):
        a, a2, b, b2 = (1 - 2 * ((s >> k) & 1) for k in range(4))
        vals.append(abs(a * b + a * b2) + abs(a2 * b - a2 * b2))
    assert best == max(vals) == 2
    assert idx == vals.index(2)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_lhv_scan_lowest_index_wins_ties(impl):
    best, idx = impl.lhv_scan(np.array([[0], [1]]), [1, 1], [0, 1], 2, 2)
    assert (best, idx) == (2, 0)


def test_python_signs_are_signed_ints():
    # popcount returns unsigned bytes; the sign vector must not wrap
    assert _pykernels._signs(4, 0b11).tolist() == [1, -1, -1, 1]
