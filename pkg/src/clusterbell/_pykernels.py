"""Pure-Python (numpy) implementations of the hot kernels.

Every routine here has a twin in ``_ckernels.pyx`` with the same signature.
Pauli strings are passed as ``(xmask, zmask, coef)`` meaning the operator
``coef * X^xmask Z^zmask``; bit ``n - k`` of a mask addresses qubit ``k``.
"""

import numpy as np

BACKEND = "python"


def _signs(dim, zmask):
    idx = np.arange(dim, dtype=np.int64)
    return 1 - 2 * (np.bitwise_count(idx & zmask).astype(np.int64) & 1)


def apply_pauli(amps, xmask, zmask, coef):
    amps = np.asarray(amps, dtype=np.complex128)
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    out = np.empty_like(amps)
    out[idx ^ xmask] = coef * _signs(dim, zmask) * amps
    return out


def expectation_pure(amps, xmask, zmask, coef):
    amps = np.asarray(amps, dtype=np.complex128)
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    return complex(coef * np.sum(np.conj(amps[idx ^ xmask]) * _signs(dim, zmask) * amps))


def expectation_mixed(rho, xmask, zmask, coef):
    # tr(rho P) = sum_j coef * s_j * rho[j, j ^ x]
    rho = np.asarray(rho, dtype=np.complex128)
    dim = rho.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    return complex(coef * np.sum(_signs(dim, zmask) * rho[idx, idx ^ xmask]))


def stabilizer_scan(amps, n, tol):
    """Return ``(xmask, zmask, value)`` for every non-identity Hermitian string
    whose expectation on ``amps`` has modulus above ``1 - tol``."""
    amps = np.asarray(amps, dtype=np.complex128)
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    found = []
    for x in range(dim):
        shifted = np.conj(amps[idx ^ x]) * amps
        for z in range(dim):
            if x == 0 and z == 0:
                continue
            # i^popcount(x & z) makes X^x Z^z Hermitian (one factor of i per Y)
            coef = 1j ** (int(x & z).bit_count() & 3)
            val = (coef * np.sum(shifted * _signs(dim, z))).real
            if abs(val) > 1.0 - tol:
                found.append((x, z, float(val)))
    return found


def lhv_scan(term_bits, term_sign, term_block, nblocks, nbits):
    """Exhaustive search over deterministic +-1 strategies.

    ``term_bits[t]`` lists the strategy bits whose product gives term ``t``
    (padded with -1).  Strategy ``s`` assigns value ``-1`` to bit ``b`` when
    bit ``b`` of ``s`` is set.  Returns ``(best_value, lowest_best_index)``.
    """
    term_bits = np.asarray(term_bits, dtype=np.int64)
    nterms = term_bits.shape[0]
    masks = []
    for t in range(nterms):
        m = 0
        for b in term_bits[t]:
            if b >= 0:
                m ^= 1 << int(b)
        masks.append(m)
    signs = [int(s) for s in term_sign]
    blocks = [int(b) for b in term_block]
    best, best_idx = None, -1
    for s in range(1 << nbits):
        sums = [0] * nblocks
        for t in range(nterms):
            v = -signs[t] if (s & masks[t]).bit_count() & 1 else signs[t]
            sums[blocks[t]] += v
        total = sum(abs(x) for x in sums)
        if best is None or total > best:
            best, best_idx = total, s
    return best, best_idx
