"""Dense state-vector and density-matrix engine for up to six qubits.

Conventions used throughout the package:

* qubits are numbered from 1, and qubit 1 is the most significant bit of the
  basis index, so ``|HHVV>`` is index ``0b0011``;
* ``H`` polarization is ``|0>`` and ``V`` is ``|1>``;
* ``Y|0> = i|1>`` and ``Y|1> = -i|0>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 6
NORM_TOL = 1e-10
PSD_FLOOR = -1e-10

_SQRT2 = np.sqrt(2.0)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2

# +1 eigenvector first, then -1 eigenvector, for each Pauli basis
_EIGENBASES = {
    "X": np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2,
    "Y": np.array([[1, 1], [1j, -1j]], dtype=np.complex128) / _SQRT2,
    "Z": np.eye(2, dtype=np.complex128),
}


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A pure (vector) or mixed (density matrix) state on ``n`` qubits."""

    kind: str
    data: np.ndarray
    n: int

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValueError(f"kind must be 'pure' or 'mixed', got {self.kind!r}")
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {self.n}")
        data = np.array(self.data, dtype=np.complex128)
        dim = 1 << self.n
        if self.kind == "pure":
            if data.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got shape {data.shape}")
            norm = np.vdot(data, data).real
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        else:
            if data.shape != (dim, dim):
                raise ValueError(f"expected {dim}x{dim} density matrix, got {data.shape}")
            if not np.allclose(data, data.conj().T, atol=NORM_TOL):
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(data).real
            if abs(tr - 1.0) > NORM_TOL:
                raise ValueError(f"density matrix trace is {tr!r}, expected 1")
            if np.linalg.eigvalsh(data).min() < PSD_FLOOR:
                raise ValueError("density matrix has negative eigenvalues")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_amplitudes(cls, amps, normalize=False) -> "QuantumState":
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(round(np.log2(amps.shape[0])))
        if 1 << n != amps.shape[0]:
            raise ValueError(f"amplitude count {amps.shape[0]} is not a power of two")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        return cls("pure", amps, n)

    @classmethod
    def from_density(cls, rho) -> "QuantumState":
        rho = np.asarray(rho, dtype=np.complex128)
        n = int(round(np.log2(rho.shape[0])))
        return cls("mixed", rho, n)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("mixed state has no state vector")
        return self.data

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def amplitude(self, label: str) -> complex:
        """Amplitude of a basis state given as e.g. ``"HHVV"`` or ``"0011"``."""
        return complex(self.vector[basis_index(label, self.n)])

    def to_json(self) -> dict:
        if self.is_pure:
            amps = [[float(a.real), float(a.imag)] for a in self.data]
        else:
            amps = [[[float(a.real), float(a.imag)] for a in row] for row in self.data]
        return {"kind": self.kind, "n": self.n, "amplitudes": amps}

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumState":
        kind = obj["kind"]
        arr = np.asarray(obj["amplitudes"], dtype=float)
        data = arr[..., 0] + 1j * arr[..., 1]
        return cls(kind, data, int(obj["n"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _check_n(n: int, lo: int = 1) -> None:
    if not lo <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in {lo}..{MAX_QUBITS}, got {n}")


def _check_qubits(qubits: Iterable[int], n: int) -> list[int]:
    qs = sorted(set(int(q) for q in qubits))
    for q in qs:
        if not 1 <= q <= n:
            raise IndexError(f"qubit {q} out of range 1..{n}")
    return qs


def _bit(q: int, n: int) -> int:
    return n - q


def basis_index(label: str, n: int | None = None) -> int:
    table = {"H": "0", "V": "1", "0": "0", "1": "1"}
    try:
        bits = "".join(table[c] for c in label)
    except KeyError:
        raise ValueError(f"bad basis label {label!r}") from None
    if n is not None and len(bits) != n:
        raise ValueError(f"label {label!r} has length {len(bits)}, expected {n}")
    return int(bits, 2)


def basis_state(label: str) -> QuantumState:
    n = len(label)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[basis_index(label)] = 1.0
    return QuantumState("pure", amps, n)


def plus_state(n: int) -> QuantumState:
    _check_n(n)
    dim = 1 << n
    return QuantumState("pure", np.full(dim, dim ** -0.5, dtype=np.complex128), n)


def cphase(s: QuantumState, j: int, k: int) -> QuantumState:
    """Controlled-phase between qubits ``j`` and ``k``: ``|11> -> -|11>``."""
    if j == k:
        raise ValueError("cphase needs two distinct qubits")
    _check_qubits((j, k), s.n)
    mask = (1 << _bit(j, s.n)) | (1 << _bit(k, s.n))
    idx = np.arange(s.dim)
    sign = np.where((idx & mask) == mask, -1.0, 1.0)
    if s.is_pure:
        return QuantumState("pure", s.data * sign, s.n)
    return QuantumState("mixed", sign[:, None] * s.data * sign[None, :], s.n)


def linear_cluster(n: int) -> QuantumState:
    _check_n(n, lo=2)
    s = plus_state(n)
    for q in range(1, n):
        s = cphase(s, q, q + 1)
    return s


def target_cluster() -> QuantumState:
    """``(|HHHH> + |HHVV> + |VVHH> - |VVVV>) / 2``."""
    amps = np.zeros(16, dtype=np.complex128)
    amps[0b0000] = 0.5
    amps[0b0011] = 0.5
    amps[0b1100] = 0.5
    amps[0b1111] = -0.5
    return QuantumState("pure", amps, 4)


def ghz(n: int) -> QuantumState:
    _check_n(n, lo=2)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / _SQRT2
    return QuantumState("pure", amps, n)


def w3() -> QuantumState:
    amps = np.zeros(8, dtype=np.complex128)
    amps[[0b100, 0b010, 0b001]] = 1 / np.sqrt(3.0)
    return QuantumState("pure", amps, 3)


def apply_single_qubit(s: QuantumState, qubit: int, u: np.ndarray) -> QuantumState:
    """Apply a 2x2 matrix ``u`` to one qubit (no unitarity check)."""
    _check_qubits((qubit,), s.n)
    axis = qubit - 1
    if s.is_pure:
        t = s.data.reshape((2,) * s.n)
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
        return QuantumState("pure", t.reshape(s.dim), s.n)
    t = s.data.reshape((2,) * (2 * s.n))
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
    t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [s.n + axis])), 0, s.n + axis)
    return QuantumState("mixed", t.reshape(s.dim, s.dim), s.n)


def hadamard_on(s: QuantumState, qubits: Iterable[int]) -> QuantumState:
    for q in _check_qubits(qubits, s.n):
        s = apply_single_qubit(s, q, _HADAMARD)
    return s


def overlap(a: QuantumState, b: QuantumState) -> float:
    """``|<a|b>|`` for pure states (global phase ignored)."""
    if a.n != b.n:
        raise ValueError("overlap of states with different qubit counts")
    return float(abs(np.vdot(a.vector, b.vector)))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """``<a|rho_b|a>`` where ``a`` is pure; reduces to ``|<a|b>|^2`` for pure ``b``."""
    if a.n != b.n:
        raise ValueError("fidelity of states with different qubit counts")
    v = a.vector
    return float(np.vdot(v, b.density_matrix() @ v).real)


def partial_trace(s: QuantumState, keep: Iterable[int]) -> QuantumState:
    keep = _check_qubits(keep, s.n)
    if not keep:
        raise ValueError("keep set must be non-empty")
    traced = [q for q in range(1, s.n + 1) if q not in keep]
    m = len(keep)
    if s.is_pure:
        t = s.data.reshape((2,) * s.n)
        t = np.transpose(t, [q - 1 for q in keep] + [q - 1 for q in traced])
        t = t.reshape(1 << m, -1)
        rho = t @ t.conj().T
    else:
        t = s.data.reshape((2,) * (2 * s.n))
        order = [q - 1 for q in keep] + [q - 1 for q in traced]
        t = np.transpose(t, order + [s.n + i for i in order])
        d_keep, d_tr = 1 << m, 1 << (s.n - m)
        t = t.reshape(d_keep, d_tr, d_keep, d_tr)
        rho = np.einsum("ajbj->ab", t)
    return QuantumState("mixed", rho, m)


def von_neumann_entropy(s: QuantumState) -> float:
    """Entropy in bits."""
    if s.is_pure:
        return 0.0
    ev = np.linalg.eigvalsh(s.data)
    ev = ev[ev > 1e-15]
    return float(-np.sum(ev * np.log2(ev)))


def entanglement_entropy(s: QuantumState, part: Iterable[int]) -> float:
    """Entropy (bits) of the reduced state on ``part`` for a pure state."""
    if not s.is_pure:
        raise ValueError("entanglement entropy is defined here for pure states only")
    return von_neumann_entropy(partial_trace(s, part))


def project_qubit(
    s: QuantumState, qubit: int, basis: str, outcome: int
) -> tuple[QuantumState | None, float]:
    """Project ``qubit`` onto the ``outcome`` eigenvector of a Pauli basis.

    Returns the renormalized state (the measured qubit stays in the register,
    now in the eigenstate) and the outcome probability. A zero-probability
    outcome returns ``(None, 0.0)``.
    """
    if not s.is_pure:
        raise ValueError("project_qubit requires a pure state")
    basis = str(getattr(basis, "value", basis))
    if basis not in _EIGENBASES:
        raise ValueError(f"basis must be one of X, Y, Z; got {basis!r}")
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    vec = _EIGENBASES[basis][:, 0 if outcome == 1 else 1]
    projector = np.outer(vec, vec.conj())
    _check_qubits((qubit,), s.n)
    axis = qubit - 1
    t = s.data.reshape((2,) * s.n)
    t = np.moveaxis(np.tensordot(projector, t, axes=([1], [axis])), 0, axis).reshape(s.dim)
    prob = float(np.vdot(t, t).real)
    if prob < 1e-14:
        return None, 0.0
    return QuantumState("pure", t / np.sqrt(prob), s.n), prob


def apply_white_noise(s: QuantumState, visibility: float) -> QuantumState:
    """``V |s><s| + (1 - V) I / 2^n``; mixed inputs are mixed the same way."""
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must be in [0, 1], got {visibility}")
    rho = visibility * s.density_matrix() + (1 - visibility) * np.eye(s.dim) / s.dim
    return QuantumState("mixed", rho, s.n)


def random_state(n: int, rng: np.random.Generator) -> QuantumState:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState.from_amplitudes(v, normalize=True)


def random_product_state(n: int, rng: np.random.Generator) -> QuantumState:
    vec = np.ones(1, dtype=np.complex128)
    for _ in range(n):
        q = rng.normal(size=2) + 1j * rng.normal(size=2)
        vec = np.kron(vec, q / np.linalg.norm(q))
    return QuantumState.from_amplitudes(vec, normalize=True)


def tensor(states: Sequence[QuantumState]) -> QuantumState:
    vec = np.ones(1, dtype=np.complex128)
    for st in states:
        vec = np.kron(vec, st.vector)
    return QuantumState.from_amplitudes(vec)
