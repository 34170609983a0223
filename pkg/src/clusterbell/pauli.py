"""Signed Pauli strings: exact algebra, application to states, stabilizers."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .qstate import QuantumState

STABILIZER_TOL = 1e-9


class PauliAxis(str, enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    def __str__(self) -> str:
        return self.value


_AXES = {"I": PauliAxis.I, "0": PauliAxis.I, "X": PauliAxis.X, "Y": PauliAxis.Y, "Z": PauliAxis.Z}

# (a, b) -> (power of i, product axis) for a single-qubit product a*b
_PRODUCT = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}
_PARSE_PREFIX = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_SYNTAX = re.compile(r"^([+-]?i?)([IXYZ0]+)$")

_SINGLE = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of single-qubit Paulis.

    ``phase`` is an exponent of ``i`` kept modulo 4, so signs never pass
    through floating point.
    """

    axes: tuple[PauliAxis, ...]
    phase: int = 0

    def __post_init__(self):
        axes = tuple(_AXES[str(a)] if not isinstance(a, PauliAxis) else a for a in self.axes)
        if not axes:
            raise ValueError("a Pauli string needs at least one qubit")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse e.g. ``"XYYX"``, ``"-IZYY"``, ``"0ZXX"`` or ``"-iXY"``."""
        m = _SYNTAX.match(text.strip())
        if m is None:
            raise ValueError(f"cannot parse Pauli string {text!r}")
        return cls(tuple(_AXES[c] for c in m.group(2)), _PARSE_PREFIX[m.group(1)])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls((PauliAxis.I,) * n)

    @classmethod
    def from_masks(cls, xmask: int, zmask: int, n: int, phase: int = 0) -> "PauliString":
        axes = []
        for q in range(1, n + 1):
            bit = n - q
            x, z = (xmask >> bit) & 1, (zmask >> bit) & 1
            axes.append({(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(x, z)])
        return cls(tuple(axes), phase)

    def __str__(self) -> str:
        return _PREFIX[self.phase] + "".join(a.value for a in self.axes)

    def __len__(self) -> int:
        return len(self.axes)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.axes, self.phase + 2)

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def coefficient(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError(f"{self} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    @property
    def weight(self) -> int:
        return sum(a is not PauliAxis.I for a in self.axes)

    def unsigned(self) -> "PauliString":
        return PauliString(self.axes, 0)

    def masks(self) -> tuple[int, int, complex]:
        """``(xmask, zmask, coef)`` with ``self == coef * X^xmask Z^zmask``."""
        n = self.n
        x = z = 0
        ny = 0
        for q, a in enumerate(self.axes, start=1):
            bit = 1 << (n - q)
            if a is PauliAxis.X:
                x |= bit
            elif a is PauliAxis.Z:
                z |= bit
            elif a is PauliAxis.Y:
                x |= bit
                z |= bit
                ny += 1
        return x, z, (1, 1j, -1, -1j)[(self.phase + ny) % 4]

    def to_matrix(self) -> np.ndarray:
        m = np.ones((1, 1), dtype=np.complex128)
        for a in self.axes:
            m = np.kron(m, _SINGLE[a.value])
        return self.coefficient * m

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("length mismatch")
        anti = sum(
            a is not PauliAxis.I and b is not PauliAxis.I and a is not b
            for a, b in zip(self.axes, other.axes)
        )
        return anti % 2 == 0


def as_pauli(p: "PauliString | str") -> PauliString:
    return p if isinstance(p, PauliString) else PauliString.parse(p)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    if p.n != q.n:
        raise ValueError(f"cannot multiply strings of length {p.n} and {q.n}")
    phase = p.phase + q.phase
    axes = []
    for a, b in zip(p.axes, q.axes):
        k, c = _PRODUCT[(a.value, b.value)]
        phase += k
        axes.append(c)
    return PauliString(tuple(axes), phase)


def apply(p: PauliString, s: QuantumState) -> QuantumState:
    """Apply ``p`` to a pure state by index permutation and sign flips."""
    if p.n != s.n:
        raise ValueError(f"{p.n}-qubit string applied to {s.n}-qubit state")
    x, z, coef = p.masks()
    if s.is_pure:
        return QuantumState("pure", kernels.apply_pauli(s.data, x, z, coef), s.n)
    # P rho P^dagger, column by column
    left = np.stack([kernels.apply_pauli(col, x, z, coef) for col in s.data.T], axis=1)
    right = np.stack([kernels.apply_pauli(row.conj(), x, z, coef) for row in left], axis=0).conj()
    return QuantumState("mixed", right, s.n)


def expectation(s: QuantumState, p: PauliString) -> float:
    if not p.is_hermitian:
        raise ValueError(f"expectation needs a Hermitian string, got phase {_PREFIX[p.phase]!r}")
    if p.n != s.n:
        raise ValueError(f"{p.n}-qubit string measured on {s.n}-qubit state")
    x, z, coef = p.masks()
    if s.is_pure:
        return kernels.expectation_pure(s.data, x, z, coef).real
    return kernels.expectation_mixed(s.data, x, z, coef).real


def enumerate_stabilizers(
    s: QuantumState, tol: float = STABILIZER_TOL
) -> list[tuple[PauliString, int]]:
    """All non-identity strings ``P`` with ``P|s> = +-|s>``, sorted by axes."""
    if not s.is_pure:
        raise ValueError("stabilizers are only enumerated for pure states")
    found = kernels.stabilizer_scan(s.data, s.n, tol)
    out = [(PauliString.from_masks(x, z, s.n), 1 if v > 0 else -1) for x, z, v in found]
    order = "IXYZ"
    out.sort(key=lambda t: [order.index(a.value) for a in t[0].axes])
    return out


def conjugate_by_hadamard(p: PauliString, qubits: Iterable[int]) -> PauliString:
    """``H P H`` on the listed (1-based) qubits: X<->Z, Y -> -Y."""
    qs = set(int(q) for q in qubits)
    for q in qs:
        if not 1 <= q <= p.n:
            raise IndexError(f"qubit {q} out of range 1..{p.n}")
    swap = {"I": "I", "X": "Z", "Z": "X", "Y": "Y"}
    axes = list(p.axes)
    phase = p.phase
    for q in qs:
        a = axes[q - 1].value
        axes[q - 1] = swap[a]
        if a == "Y":
            phase += 2
    return PauliString(tuple(axes), phase)


def group_closure(strings: Sequence[PauliString]) -> set[PauliString]:
    """Close a set of strings under multiplication (small groups only)."""
    group = set(strings)
    frontier = list(group)
    while frontier:
        new = []
        for a in frontier:
            for b in list(group):
                for c in (multiply(a, b), multiply(b, a)):
                    if c not in group:
                        group.add(c)
                        new.append(c)
        frontier = new
    return group
