"""The cluster-state Bell parameter and exhaustive local-realist checks.

A correlation inequality is a list of :class:`CorrelationTerm`. Its value is
``sum over blocks |sum of sign * <term>|``. For

    S_C = |<XYYX> + <XYXY>| + |<IZXX> - <IZYY>|

the local-realist maximum is 2 and the cluster state reaches 4.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .pauli import PauliAxis, PauliString, as_pauli, expectation
from .qstate import QuantumState

MAX_MENU = 2
MAX_STRATEGY_BITS = 16
LHV_BOUND = 2


@dataclass(frozen=True)
class CorrelationTerm:
    pauli: PauliString
    block: int
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pauli", as_pauli(self.pauli))
        if self.sign not in (1, -1):
            raise ValueError(f"term sign must be +1 or -1, got {self.sign}")
        if not self.pauli.is_hermitian:
            raise ValueError(f"term {self.pauli} is not Hermitian")

    def to_json(self) -> dict:
        return {"pauli": str(self.pauli), "block": self.block, "sign": self.sign}


SC_TERMS: tuple[CorrelationTerm, ...] = (
    CorrelationTerm(PauliString.parse("XYYX"), 1, +1),
    CorrelationTerm(PauliString.parse("XYXY"), 1, +1),
    CorrelationTerm(PauliString.parse("IZXX"), 2, +1),
    CorrelationTerm(PauliString.parse("IZYY"), 2, -1),
)

# stabilizers used in the GHZ-type contradiction, before and after the
# Hadamards on qubits 1 and 4
PRIMED_QUADRUPLE = (("ZYYZ", 1), ("ZYXY", -1), ("IZXZ", 1), ("IZYY", 1))
TARGET_QUADRUPLE = (("XYYX", 1), ("XYXY", 1), ("IZXX", 1), ("IZYY", -1))


def _check_unit(name: str, v: float, tol: float = 1e-9) -> None:
    if not -1 - tol <= v <= 1 + tol:
        raise ValueError(f"{name} = {v} lies outside [-1, 1]")


def bell_parameter(e_xyyx: float, e_xyxy: float, e_izxx: float, e_izyy: float) -> float:
    for name, v in (("XYYX", e_xyyx), ("XYXY", e_xyxy), ("IZXX", e_izxx), ("IZYY", e_izyy)):
        _check_unit(name, v)
    return abs(e_xyyx + e_xyxy) + abs(e_izxx - e_izyy)


def bell_parameter_error(
    values: Sequence[float], errors: Sequence[float]
) -> tuple[float, float, bool]:
    """S_C, its first-order uncertainty and a flag for near-zero blocks.

    The four correlations are treated as independent, so the uncertainty is
    the quadrature sum of the four errors. Each absolute value is treated as
    smooth; when a block sum is within two of its standard errors of zero
    that assumption fails and the flag is set.
    """
    values = [float(v) for v in values]
    errors = [float(e) for e in errors]
    s = bell_parameter(*values)
    err = math.sqrt(sum(e * e for e in errors))
    b1, b2 = values[0] + values[1], values[2] - values[3]
    e1 = math.hypot(errors[0], errors[1])
    e2 = math.hypot(errors[2], errors[3])
    degenerate = abs(b1) < 2 * e1 or abs(b2) < 2 * e2
    return s, err, degenerate


def evaluate_inequality(terms: Sequence[CorrelationTerm], values: Sequence[float]) -> float:
    blocks: dict[int, float] = {}
    for t, v in zip(terms, values, strict=True):
        blocks[t.block] = blocks.get(t.block, 0.0) + t.sign * v
    return sum(abs(b) for b in blocks.values())


def inequality_value(s: QuantumState, terms: Sequence[CorrelationTerm] = SC_TERMS) -> float:
    return evaluate_inequality(terms, [expectation(s, t.pauli) for t in terms])


def bell_parameter_of_state(s: QuantumState) -> float:
    if s.n != 4:
        raise ValueError(f"S_C is a four-qubit quantity, got {s.n} qubits")
    return bell_parameter(*(expectation(s, t.pauli) for t in SC_TERMS))


@dataclass(frozen=True)
class LhvStrategy:
    """Deterministic +-1 values for every (party, axis) pair in use.

    Identity observables are not listed; they always read +1.
    """

    assignment: dict

    def value(self, party: int, axis: PauliAxis | str) -> int:
        axis = PauliAxis(str(axis))
        if axis is PauliAxis.I:
            return 1
        return self.assignment[(party, axis)]

    def predict(self, p: PauliString) -> int:
        out = p.sign
        for party, axis in enumerate(p.axes, start=1):
            out *= self.value(party, axis)
        return out

    def to_json(self) -> dict:
        return {f"{party}{axis.value}": v for (party, axis), v in sorted(self.assignment.items())}


class _StrategySpace:
    """Bit layout for strategies: one bit per (party, non-identity axis).

    Pairs are ordered by party, then axis in X, Y, Z order. Bit ``k`` of a
    strategy index set means pair ``k`` reads -1.
    """

    def __init__(self, strings: Iterable[PauliString]):
        strings = list(strings)
        if not strings:
            raise ValueError("inequality has no terms")
        n = strings[0].n
        if any(p.n != n for p in strings):
            raise ValueError("all terms must act on the same number of parties")
        menus: dict[int, set] = {q: set() for q in range(1, n + 1)}
        for p in strings:
            for q, a in enumerate(p.axes, start=1):
                if a is not PauliAxis.I:
                    menus[q].add(a)
        for q, menu in menus.items():
            if len(menu) > MAX_MENU:
                raise ValueError(
                    f"party {q} uses {len(menu)} observables; at most {MAX_MENU} allowed"
                )
        order = "XYZ"
        self.pairs = [
            (q, a) for q in sorted(menus) for a in sorted(menus[q], key=lambda a: order.index(a.value))
        ]
        if len(self.pairs) > MAX_STRATEGY_BITS:
            raise ValueError(f"{len(self.pairs)} strategy bits exceed {MAX_STRATEGY_BITS}")
        self.index = {pair: k for k, pair in enumerate(self.pairs)}
        self.n = n

    @property
    def nbits(self) -> int:
        return len(self.pairs)

    def bits_of(self, p: PauliString) -> list[int]:
        return [self.index[(q, a)] for q, a in enumerate(p.axes, start=1) if a is not PauliAxis.I]

    def bit_table(self, strings: Sequence[PauliString]) -> np.ndarray:
        table = -np.ones((len(strings), self.n), dtype=np.int64)
        for t, p in enumerate(strings):
            bits = self.bits_of(p)
            table[t, : len(bits)] = bits
        return table

    def strategy(self, index: int) -> LhvStrategy:
        return LhvStrategy(
            {pair: (-1 if (index >> k) & 1 else 1) for k, pair in enumerate(self.pairs)}
        )


def lhv_maximum(terms: Sequence[CorrelationTerm] = SC_TERMS) -> tuple[int, LhvStrategy]:
    """Exact local-realist maximum by enumerating deterministic strategies.

    Mixed strategies are convex combinations of these and cannot do better.
    Ties go to the lowest strategy index.
    """
    strings = [t.pauli for t in terms]
    space = _StrategySpace(strings)
    block_ids = sorted({t.block for t in terms})
    block_of = {b: k for k, b in enumerate(block_ids)}
    best, idx = kernels.lhv_scan(
        space.bit_table(strings),
        np.array([t.sign * t.pauli.sign for t in terms], dtype=np.int64),
        np.array([block_of[t.block] for t in terms], dtype=np.int64),
        len(block_ids),
        space.nbits,
    )
    return int(best), space.strategy(idx)


def strategy_values(terms: Sequence[CorrelationTerm] = SC_TERMS) -> list[int]:
    """Inequality value of every deterministic strategy, by strategy index."""
    strings = [t.pauli for t in terms]
    space = _StrategySpace(strings)
    out = []
    for k in range(1 << space.nbits):
        strat = space.strategy(k)
        blocks: dict[int, int] = {}
        for t in terms:
            blocks[t.block] = blocks.get(t.block, 0) + t.sign * strat.predict(t.pauli)
        out.append(sum(abs(v) for v in blocks.values()))
    return out


@dataclass
class GhzArgumentResult:
    satisfiable: bool
    witnesses: list[LhvStrategy]
    strategies_checked: int


def ghz_argument_check(
    constraints: Sequence[tuple[PauliString | str, int]],
) -> GhzArgumentResult:
    """Can one deterministic strategy reproduce every required sign?"""
    cons = [(as_pauli(p), int(sgn)) for p, sgn in constraints]
    for _, sgn in cons:
        if sgn not in (1, -1):
            raise ValueError("required signs must be +1 or -1")
    space = _StrategySpace(p for p, _ in cons)
    witnesses = []
    for k in range(1 << space.nbits):
        strat = space.strategy(k)
        if all(strat.predict(p) == sgn for p, sgn in cons):
            witnesses.append(strat)
    return GhzArgumentResult(bool(witnesses), witnesses, 1 << space.nbits)


def constraints_as_inequality(
    constraints: Sequence[tuple[PauliString | str, int]],
) -> list[CorrelationTerm]:
    """Single-block inequality ``|sum sign_i <P_i>|`` built from constraints."""
    return [CorrelationTerm(as_pauli(p), 1, int(s)) for p, s in constraints]


def load_inequality(path) -> list[CorrelationTerm]:
    with open(path) as fh:
        raw = json.load(fh)
    return parse_inequality(raw)


def parse_inequality(raw) -> list[CorrelationTerm]:
    if isinstance(raw, dict):
        raw = raw.get("terms")
    if not isinstance(raw, list) or not raw:
        raise ValueError("inequality must be a non-empty list of terms")
    terms = []
    for i, item in enumerate(raw):
        try:
            terms.append(
                CorrelationTerm(PauliString.parse(item["pauli"]), int(item["block"]), int(item.get("sign", 1)))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"term {i}: {exc}") from exc
    return terms
