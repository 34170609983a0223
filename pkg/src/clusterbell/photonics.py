"""Polarization-mode model of the double-pass down-conversion source.

States are polynomials in photon creation operators acting on the vacuum.
A term is a sorted tuple of ``(mode, pol)`` creation operators; repeated
entries mean multiple photons in that mode. The Fock-space norm of a
monomial with occupations ``n_k`` is ``prod(n_k!)``, which is what
:meth:`PhotonTermSet.norm_squared` uses.

Pipeline::

    terms = emit_pairs(config)           # modes a, b, c, d
    terms = hwp_fix(terms, angle)        # rotation in mode a
    terms = pbs(terms)                   # modes 1, 2, 3, 4
    state, prob = postselect_fourfold(terms)
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, fields
from typing import Mapping

import numpy as np

from .qstate import QuantumState

SOURCE_MODES = ("a", "b", "c", "d")
OUTPUT_MODES = ("1", "2", "3", "4")
POLS = ("H", "V")

# PBS1 overlaps a and d, PBS2 overlaps b and c. H is transmitted, V reflected.
PBS_ROUTING = {
    ("a", "H"): ("1", "H"),
    ("a", "V"): ("4", "V"),
    ("d", "H"): ("4", "H"),
    ("d", "V"): ("1", "V"),
    ("b", "H"): ("2", "H"),
    ("b", "V"): ("3", "V"),
    ("c", "H"): ("3", "H"),
    ("c", "V"): ("2", "V"),
}

AMP_TOL = 1e-15


class NoCoincidenceError(RuntimeError):
    """No term survives four-fold post-selection."""


class PhotonTermSet:
    def __init__(self, terms: Mapping[tuple, complex], namespace: str):
        if namespace not in ("source", "output"):
            raise ValueError(f"unknown namespace {namespace!r}")
        allowed = SOURCE_MODES if namespace == "source" else OUTPUT_MODES
        clean = {}
        for key, amp in terms.items():
            key = tuple(sorted(key))
            for mode, pol in key:
                if mode not in allowed or pol not in POLS:
                    raise ValueError(f"mode {(mode, pol)} not valid in {namespace} namespace")
            if abs(amp) > AMP_TOL:
                clean[key] = clean.get(key, 0) + complex(amp)
        self.terms = {k: v for k, v in clean.items() if abs(v) > AMP_TOL}
        self.namespace = namespace

    def __repr__(self) -> str:
        return f"PhotonTermSet({len(self.terms)} terms, {self.namespace})"

    def __add__(self, other: "PhotonTermSet") -> "PhotonTermSet":
        if other.namespace != self.namespace:
            raise ValueError("cannot add term sets from different namespaces")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PhotonTermSet(out, self.namespace)

    def scale(self, c: complex) -> "PhotonTermSet":
        return PhotonTermSet({k: c * v for k, v in self.terms.items()}, self.namespace)

    def photon_numbers(self) -> set[int]:
        return {len(k) for k in self.terms}

    @staticmethod
    def _fock_weight(key: tuple) -> int:
        return math.prod(math.factorial(c) for c in Counter(key).values())

    def inner(self, other: "PhotonTermSet") -> complex:
        """Fock-space inner product ``<self|other>``."""
        return sum(
            np.conj(v) * other.terms[k] * self._fock_weight(k)
            for k, v in self.terms.items()
            if k in other.terms
        )

    def norm_squared(self) -> float:
        return float(self.inner(self).real)


def _product(x: PhotonTermSet, y: PhotonTermSet) -> PhotonTermSet:
    out: dict = {}
    for k1, v1 in x.terms.items():
        for k2, v2 in y.terms.items():
            key = tuple(sorted(k1 + k2))
            out[key] = out.get(key, 0) + v1 * v2
    return PhotonTermSet(out, x.namespace)


@dataclass(frozen=True)
class SourceConfig:
    """Emission amplitudes, phases and the mode-a rotation.

    ``hwp_a_angle`` is the polarization rotation produced by turning the
    mode-a half-wave plate away from its alignment position, in degrees
    (the plate itself turns by half this). Amplitudes of the three four-photon
    processes are ``forward * backward`` (one pair per pass),
    ``forward**2 * double_forward`` and ``backward**2 * double_backward``.
    Phases are radians. ``indistinguishability`` scales the coherences
    between processes.
    """

    hwp_a_angle: float = 60.0
    forward: float = 1.0
    backward: float = 1.0
    double_forward: float = 1.0
    double_backward: float = 0.5
    phase_cross: float = 0.0
    phase_double_forward: float = 0.0
    phase_double_backward: float = 0.0
    indistinguishability: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.hwp_a_angle < 90.0:
            raise ValueError(f"hwp_a_angle must be in [0, 90), got {self.hwp_a_angle}")
        for name in ("forward", "backward", "double_forward", "double_backward"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0.0 <= self.indistinguishability <= 1.0:
            raise ValueError("indistinguishability must be in [0, 1]")

    @classmethod
    def balanced(cls, hwp_a_angle: float = 60.0, **kw) -> "SourceConfig":
        """Double-pair weights that equalize the four post-selected amplitudes.

        After a rotation by ``t`` the one-pair-per-pass terms scale by
        ``cos t`` and the double-forward term by ``-cos 2t``; only
        ``45 < t < 90`` gives the sign pattern of the cluster state.
        """
        t = math.radians(hwp_a_angle)
        if not math.pi / 4 < t < math.pi / 2:
            raise ValueError("balancing needs a rotation strictly between 45 and 90 degrees")
        return cls(
            hwp_a_angle=hwp_a_angle,
            forward=1.0,
            backward=1.0,
            double_forward=math.cos(t) / -math.cos(2 * t),
            double_backward=math.cos(t),
            **kw,
        )

    def replace(self, **kw) -> "SourceConfig":
        return SourceConfig(**{**asdict(self), **kw})

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: Mapping) -> "SourceConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown source config fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in obj.items()})

    @classmethod
    def load(cls, path) -> "SourceConfig":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json(obj)


def _pair(m1: str, m2: str, relative: int) -> PhotonTermSet:
    """``(m1_H m2_H + relative * m1_V m2_V) / sqrt(2)``."""
    r = 1 / math.sqrt(2)
    return PhotonTermSet(
        {((m1, "H"), (m2, "H")): r, ((m1, "V"), (m2, "V")): relative * r}, "source"
    )


def emission_processes(config: SourceConfig) -> dict[str, PhotonTermSet]:
    """The three four-photon emission processes, each with its amplitude."""
    fwd = _pair("a", "b", -1)  # phi-minus on the first pass
    bwd = _pair("c", "d", +1)  # phi-plus on the second pass
    c = config
    return {
        "cross": _product(fwd, bwd).scale(c.forward * c.backward * np.exp(1j * c.phase_cross)),
        "double_forward": _product(fwd, fwd).scale(
            0.5 * c.forward**2 * c.double_forward * np.exp(1j * c.phase_double_forward)
        ),
        "double_backward": _product(bwd, bwd).scale(
            0.5 * c.backward**2 * c.double_backward * np.exp(1j * c.phase_double_backward)
        ),
    }


def emit_pairs(config: SourceConfig) -> PhotonTermSet:
    procs = list(emission_processes(config).values())
    out = procs[0]
    for p in procs[1:]:
        out = out + p
    return out


def hwp_matrix(angle_deg: float) -> np.ndarray:
    t = 2 * math.radians(angle_deg)
    return np.array([[math.cos(t), math.sin(t)], [math.sin(t), -math.cos(t)]], dtype=np.complex128)


def qwp_matrix(angle_deg: float) -> np.ndarray:
    t = math.radians(angle_deg)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=np.complex128)
    return rot @ np.diag([1, 1j]) @ rot.T


def apply_jones(terms: PhotonTermSet, mode: str, jones: np.ndarray) -> PhotonTermSet:
    """Transform the H/V creation operators of one spatial mode.

    ``H -> J[0,0] H + J[1,0] V`` and ``V -> J[0,1] H + J[1,1] V``; monomials
    are re-expanded multilinearly.
    """
    allowed = SOURCE_MODES if terms.namespace == "source" else OUTPUT_MODES
    if mode not in allowed:
        raise ValueError(f"unknown mode {mode!r} for {terms.namespace} namespace")
    image = {
        "H": (((mode, "H"), jones[0, 0]), ((mode, "V"), jones[1, 0])),
        "V": (((mode, "H"), jones[0, 1]), ((mode, "V"), jones[1, 1])),
    }
    out: dict = {}
    for key, amp in terms.terms.items():
        partial = {(): amp}
        for op in key:
            nxt: dict = {}
            choices = image[op[1]] if op[0] == mode else ((op, 1.0),)
            for k, v in partial.items():
                for new_op, c in choices:
                    if c == 0:
                        continue
                    nk = k + (new_op,)
                    nxt[nk] = nxt.get(nk, 0) + v * c
            partial = nxt
        for k, v in partial.items():
            sk = tuple(sorted(k))
            out[sk] = out.get(sk, 0) + v
    return PhotonTermSet(out, terms.namespace)


def hwp(terms: PhotonTermSet, mode: str, angle_deg: float) -> PhotonTermSet:
    return apply_jones(terms, mode, hwp_matrix(angle_deg))


def qwp(terms: PhotonTermSet, mode: str, angle_deg: float) -> PhotonTermSet:
    return apply_jones(terms, mode, qwp_matrix(angle_deg))


def hwp_fix(terms: PhotonTermSet, rotation_deg: float) -> PhotonTermSet:
    """Turn the mode-a plate by ``rotation_deg / 2`` from its aligned (0 deg) seat.

    Two half-wave plates compose to a rotation, so relative to the aligned
    source the net effect is a polarization rotation by ``rotation_deg``.
    """
    jones = hwp_matrix(rotation_deg / 2) @ hwp_matrix(0.0)
    return apply_jones(terms, "a", jones)


def pbs(terms: PhotonTermSet) -> PhotonTermSet:
    if terms.namespace != "source":
        raise ValueError("pbs expects a term set in the a/b/c/d namespace")
    out: dict = {}
    for key, amp in terms.terms.items():
        nk = tuple(sorted(PBS_ROUTING[op] for op in key))
        out[nk] = out.get(nk, 0) + amp
    return PhotonTermSet(out, "output")


def fourfold_vector(terms: PhotonTermSet) -> np.ndarray:
    """Unnormalized amplitudes of the one-photon-per-output-mode sector."""
    if terms.namespace != "output":
        raise ValueError("post-selection expects a term set in the 1/2/3/4 namespace")
    vec = np.zeros(16, dtype=np.complex128)
    for key, amp in terms.terms.items():
        if len(key) != 4 or tuple(m for m, _ in key) != OUTPUT_MODES:
            continue
        idx = int("".join("0" if p == "H" else "1" for _, p in key), 2)
        vec[idx] += amp
    return vec


def postselect_fourfold(terms: PhotonTermSet) -> tuple[QuantumState, float]:
    vec = fourfold_vector(terms)
    kept = float(np.vdot(vec, vec).real)
    if kept < AMP_TOL:
        raise NoCoincidenceError("no four-fold events survive post-selection")
    total = terms.norm_squared()
    return QuantumState.from_amplitudes(vec / math.sqrt(kept)), kept / total


@dataclass
class SourceResult:
    state: QuantumState
    probability: float
    config: SourceConfig
    fixed: bool


def simulate_source(config: SourceConfig | None = None, fix: bool = True) -> SourceResult:
    """Run emission, optional mode-a rotation, PBS and post-selection.

    With ``indistinguishability < 1`` the result is the mixture of the fully
    coherent post-selected state and the incoherent sum of the separate
    processes.
    """
    config = config or SourceConfig()
    procs = emission_processes(config)
    out_sets = {}
    for name, p in procs.items():
        if fix:
            p = hwp_fix(p, config.hwp_a_angle)
        out_sets[name] = pbs(p)
    total = out_sets["cross"] + out_sets["double_forward"] + out_sets["double_backward"]
    state, prob = postselect_fourfold(total)
    eta = config.indistinguishability
    if eta < 1.0:
        parts = [fourfold_vector(t) for t in out_sets.values()]
        coherent = np.outer(sum(parts), np.conj(sum(parts)))
        incoherent = sum(np.outer(v, v.conj()) for v in parts)
        rho = eta * coherent + (1 - eta) * incoherent
        state = QuantumState.from_density(rho / np.trace(rho).real)
    return SourceResult(state, prob, config, fix)
