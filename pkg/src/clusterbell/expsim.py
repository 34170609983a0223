"""Monte Carlo of the polarization-correlation measurement campaign.

Each Pauli factor is measured with a quarter-wave plate and a linear
polarizer in front of the detector:

* Z: QWP parallel to an H or V polarizer;
* X: QWP parallel to a +45 or -45 degree polarizer;
* Y: QWP at +45 degrees, polarizer H (R, outcome +1) or V (L, outcome -1);
* I (mode 1 only): polarizer removed, the detector sees both polarizations.

Every outcome cell is a separate run whose four-fold count is Poisson with
mean ``mean_counts * duration / 600 * p * efficiency``. ``mean_counts`` is the
expected four-fold total of one Pauli setting over a 600 s run.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .nonlocality import LHV_BOUND, SC_TERMS, bell_parameter_error
from .pauli import PauliAxis, PauliString, as_pauli
from .photonics import SourceConfig, qwp_matrix, simulate_source
from .qstate import QuantumState, apply_white_noise, target_cluster

REFERENCE_DURATION = 600.0
REFERENCE_VISIBILITY = 0.6475
# from calibrate_mean_counts(target_cluster(), 0.6475, target_sc_err=0.08)
DEFAULT_MEAN_COUNTS = 363.0

# (qwp angle, polarizer angle) for outcomes +1 and -1, degrees
_ANALYZERS = {
    PauliAxis.Z: ((0.0, 0.0), (90.0, 90.0)),
    PauliAxis.X: ((45.0, 45.0), (-45.0, -45.0)),
    PauliAxis.Y: ((45.0, 0.0), (45.0, 90.0)),
}


def analyzer_vector(qwp_deg: float, polarizer_deg: float) -> np.ndarray:
    """Input polarization that a QWP + polarizer pair transmits fully."""
    t = math.radians(polarizer_deg)
    pol = np.array([math.cos(t), math.sin(t)], dtype=np.complex128)
    return qwp_matrix(qwp_deg).conj().T @ pol


@dataclass(frozen=True)
class ModeSetting:
    axis: PauliAxis
    analyzers: tuple  # ((qwp, polarizer) for +1, (qwp, polarizer) for -1), or () if removed

    @property
    def polarizer_removed(self) -> bool:
        return not self.analyzers

    def projector(self, outcome: int) -> np.ndarray:
        qwp, pol = self.analyzers[0 if outcome == 1 else 1]
        v = analyzer_vector(qwp, pol)
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class MeasurementSetting:
    pauli: PauliString
    modes: tuple[ModeSetting, ...]

    @property
    def measured_modes(self) -> list[int]:
        return [k for k, m in enumerate(self.modes, start=1) if not m.polarizer_removed]

    @property
    def outcomes(self) -> list[tuple[int, ...]]:
        """Cell order: +1 before -1 in each measured mode, mode 1 slowest."""
        return list(itertools.product((1, -1), repeat=len(self.measured_modes)))

    @property
    def label(self) -> str:
        return "".join(a.value for a in self.pauli.axes)


def setting_for(paulis: PauliString | str | Sequence) -> MeasurementSetting:
    if isinstance(paulis, (str, PauliString)):
        p = as_pauli(paulis)
    else:
        p = PauliString(tuple(paulis))
    if p.n != 4:
        raise ValueError(f"settings are four-mode, got {p.n}")
    modes = []
    for k, a in enumerate(p.axes, start=1):
        if a is PauliAxis.I:
            if k != 1:
                raise ValueError(f"polarizer removal (identity) only allowed in mode 1, not mode {k}")
            modes.append(ModeSetting(a, ()))
        else:
            modes.append(ModeSetting(a, _ANALYZERS[a]))
    return MeasurementSetting(PauliString(p.axes), tuple(modes))


def outcome_probabilities(s: QuantumState, setting: MeasurementSetting) -> np.ndarray:
    """Born-rule probabilities of each outcome cell, in ``setting.outcomes`` order."""
    if s.n != 4:
        raise ValueError(f"expected a four-qubit state, got {s.n} qubits")
    rho = s.density_matrix()
    measured = setting.measured_modes
    probs = []
    for outcome in setting.outcomes:
        op = np.ones((1, 1), dtype=np.complex128)
        res = dict(zip(measured, outcome))
        for k, mode in enumerate(setting.modes, start=1):
            op = np.kron(op, mode.projector(res[k]) if k in res else np.eye(2))
        probs.append(np.trace(rho @ op).real)
    return np.clip(np.array(probs), 0.0, None)


@dataclass(frozen=True)
class ExperimentConfig:
    visibility: float = REFERENCE_VISIBILITY
    mean_counts: float = DEFAULT_MEAN_COUNTS
    efficiencies: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    seed: int = 0
    duration: float = REFERENCE_DURATION

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility}")
        if self.mean_counts <= 0:
            raise ValueError("mean_counts must be positive")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        effs = tuple(float(e) for e in self.efficiencies)
        if len(effs) != 4 or any(not 0.0 < e <= 1.0 for e in effs):
            raise ValueError("efficiencies must be four numbers in (0, 1]")
        object.__setattr__(self, "efficiencies", effs)

    @property
    def counts_scale(self) -> float:
        return self.mean_counts * self.duration / REFERENCE_DURATION

    def to_json(self) -> dict:
        return {
            "visibility": self.visibility,
            "mean_counts": self.mean_counts,
            "efficiencies": list(self.efficiencies),
            "seed": self.seed,
            "duration": self.duration,
        }


def cell_means(probs: np.ndarray, setting: MeasurementSetting, config: ExperimentConfig) -> np.ndarray:
    # efficiency losses apply where a polarizer sits in the beam
    eff = math.prod(config.efficiencies[k - 1] for k in setting.measured_modes)
    return config.counts_scale * eff * np.asarray(probs)


@dataclass
class CoincidenceTable:
    setting: MeasurementSetting
    counts: np.ndarray
    duration: float = REFERENCE_DURATION

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (len(self.setting.outcomes),):
            raise ValueError(
                f"{self.setting.label} needs {len(self.setting.outcomes)} cells, got {self.counts.shape}"
            )
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @property
    def parities(self) -> np.ndarray:
        return np.array([math.prod(o) for o in self.setting.outcomes])

    def rows(self) -> list[dict]:
        return [
            {"outcome": "".join("+" if v > 0 else "-" for v in o), "count": int(c)}
            for o, c in zip(self.setting.outcomes, self.counts)
        ]


def sample_counts(
    probs: np.ndarray,
    setting: MeasurementSetting,
    config: ExperimentConfig,
    rng: np.random.Generator,
) -> CoincidenceTable:
    return CoincidenceTable(setting, rng.poisson(cell_means(probs, setting, config)), config.duration)


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    stderr: float
    total: int


def estimate_correlation(table: CoincidenceTable) -> CorrelationEstimate:
    """Parity-weighted count ratio with first-order Poisson error.

    ``E = sum(pi_k n_k) / N`` with ``N = sum(n_k)``. Treating each ``n_k`` as an
    independent Poisson variable with variance ``n_k``,
    ``dE/dn_k = (pi_k - E) / N`` so ``var(E) = sum(n_k (pi_k - E)^2) / N^2``,
    which for two parity classes is ``(1 - E^2) / N``.
    """
    n = table.counts.astype(float)
    total = n.sum()
    if total <= 0:
        raise ValueError(f"no counts recorded for setting {table.setting.label}")
    par = table.parities
    value = float(np.dot(par, n) / total)
    var = float(np.dot(n, (par - value) ** 2) / total**2)
    return CorrelationEstimate(value, math.sqrt(var), int(total))


@dataclass
class ExperimentRun:
    tables: list[CoincidenceTable]
    estimates: list[CorrelationEstimate]
    s_c: float
    s_c_err: float
    degenerate: bool
    run_index: int = 0

    @property
    def sigma_violation(self) -> float:
        if self.s_c_err == 0:
            return math.inf if self.s_c > LHV_BOUND else 0.0
        return (self.s_c - LHV_BOUND) / self.s_c_err

    @property
    def violates(self) -> bool:
        return self.s_c > LHV_BOUND

    def summary(self) -> dict:
        return {
            "settings": [t.setting.label for t in self.tables],
            "correlations": [e.value for e in self.estimates],
            "stderr": [e.stderr for e in self.estimates],
            "totals": [e.total for e in self.estimates],
            "s_c": self.s_c,
            "s_c_err": self.s_c_err,
            "sigma_violation": self.sigma_violation,
            "degenerate": self.degenerate,
        }


@dataclass
class PreparedExperiment:
    state: QuantumState
    config: ExperimentConfig
    settings: list[MeasurementSetting]
    probabilities: list[np.ndarray]
    signs: list[int] = field(default_factory=list)


def prepare(source: QuantumState | SourceConfig | None, config: ExperimentConfig) -> PreparedExperiment:
    """Resolve the measured state (noise included) and its cell probabilities."""
    if source is None:
        state = target_cluster()
    elif isinstance(source, SourceConfig):
        state = simulate_source(source).state
    else:
        state = source
    if config.visibility < 1.0:
        state = apply_white_noise(state, config.visibility)
    settings = [setting_for(t.pauli) for t in SC_TERMS]
    probs = [outcome_probabilities(state, st) for st in settings]
    return PreparedExperiment(state, config, settings, probs, [t.sign for t in SC_TERMS])


def run_once(prep: PreparedExperiment, rng: np.random.Generator, run_index: int = 0) -> ExperimentRun:
    tables = [sample_counts(p, st, prep.config, rng) for p, st in zip(prep.probabilities, prep.settings)]
    estimates = [estimate_correlation(t) for t in tables]
    s_c, err, degenerate = bell_parameter_error([e.value for e in estimates], [e.stderr for e in estimates])
    if degenerate:
        warnings.warn(
            "a Bell block is within 2 stderr of zero; error propagation is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return ExperimentRun(tables, estimates, s_c, err, degenerate, run_index)


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Private stream for one run, independent of scheduling."""
    return np.random.default_rng([seed, run_index])


def run_experiment(
    source: QuantumState | SourceConfig | None = None,
    config: ExperimentConfig | None = None,
    run_index: int = 0,
) -> ExperimentRun:
    config = config or ExperimentConfig()
    return run_once(prepare(source, config), run_rng(config.seed, run_index), run_index)


def run_many(
    source: QuantumState | SourceConfig | None = None,
    config: ExperimentConfig | None = None,
    runs: int = 1,
    workers: int = 1,
) -> list[ExperimentRun]:
    """Independent seeded runs, returned in run-index order."""
    config = config or ExperimentConfig()
    prep = prepare(source, config)

    def one(i: int) -> ExperimentRun:
        return run_once(prep, run_rng(config.seed, i), i)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(one, range(runs)))
        return [one(i) for i in range(runs)]


def summarize(runs: Sequence[ExperimentRun]) -> dict:
    s = np.array([r.s_c for r in runs])
    err = np.array([r.s_c_err for r in runs])
    corr = np.array([[e.value for e in r.estimates] for r in runs])
    se = np.array([[e.stderr for e in r.estimates] for r in runs])
    sig = np.array([r.sigma_violation for r in runs])
    return {
        "runs": len(runs),
        "settings": [t.setting.label for t in runs[0].tables],
        "correlations": corr.mean(axis=0).tolist(),
        "correlation_spread": corr.std(axis=0, ddof=1).tolist() if len(runs) > 1 else [0.0] * 4,
        "stderr": se.mean(axis=0).tolist(),
        "s_c": float(s.mean()),
        "s_c_spread": float(s.std(ddof=1)) if len(runs) > 1 else 0.0,
        "s_c_err": float(err.mean()),
        "sigma_violation": float(sig.mean()),
        "violation_fraction": float(np.mean(s > LHV_BOUND)),
    }


def tables_csv(runs: Sequence[ExperimentRun], setting_index: int) -> str:
    """CSV of one setting's count table across runs; columns follow cell order."""
    setting = runs[0].tables[setting_index].setting
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["run"] + ["".join("+" if v > 0 else "-" for v in o) for o in setting.outcomes])
    for r in runs:
        w.writerow([r.run_index] + r.tables[setting_index].counts.tolist())
    return buf.getvalue()


def sc_variance_per_count(state: QuantumState, visibility: float, efficiencies=(1.0, 1.0, 1.0, 1.0)) -> float:
    """``N * var(S_C)`` to first order, from the expected cell means."""
    cfg = ExperimentConfig(visibility=visibility, mean_counts=1.0, efficiencies=tuple(efficiencies))
    prep = prepare(state, cfg)
    total = 0.0
    for probs, st in zip(prep.probabilities, prep.settings):
        w = cell_means(probs, st, cfg)
        par = np.array([math.prod(o) for o in st.outcomes])
        e = np.dot(par, w) / w.sum()
        total += np.dot(w, (par - e) ** 2) / w.sum() ** 2
    return float(total)


def calibrate_mean_counts(
    state: QuantumState | None = None,
    visibility: float = REFERENCE_VISIBILITY,
    target_sc_err: float = 0.08,
    runs: int = 200,
    seed: int = 0,
    sweep: Sequence[float] = (0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3),
) -> dict:
    """Mean counts per setting that make the propagated S_C error hit a target.

    The first-order error scales as ``1/sqrt(N)``, which gives an analytic
    estimate; a Monte Carlo sweep around it reports the realized mean error
    of the propagated uncertainty at each candidate.
    """
    state = state or target_cluster()
    analytic = sc_variance_per_count(state, visibility) / target_sc_err**2
    rows = []
    for f in sweep:
        n = round(analytic * f)
        cfg = ExperimentConfig(visibility=visibility, mean_counts=n, seed=seed)
        res = summarize(run_many(state, cfg, runs))
        rows.append({"mean_counts": n, "s_c_err": res["s_c_err"], "s_c_spread": res["s_c_spread"]})
    return {
        "visibility": visibility,
        "target_sc_err": target_sc_err,
        "analytic_mean_counts": analytic,
        "mean_counts": float(round(analytic)),
        "sweep": rows,
    }
