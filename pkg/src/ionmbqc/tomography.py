"""Finite-shot Pauli tomography, maximum-likelihood reconstruction, and
Monte-Carlo projection-noise error bars.

Counts are stored per outcome (not per expectation value) so that the
resampling step can redraw them multinomially around the observed
frequencies.  Reconstruction iterates the R-rho-R fixed point with dilution
on non-monotone steps, which keeps the likelihood non-decreasing and the
iterate physical at every step.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CoreError, DensityMatrix, State, StateVector
from .graphs import GraphSpec, stabilizer_group

Setting = tuple[str, ...]

_BASIS_ROWS = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=complex) / math.sqrt(2),
    "Z": np.eye(2, dtype=complex),
}


@dataclass(frozen=True)
class MeasurementSettings:
    settings: tuple[Setting, ...]
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise CoreError("shots must be at least 1")
        ss = tuple(tuple(s) for s in self.settings)
        object.__setattr__(self, "settings", ss)
        if len(set(ss)) != len(ss):
            raise CoreError("duplicate settings")
        for s in ss:
            if any(l not in "XYZ" for l in s):
                raise CoreError(f"bad setting {s}")

    @property
    def num_qubits(self) -> int:
        return len(self.settings[0])


def all_settings(num_qubits: int, shots: int) -> MeasurementSettings:
    """The full informationally complete set: all 3^n Pauli products."""
    return MeasurementSettings(tuple(itertools.product("XYZ", repeat=num_qubits)), shots)


@dataclass(frozen=True)
class CountsTable:
    num_qubits: int
    shots: int
    counts: dict

    def __post_init__(self):
        for s, c in self.counts.items():
            c = np.asarray(c, dtype=float)
            if c.shape != (2 ** self.num_qubits,):
                raise CoreError(f"bad count vector for setting {s}")
            if abs(c.sum() - self.shots) > 1e-6 * max(1.0, self.shots):
                raise CoreError(f"counts for {s} sum to {c.sum()}, not {self.shots}")

    def settings(self) -> list[Setting]:
        return list(self.counts.keys())

    def frequencies(self, setting: Setting) -> np.ndarray:
        return np.asarray(self.counts[setting], dtype=float) / self.shots


def _rotation(setting: Setting) -> np.ndarray:
    u = np.array([[1.0 + 0j]])
    for l in setting:
        u = np.kron(u, _BASIS_ROWS[l])
    return u


def setting_probabilities(state: State, setting: Setting) -> np.ndarray:
    """Exact outcome probabilities (bit q of the outcome index refers to
    qubit q; 0 is the +1 eigenstate)."""
    u = _rotation(setting)
    if isinstance(state, StateVector):
        return np.abs(u @ state.amplitudes) ** 2
    return np.real(np.diag(u @ state.matrix @ u.conj().T))


def sample_counts(state: State, settings: MeasurementSettings,
                  seed: int | None = None) -> CountsTable:
    """Multinomial draws from the exact outcome probabilities, per setting."""
    if settings.num_qubits != state.num_qubits:
        raise CoreError("settings do not match the state size")
    rng = np.random.default_rng(seed)
    counts = {}
    for s in settings.settings:
        p = np.clip(setting_probabilities(state, s), 0, None)
        counts[s] = rng.multinomial(settings.shots, p / p.sum()).astype(float)
    return CountsTable(state.num_qubits, settings.shots, counts)


def exact_counts(state: State, settings: MeasurementSettings) -> CountsTable:
    """Infinite-statistics limit: probabilities scaled to the shot count."""
    counts = {
        s: setting_probabilities(state, s) * settings.shots for s in settings.settings
    }
    return CountsTable(state.num_qubits, settings.shots, counts)


@dataclass(frozen=True)
class ReconstructionResult:
    rho: DensityMatrix
    log_likelihood: float
    iterations: int
    converged: bool
    trajectory: tuple[float, ...] = ()


def _projector_stack(settings: list[Setting], n: int) -> np.ndarray:
    """Stack of projector kets: one row per (setting, outcome)."""
    return np.vstack([_rotation(s).conj() for s in settings])


def _is_complete(settings: list[Setting], n: int) -> bool:
    if set(settings) >= set(itertools.product("XYZ", repeat=n)):
        return True
    v = _projector_stack(settings, n)
    vec = np.einsum("ri,rj->rij", v, v.conj()).reshape(len(v), -1)
    return np.linalg.matrix_rank(vec, tol=1e-10) == 4 ** n


def mle_reconstruct(counts: CountsTable, max_iters: int = 10000,
                    tol: float = 1e-10) -> ReconstructionResult:
    """Iterative maximum-likelihood reconstruction over physical states."""
    n = counts.num_qubits
    settings = counts.settings()
    if not _is_complete(settings, n):
        raise CoreError("measurement settings are informationally incomplete")
    v = _projector_stack(settings, n)       # rows are <v_{s,o}| as kets conj
    freqs = np.concatenate([counts.counts[s] for s in settings]).astype(float)
    total = freqs.sum()
    dim = 2 ** n
    rho = np.eye(dim, dtype=complex) / dim

    def probs(r):
        return np.clip(np.real(np.sum((v.conj() @ r) * v, axis=1)), 1e-14, None)

    def loglike(p):
        mask = freqs > 0
        return float(np.sum(freqs[mask] * np.log(p[mask])))

    p = probs(rho)
    ll = loglike(p)
    trajectory = [ll]
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        w = freqs / (total * p)
        r_op = (v.T * w) @ v.conj()
        cand = r_op @ rho @ r_op
        cand = (cand + cand.conj().T) / 2
        cand /= np.trace(cand).real
        p_cand = probs(cand)
        ll_cand = loglike(p_cand)
        if ll_cand < ll - 1e-12:
            # diluted step: contract toward the identity direction until the
            # likelihood stops decreasing
            eps = 0.5
            ident = np.eye(dim)
            while eps > 1e-8:
                m = (ident + eps * r_op) / (1 + eps)
                cand = m @ rho @ m.conj().T
                cand = (cand + cand.conj().T) / 2
                cand /= np.trace(cand).real
                p_cand = probs(cand)
                ll_cand = loglike(p_cand)
                if ll_cand >= ll - 1e-12:
                    break
                eps /= 2
            if ll_cand < ll - 1e-9:
                raise CoreError("likelihood decreased; dilution failed")
        improvement = ll_cand - ll
        rho, p, ll = cand, p_cand, ll_cand
        trajectory.append(ll)
        if abs(improvement) < tol * max(1.0, abs(ll)):
            converged = True
            break
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -1e-9:
        rho = rho - evals.min() * np.eye(dim)
        rho /= np.trace(rho).real
    return ReconstructionResult(DensityMatrix(n, rho), ll, iters, converged,
                                tuple(trajectory))


def mc_error_bar(counts: CountsTable, trials: int, functional,
                 seed: int | None = None, **mle_kwargs) -> tuple[float, float]:
    """Resample the counts multinomially around the observed frequencies,
    re-reconstruct, and evaluate ``functional``; returns (mean, std)."""
    if trials < 2:
        raise CoreError("at least 2 Monte Carlo trials required")
    rng = np.random.default_rng(seed)
    shots = int(round(counts.shots))
    values = []
    for _ in range(trials):
        resampled = {}
        for s in counts.settings():
            f = counts.frequencies(s)
            f = np.clip(f, 0, None)
            resampled[s] = rng.multinomial(shots, f / f.sum()).astype(float)
        table = CountsTable(counts.num_qubits, shots, resampled)
        values.append(float(functional(mle_reconstruct(table, **mle_kwargs).rho)))
    arr = np.asarray(values)
    return float(arr.mean()), float(arr.std(ddof=1))


def bell_settings(g: GraphSpec) -> list[Setting]:
    """Settings sufficient for every stabilizer term (identity slots read Z)."""
    out = []
    for term in stabilizer_group(g).group:
        s = tuple(l if l != "I" else "Z" for l in term.letters)
        if s not in out:
            out.append(s)
    return out


def bell_from_counts(counts: CountsTable, g: GraphSpec) -> float:
    """Estimate the normalized Bell operator from the stabilizer-term subset
    of settings only."""
    if counts.num_qubits != g.num_vertices:
        raise CoreError("counts do not match the graph size")
    n = g.num_vertices
    available = list(counts.counts.keys())
    missing = []
    total = 0.0
    group = stabilizer_group(g).group
    for term in group:
        setting = next((s for s in available if term.matches_setting(s)), None)
        if setting is None:
            missing.append("".join(l if l != "I" else "Z" for l in term.letters))
            continue
        freqs = counts.frequencies(setting)
        outcomes = np.arange(2 ** n)
        parity = np.zeros(2 ** n, dtype=int)
        for q, l in enumerate(term.letters):
            if l != "I":
                parity ^= (outcomes >> (n - 1 - q)) & 1
        sign = term.phase.real
        total += sign * float(np.sum(freqs * (1 - 2 * parity)))
    if missing:
        raise CoreError(f"missing settings for stabilizer terms: {sorted(set(missing))}")
    return total / len(group)


# --------------------------------------------------------------------------
# counts file format
# --------------------------------------------------------------------------


def write_counts_csv(counts: CountsTable, path: str | Path) -> None:
    n = counts.num_qubits
    with open(path, "w", newline="") as fh:
        fh.write("# schema=1\n")
        writer = csv.writer(fh)
        writer.writerow(["setting", "outcome", "count"])
        for s in counts.settings():
            for o, c in enumerate(counts.counts[s]):
                writer.writerow(["".join(s), format(o, f"0{n}b"), repr(float(c))])


def read_counts_csv(path: str | Path) -> CountsTable:
    with open(path) as fh:
        header = fh.readline()
        if "schema=1" not in header:
            raise CoreError("counts file missing the schema=1 header")
        rows = list(csv.reader(fh))
    if rows and rows[0] == ["setting", "outcome", "count"]:
        rows = rows[1:]
    counts: dict = {}
    n = len(rows[0][0])
    for setting, outcome, count in rows:
        s = tuple(setting)
        counts.setdefault(s, np.zeros(2 ** n))
        counts[s][int(outcome, 2)] = float(count)
    shots = round(next(iter(counts.values())).sum(), 6)
    return CountsTable(n, shots if shots != int(shots) else int(shots), counts)
