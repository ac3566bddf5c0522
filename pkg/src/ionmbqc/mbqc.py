"""Measurement patterns on the four-qubit linear cluster.

The single-qubit pattern measures qubits 1..3 in B(alpha), B(+-beta),
B(+-gamma) with signs adapted to earlier outcomes; the output appears on
qubit 4 up to the byproduct X^(s1+s3) Z^(s2).  The two-qubit pattern measures
qubits 1 and 4 in B(alpha), B(beta); outputs appear on qubits 2 and 3 up to
byproducts X^(s1) Z^(s4) and X^(s4) Z^(s1).  Aggregating byproduct-corrected
branches weighted by their probabilities reproduces perfect feedforward, so
the aggregated output of an ideal cluster is pure.

The equivalent-circuit oracles are fixed once from the wire identities of
the cluster (each measured qubit contributes one H Rz(-angle) step) and are
cross-checked against direct pattern simulation in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core, graphs
from .core import CZ, H, CoreError, DensityMatrix, MeasurementBasis, State, StateVector
from .core import BranchRecord
from .pauli import PauliString

_PAULI_MAT = {"I": core.ID2, "X": core.X, "Y": core.Y, "Z": core.Z}


@dataclass(frozen=True)
class PatternResult:
    output: DensityMatrix
    per_branch: tuple[BranchRecord, ...]


def _byproduct_matrix(p: PauliString) -> np.ndarray:
    m = np.array([[p.phase]], dtype=complex)
    for l in p.letters:
        m = np.kron(m, _PAULI_MAT[l])
    return m


def aggregate_branches(branches) -> DensityMatrix:
    """Sum_b p_b U_b rho_b U_b^dag -- identical to perfect feedforward."""
    branches = list(branches)
    total_p = sum(b.probability for b in branches)
    if abs(total_p - 1.0) > 1e-8:
        raise CoreError(f"branch probabilities sum to {total_p}")
    acc = None
    for b in branches:
        if b.residual is None:
            continue
        rho = b.residual.to_density() if isinstance(b.residual, StateVector) else b.residual
        u = _byproduct_matrix(b.byproduct) if b.byproduct is not None else None
        mat = rho.matrix if u is None else u @ rho.matrix @ u.conj().T
        acc = b.probability * mat if acc is None else acc + b.probability * mat
    nq = branches[0].byproduct.num_qubits if branches[0].byproduct is not None else (
        branches[0].residual.num_qubits)
    return DensityMatrix(nq, acc / total_p)


def _enumerate_single(alpha: float, beta: float, gamma: float) -> list[BranchRecord]:
    cluster = graphs.build_graph_state(graphs.lc4_graph())
    out = []
    for b1 in core.measure(cluster, 0, MeasurementBasis.b(alpha)):
        if b1.residual is None:
            continue
        s1 = b1.outcomes[0]
        for b2 in core.measure(b1.residual, 0, MeasurementBasis.b((-1) ** s1 * beta)):
            if b2.residual is None:
                continue
            s2 = b2.outcomes[0]
            for b3 in core.measure(b2.residual, 0, MeasurementBasis.b((-1) ** s2 * gamma)):
                if b3.residual is None:
                    continue
                s3 = b3.outcomes[0]
                bp = _xz_byproduct((s1 + s3) % 2, s2 % 2)
                out.append(
                    BranchRecord(
                        (s1, s2, s3),
                        b1.probability * b2.probability * b3.probability,
                        b3.residual,
                        bp,
                    )
                )
    return out


def _xz_byproduct(x: int, z: int) -> PauliString:
    """Single-qubit X^x Z^z as a signed Pauli (X Z = -i Y)."""
    if (x, z) == (1, 1):
        return PauliString(-1j, ("Y",))
    return PauliString(1, ({(0, 0): "I", (1, 0): "X", (0, 1): "Z"}[(x, z)],))


def run_single_qubit_pattern(
    alpha: float,
    beta: float,
    gamma: float,
    mode: str = "branch",
    seed: int | None = None,
    shots: int = 1,
) -> PatternResult:
    """One-qubit rotation demonstrated on the linear cluster; output on the
    last qubit after byproduct correction and branch aggregation."""
    branches = _enumerate_single(alpha, beta, gamma)
    if mode == "branch":
        return PatternResult(aggregate_branches(branches), tuple(branches))
    if mode != "sample":
        raise CoreError(f"unknown mode {mode!r}")
    sampled = _sample_from_branches(branches, seed, shots)
    return PatternResult(aggregate_branches(sampled), tuple(sampled))


def _sample_from_branches(branches, seed, shots) -> list[BranchRecord]:
    """Draw outcome tuples shot by shot (sequential conditional sampling over
    the enumerated branch tree) and reweight branches empirically."""
    rng = np.random.default_rng(seed)
    probs = np.array([b.probability for b in branches])
    probs = probs / probs.sum()
    counts = np.zeros(len(branches), dtype=int)
    n_meas = len(branches[0].outcomes)
    for _ in range(shots):
        # walk the outcome tree one measurement at a time
        alive = np.arange(len(branches))
        prefix = []
        for i in range(n_meas):
            mask0 = [j for j in alive if branches[j].outcomes[i] == 0]
            p0 = sum(probs[j] for j in mask0) / sum(probs[j] for j in alive)
            s = int(rng.random() >= p0)
            prefix.append(s)
            alive = [j for j in alive if branches[j].outcomes[i] == s]
        counts[alive[0]] += 1
    out = []
    for b, c in zip(branches, counts):
        if c:
            out.append(BranchRecord(b.outcomes, c / shots, b.residual, b.byproduct))
    return out


def _enumerate_two(alpha: float, beta: float) -> list[BranchRecord]:
    cluster = graphs.build_graph_state(graphs.lc4_graph())
    out = []
    for b1 in core.measure(cluster, 0, MeasurementBasis.b(alpha)):
        if b1.residual is None:
            continue
        s1 = b1.outcomes[0]
        # qubit 4 of the original cluster is index 2 once qubit 1 is removed
        for b4 in core.measure(b1.residual, 2, MeasurementBasis.b(beta)):
            if b4.residual is None:
                continue
            s4 = b4.outcomes[0]
            bp = _two_qubit_byproduct(s1, s4)
            out.append(
                BranchRecord((s1, s4), b1.probability * b4.probability, b4.residual, bp)
            )
    return out


def _two_qubit_byproduct(s1: int, s4: int) -> PauliString:
    first = _xz_byproduct(s1, s4)
    second = _xz_byproduct(s4, s1)
    return PauliString(first.phase * second.phase, (first.letters[0], second.letters[0]))


def run_two_qubit_pattern(
    alpha: float,
    beta: float,
    mode: str = "branch",
    seed: int | None = None,
    shots: int = 1,
) -> PatternResult:
    """Entangling gate demonstrated on the linear cluster; outputs on the two
    middle qubits after byproducts and aggregation."""
    branches = _enumerate_two(alpha, beta)
    if mode == "branch":
        return PatternResult(aggregate_branches(branches), tuple(branches))
    if mode != "sample":
        raise CoreError(f"unknown mode {mode!r}")
    sampled = _sample_from_branches(branches, seed, shots)
    return PatternResult(aggregate_branches(sampled), tuple(sampled))


def equivalent_circuit_single(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Circuit-model unitary the single-qubit pattern applies to |+>."""
    return H @ core.rz(-gamma) @ H @ core.rz(-beta) @ H @ core.rz(-alpha)


def single_qubit_oracle_state(alpha: float, beta: float, gamma: float) -> StateVector:
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    return StateVector(1, equivalent_circuit_single(alpha, beta, gamma) @ plus)


def equivalent_circuit_two(alpha: float, beta: float) -> np.ndarray:
    """Controlled-phase conjugated by the pattern's single-qubit rotations."""
    return CZ @ np.kron(core.rx(-alpha) @ H, core.rx(-beta) @ H)


def two_qubit_oracle_state(alpha: float, beta: float) -> StateVector:
    plus2 = np.full(4, 0.5, dtype=complex)
    return StateVector(2, equivalent_circuit_two(alpha, beta) @ plus2)


def bloch_vector(state: State) -> tuple[float, float, float]:
    if state.num_qubits != 1:
        raise CoreError("Bloch vector requires a single qubit")
    return tuple(
        float(PauliString.from_str(p).expectation(state)) for p in ("X", "Y", "Z")
    )
