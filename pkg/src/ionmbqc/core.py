"""Dense complex state-vector and density-matrix kernel.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of the amplitude index, so the
  amplitude of |q0 q1 ... q_{n-1}> sits at index ``q0*2^(n-1) + ... + q_{n-1}``.
* The rotated measurement basis ``B(alpha)`` consists of
  ``|+alpha> = (|0> + e^{i alpha}|1>)/sqrt(2)`` and
  ``|-alpha> = (|0> - e^{i alpha}|1>)/sqrt(2)``; outcome ``s=0`` labels the
  ``+`` projector.
* State equality is always assessed via fidelity, never amplitude-wise,
  so global phases are unobservable.

All public operations are pure functions over immutable value objects; no
shared mutable state exists anywhere in the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-12
ALG_TOL = 1e-10
PSD_TOL = 1e-9

# single-qubit constants
ID2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def rx(theta: float) -> np.ndarray:
    """Rotation exp(-i theta X / 2)."""
    return math.cos(theta / 2) * ID2 - 1j * math.sin(theta / 2) * X


def rz(theta: float) -> np.ndarray:
    """Rotation exp(-i theta Z / 2)."""
    return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])


RXP = rx(-np.pi / 2)  # exp(+i pi/4 X)
RXM = rx(np.pi / 2)   # exp(-i pi/4 X)


class CoreError(ValueError):
    """Raised on contract violations (bad dimensions, non-unitary input, ...)."""


@dataclass(frozen=True)
class StateVector:
    """Pure n-qubit state. ``amplitudes`` has length 2^n and unit L2 norm."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2 ** self.num_qubits,):
            raise CoreError(
                f"amplitude vector of length {amps.shape[0]} does not match "
                f"{self.num_qubits} qubits"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-9:
            raise CoreError(f"state vector norm {norm} is not 1")
        if abs(norm - 1.0) > NORM_TOL:
            object.__setattr__(self, "amplitudes", amps / norm)

    @classmethod
    def computational(cls, num_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(2 ** num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "StateVector":
        idx = 0
        for b in bits:
            idx = (idx << 1) | (b & 1)
        return cls.computational(len(bits), idx)

    @classmethod
    def plus(cls, num_qubits: int) -> "StateVector":
        amps = np.full(2 ** num_qubits, 2 ** (-num_qubits / 2), dtype=complex)
        return cls(num_qubits, amps)

    @classmethod
    def all_ones(cls, num_qubits: int) -> "StateVector":
        return cls.computational(num_qubits, 2 ** num_qubits - 1)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(
            self.num_qubits + other.num_qubits, np.kron(self.amplitudes, other.amplitudes)
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed n-qubit state: Hermitian, unit trace, positive semidefinite."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        dim = 2 ** self.num_qubits
        if m.shape != (dim, dim):
            raise CoreError(f"matrix shape {m.shape} does not match {self.num_qubits} qubits")
        if np.max(np.abs(m - m.conj().T)) > 1e-8:
            raise CoreError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-8:
            raise CoreError(f"density matrix trace {np.trace(m)} is not 1")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -PSD_TOL:
            raise CoreError("density matrix has a negative eigenvalue")

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2 ** num_qubits
        return cls(num_qubits, np.eye(dim, dtype=complex) / dim)


State = Union[StateVector, DensityMatrix]


@dataclass(frozen=True)
class MeasurementBasis:
    """Single-qubit measurement basis: B(alpha) or a Pauli eigenbasis."""

    kind: str            # 'B', 'X', 'Y', 'Z'
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("B", "X", "Y", "Z"):
            raise CoreError(f"unknown basis kind {self.kind!r}")
        if self.kind == "B" and self.alpha is None:
            raise CoreError("B basis requires an angle")

    @classmethod
    def b(cls, alpha: float) -> "MeasurementBasis":
        return cls("B", float(alpha))

    @classmethod
    def x(cls) -> "MeasurementBasis":
        return cls("X")

    @classmethod
    def y(cls) -> "MeasurementBasis":
        return cls("Y")

    @classmethod
    def z(cls) -> "MeasurementBasis":
        return cls("Z")

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Projector kets (|s=0>, |s=1>); s=0 is the +1 outcome."""
        if self.kind == "Z":
            return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
        alpha = {"B": self.alpha, "X": 0.0, "Y": np.pi / 2}[self.kind]
        v0 = np.array([1, np.exp(1j * alpha)], dtype=complex) / math.sqrt(2)
        v1 = np.array([1, -np.exp(1j * alpha)], dtype=complex) / math.sqrt(2)
        return v0, v1


@dataclass(frozen=True)
class BranchRecord:
    """One measurement-outcome branch.

    ``residual`` lives on the unmeasured qubits (the measured qubit is
    removed); it is None for zero-probability branches.  ``byproduct``
    is filled in by the MBQC engine and stays None for bare measurements.
    """

    outcomes: tuple[int, ...]
    probability: float
    residual: State | None
    byproduct: object = None


def _check_targets(num_qubits: int, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise CoreError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise CoreError(f"target {t} out of range for {num_qubits} qubits")
    return targets


def _check_unitary(u: np.ndarray, k: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    dim = 2 ** k
    if u.shape != (dim, dim):
        raise CoreError(f"operator shape {u.shape} does not match {k} target qubits")
    if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > ALG_TOL:
        raise CoreError("operator is not unitary")
    return u


def apply_unitary(state: State, u: np.ndarray, targets: Sequence[int]) -> State:
    """Apply a 2^k x 2^k unitary to the given target qubits."""
    targets = _check_targets(state.num_qubits, targets)
    k = len(targets)
    u = _check_unitary(u, k)
    if isinstance(state, StateVector):
        return StateVector(state.num_qubits, _apply_raw(state.amplitudes, u, targets, state.num_qubits))
    mat = _apply_raw_dm(state.matrix, u, targets, state.num_qubits)
    return DensityMatrix(state.num_qubits, mat)


def _apply_raw(amps: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape([2] * n)
    ut = u.reshape([2] * (2 * k))
    psi = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the k output axes first; restore them to their slots
    psi = np.moveaxis(psi, list(range(k)), list(targets))
    return np.ascontiguousarray(psi).reshape(-1)


def _apply_raw_dm(mat: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    dim = 2 ** n
    rho = mat.reshape([2] * (2 * n))
    k = len(targets)
    ut = u.reshape([2] * (2 * k))
    rho = np.tensordot(ut, rho, axes=(list(range(k, 2 * k)), list(targets)))
    rho = np.moveaxis(rho, list(range(k)), list(targets))
    col_targets = [n + t for t in targets]
    rho = np.tensordot(ut.conj(), rho, axes=(list(range(k, 2 * k)), col_targets))
    rho = np.moveaxis(rho, list(range(k)), col_targets)
    return np.ascontiguousarray(rho).reshape(dim, dim)


def measure(
    state: State,
    qubit: int,
    basis: MeasurementBasis,
    mode: str = "branch",
    rng: np.random.Generator | int | None = None,
) -> list[BranchRecord]:
    """Projective single-qubit measurement; the measured qubit is removed.

    ``branch`` mode returns both outcomes with exact probabilities
    (zero-probability branches carry residual None); ``sample`` mode draws
    one branch using the supplied generator or seed.
    """
    (qubit,) = _check_targets(state.num_qubits, [qubit])
    v0, v1 = basis.vectors()
    records = []
    for s, v in enumerate((v0, v1)):
        if isinstance(state, StateVector):
            psi = state.amplitudes.reshape([2] * state.num_qubits)
            res = np.tensordot(v.conj(), psi, axes=([0], [qubit])).reshape(-1)
            p = float(np.linalg.norm(res) ** 2)
            residual = (
                StateVector(state.num_qubits - 1, res / math.sqrt(p)) if p > 1e-14 else None
            )
        else:
            n = state.num_qubits
            rho = state.matrix.reshape([2] * (2 * n))
            red = np.tensordot(v.conj(), rho, axes=([0], [qubit]))
            red = np.tensordot(v, red, axes=([0], [qubit - 1 + n]))
            dim = 2 ** (n - 1)
            red = red.reshape(dim, dim)
            p = float(np.trace(red).real)
            residual = DensityMatrix(n - 1, red / p) if p > 1e-14 else None
        records.append(BranchRecord((s,), p, residual))
    total = records[0].probability + records[1].probability
    if abs(total - 1.0) > 1e-9:
        raise CoreError(f"branch probabilities sum to {total}")
    if mode == "branch":
        return records
    if mode == "sample":
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        s = int(gen.random() >= records[0].probability)
        return [records[s]]
    raise CoreError(f"unknown measurement mode {mode!r}")


def fidelity(rho: State, psi: State) -> float:
    """Overlap <psi|rho|psi> (or |<phi|psi>|^2 for two pure states)."""
    if rho.num_qubits != psi.num_qubits:
        raise CoreError("dimension mismatch in fidelity")
    if isinstance(psi, DensityMatrix):
        rho, psi = psi, rho
    if isinstance(psi, DensityMatrix):
        raise CoreError("at least one argument must be a pure state")
    v = psi.amplitudes
    if isinstance(rho, StateVector):
        return float(abs(np.vdot(rho.amplitudes, v)) ** 2)
    return float(np.real(np.vdot(v, rho.matrix @ v)))


def purity(rho: DensityMatrix) -> float:
    """Tr[rho^2]."""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def partial_trace(rho: State, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep`` (ascending qubit order preserved)."""
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    keep = _check_targets(rho.num_qubits, keep)
    if not keep:
        raise CoreError("keep must be non-empty")
    keep = tuple(sorted(keep))
    n = rho.num_qubits
    t = rho.matrix.reshape([2] * (2 * n))
    traced = [q for q in range(n) if q not in keep]
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    dim = 2 ** len(keep)
    return DensityMatrix(len(keep), t.reshape(dim, dim))


def tangle(rho: State) -> float:
    """Squared Wootters concurrence of a two-qubit state."""
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    if rho.num_qubits != 2:
        raise CoreError("tangle is defined for exactly 2 qubits")
    yy = np.kron(Y, Y)
    m = rho.matrix
    evals, evecs = np.linalg.eigh((m + m.conj().T) / 2)
    sqrt_rho = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    # the Wootters lambdas are the singular values of sqrt(rho) YY sqrt(rho)^*
    lam = np.linalg.svd(sqrt_rho @ yy @ sqrt_rho.conj(), compute_uv=False)
    c = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return float(c ** 2)


@dataclass(frozen=True)
class NoiseChannel:
    """Single-qubit Kraus channel: ``dephase`` or ``depolarize``."""

    kind: str
    p: float
    qubit: int

    def __post_init__(self):
        if self.kind not in ("dephase", "depolarize"):
            raise CoreError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise CoreError(f"channel strength {self.p} outside [0, 1]")

    def kraus(self) -> list[np.ndarray]:
        if self.kind == "dephase":
            return [math.sqrt(1 - self.p / 2) * ID2, math.sqrt(self.p / 2) * Z]
        return [
            math.sqrt(1 - 3 * self.p / 4) * ID2,
            math.sqrt(self.p / 4) * X,
            math.sqrt(self.p / 4) * Y,
            math.sqrt(self.p / 4) * Z,
        ]


def apply_channel(rho: State, channel: NoiseChannel) -> DensityMatrix:
    """Kraus-sum application of a single-qubit noise channel."""
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    (q,) = _check_targets(rho.num_qubits, [channel.qubit])
    out = np.zeros_like(rho.matrix)
    for k in channel.kraus():
        out += _apply_raw_dm(rho.matrix, k, (q,), rho.num_qubits)
    return DensityMatrix(rho.num_qubits, out)


def dephase(rho: State, p: float, qubit: int) -> DensityMatrix:
    return apply_channel(rho, NoiseChannel("dephase", p, qubit))


def depolarize(rho: State, p: float, qubit: int) -> DensityMatrix:
    return apply_channel(rho, NoiseChannel("depolarize", p, qubit))
