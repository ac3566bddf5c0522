"""Measurement-based phase-flip repetition code on the EC graph family.

The resource graph has an input qubit A joined to n codeword qubits, each of
which is joined to an output qubit B.  The protocol: measure A to read the
input state in, optionally rotate codeword qubits around Z (coherent errors,
discretized to flips with probability p = sin^2(theta/2) by the syndrome
measurement), measure every codeword qubit in X, then apply the recovery
dictated by the outcome majority.

Teleportation through the graph conjugates the encoded amplitudes and hands
the output to B in a fixed Hadamard-rotated frame; the implementation reports
outputs in that frame, where the protocol takes its textbook form: recovery
is Z exactly on majority-minus syndromes, codeword errors act as logical
phase flips, and Z-basis inputs ride through untouched at any error rate.
Each input is read in by measuring A in the basis whose outcomes teleport to
the input state or its orthogonal partner; the partner branch is mapped back
by the single Pauli relating the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core, graphs
from .core import (
    CoreError,
    DensityMatrix,
    MeasurementBasis,
    NoiseChannel,
    State,
    StateVector,
)

INPUT_LABELS = ("+", "-", "+i", "-i", "0", "1")
FOUR_STATE_SET = ("+", "-", "+i", "-i")
SIX_STATE_SET = INPUT_LABELS

_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
}
_KETS["+"] = (_KETS["0"] + _KETS["1"]) / math.sqrt(2)
_KETS["-"] = (_KETS["0"] - _KETS["1"]) / math.sqrt(2)
_KETS["+i"] = (_KETS["0"] + 1j * _KETS["1"]) / math.sqrt(2)
_KETS["-i"] = (_KETS["0"] - 1j * _KETS["1"]) / math.sqrt(2)

# per input label: (basis measured on A, outcome whose branch teleports the
# input itself, Pauli mapping the partner branch back)
_ENCODING = {
    "+": (MeasurementBasis.z(), 0, "Z"),
    "-": (MeasurementBasis.z(), 1, "Z"),
    "+i": (MeasurementBasis.y(), 0, "Z"),
    "-i": (MeasurementBasis.y(), 1, "Z"),
    "0": (MeasurementBasis.x(), 0, "X"),
    "1": (MeasurementBasis.x(), 1, "X"),
}

_FIX = {"X": core.X, "Z": core.Z}


def input_state(label: str) -> StateVector:
    if label not in _KETS:
        raise CoreError(f"unknown input label {label!r}")
    return StateVector(1, _KETS[label])


@dataclass(frozen=True)
class ECLayout:
    """Qubit roles for the (n+2)-qubit code state: A=0, C_i=i, B=n+1."""

    n: int

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise CoreError(f"codeword length must be odd, got {self.n}")
        if self.n + 2 > 12:
            raise CoreError("code state exceeds the supported qubit count")

    @property
    def input_qubit(self) -> int:
        return 0

    @property
    def output_qubit(self) -> int:
        return self.n + 1

    def codeword_qubits(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))


@dataclass(frozen=True)
class ErrorSpec:
    """Uniform coherent Z-rotation by theta on a subset of codeword qubits
    (1-based codeword labels); flip probability p = sin^2(theta/2)."""

    n: int
    targets: tuple[int, ...]
    theta: float

    def __post_init__(self):
        targets = tuple(sorted(set(int(t) for t in self.targets)))
        object.__setattr__(self, "targets", targets)
        if any(t < 1 or t > self.n for t in targets):
            raise CoreError(f"targets {targets} outside codeword 1..{self.n}")

    @property
    def p(self) -> float:
        return math.sin(self.theta / 2) ** 2

    @classmethod
    def from_probability(cls, n: int, targets, p: float) -> "ErrorSpec":
        if not 0.0 <= p <= 1.0:
            raise CoreError(f"flip probability {p} outside [0, 1]")
        return cls(n, tuple(targets), 2 * math.asin(math.sqrt(p)))


def build_ec_state(n: int) -> StateVector:
    """The (n+2)-qubit code state (equals the EC-topology graph state)."""
    layout = ECLayout(n)
    return graphs.build_graph_state(graphs.ecn_graph(layout.n))


def inject_errors(state: State, spec: ErrorSpec) -> State:
    """Apply the coherent rotations; accepts the full (n+2)-qubit resource or
    the (n+1)-qubit post-encode state (codeword indices shift accordingly)."""
    if state.num_qubits == spec.n + 2:
        offset = 0
    elif state.num_qubits == spec.n + 1:
        offset = 1
    else:
        raise CoreError("state size matches neither the resource nor the encoded register")
    out = state
    for t in spec.targets:
        out = core.apply_unitary(out, core.rz(spec.theta), (t - offset,))
    return out


@dataclass(frozen=True)
class EncodedBranch:
    outcome: int
    probability: float
    state: State            # n+1 qubits: C_1..C_n, B
    needs_fix: bool


def encode_input(state: State, label: str) -> list[EncodedBranch]:
    """Measure qubit A, retaining both branches; the branch whose outcome
    does not teleport the input is flagged for the relating-Pauli fix."""
    basis, clean, _ = _ENCODING[label]
    out = []
    for rec in core.measure(state, 0, basis):
        if rec.residual is None:
            continue
        s = rec.outcomes[0]
        out.append(EncodedBranch(s, rec.probability, rec.residual, s != clean))
    return out


@dataclass(frozen=True)
class SyndromeBranch:
    outcomes: tuple[int, ...]   # 0 = plus, 1 = minus, one per codeword qubit
    probability: float
    recovery: str               # 'I' or 'Z'
    output: State               # single qubit, reported frame, recovery applied


def recovery_operator(outcomes) -> str:
    """Majority vote: 'Z' whenever minus outcomes outnumber plus outcomes."""
    outcomes = tuple(outcomes)
    return "Z" if sum(outcomes) * 2 > len(outcomes) else "I"


def decode_and_recover(state: State, n: int) -> tuple[list[SyndromeBranch], DensityMatrix]:
    """X-measure all codeword qubits, apply the majority recovery per branch
    in the reported frame, and aggregate the branches."""
    layout = ECLayout(n)
    if state.num_qubits != n + 1:
        raise CoreError("decode expects the post-encode register (codeword + output)")
    stack = [(state, 1.0, ())]
    for _ in range(n):
        nxt = []
        for st, p, syn in stack:
            for rec in core.measure(st, 0, MeasurementBasis.x()):
                if rec.residual is None or rec.probability * p < 1e-16:
                    continue
                nxt.append((rec.residual, p * rec.probability, syn + (rec.outcomes[0],)))
        stack = nxt
    branches = []
    acc = np.zeros((2, 2), dtype=complex)
    for st, p, syn in stack:
        out = core.apply_unitary(st, core.H, (0,))
        rec_op = recovery_operator(syn)
        if rec_op == "Z":
            out = core.apply_unitary(out, core.Z, (0,))
        branches.append(SyndromeBranch(syn, p, rec_op, out))
        rho = out.to_density() if isinstance(out, StateVector) else out
        acc += p * rho.matrix
    total = sum(b.probability for b in branches)
    return branches, DensityMatrix(1, acc / total)


def run_protocol(
    n: int,
    label: str,
    error: ErrorSpec | None = None,
    resource: State | None = None,
) -> DensityMatrix:
    """Full pipeline: encode, optionally inject errors, decode, recover, fix
    the partner branch, aggregate.  Returns the single-qubit output state."""
    layout = ECLayout(n)
    state: State = resource if resource is not None else build_ec_state(n)
    if error is not None:
        if error.n != n:
            raise CoreError("error spec does not match the code length")
        state = inject_errors(state, error)
    _, _, fix_letter = _ENCODING[label]
    acc = np.zeros((2, 2), dtype=complex)
    total = 0.0
    for enc in encode_input(state, label):
        _, rho_b = decode_and_recover(enc.state, n)
        mat = rho_b.matrix
        if enc.needs_fix:
            f = _FIX[fix_letter]
            mat = f @ mat @ f.conj().T
        acc += enc.probability * mat
        total += enc.probability
    return DensityMatrix(1, acc / total)


def output_fidelity(n: int, label: str, error: ErrorSpec | None = None,
                    resource: State | None = None) -> float:
    return core.fidelity(run_protocol(n, label, error, resource), input_state(label))


@dataclass(frozen=True)
class ATFReport:
    n: int
    p_grid: tuple[float, ...]
    per_input: dict
    atf: tuple[float, ...]
    input_set: str


def _input_set(tag: str) -> tuple[str, ...]:
    if tag in ("four", "4"):
        return FOUR_STATE_SET
    if tag in ("six", "6"):
        return SIX_STATE_SET
    raise CoreError(f"unknown input-set tag {tag!r}")


def atf(n: int, p, targets=None, input_set: str = "four") -> ATFReport:
    """Average teleportation fidelity over the input set, by exact branch
    enumeration.  ``targets`` defaults to every codeword qubit."""
    p_grid = tuple(float(x) for x in (p if np.iterable(p) else [p]))
    labels = _input_set(input_set)
    targets = tuple(range(1, n + 1)) if targets is None else tuple(targets)
    per_input = {lab: [] for lab in labels}
    averages = []
    for pv in p_grid:
        spec = ErrorSpec.from_probability(n, targets, pv)
        fids = [output_fidelity(n, lab, spec) for lab in labels]
        for lab, f in zip(labels, fids):
            per_input[lab].append(f)
        averages.append(float(np.mean(fids)))
    return ATFReport(n, p_grid, {k: tuple(v) for k, v in per_input.items()},
                     tuple(averages), input_set)


def ideal_atf_curve(n: int, p, input_set: str = "four"):
    """Closed form for errors on every codeword qubit: the probability of at
    most (n-1)/2 flips; the six-state variant mixes in the two unit-fidelity
    Z-basis inputs as (4 F + 2)/6."""
    ECLayout(n)
    scalar = not np.iterable(p)
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((ps < 0) | (ps > 1)):
        raise CoreError("p outside [0, 1]")
    f4 = np.zeros_like(ps)
    for k in range((n - 1) // 2 + 1):
        f4 += math.comb(n, k) * ps ** k * (1 - ps) ** (n - k)
    out = f4 if _input_set(input_set) == FOUR_STATE_SET else (4 * f4 + 2) / 6
    return float(out[0]) if scalar else out


def noise_robustness_study(
    n: int,
    channel: str,
    strength: float,
    targets: str = "all",
    input_set: str = "four",
) -> float:
    """ATF at p=0 when every targeted qubit of the resource state passes
    through the given single-qubit channel before the protocol runs."""
    layout = ECLayout(n)
    if targets == "all":
        qubits = tuple(range(n + 2))
    elif targets == "codeword":
        qubits = layout.codeword_qubits()
    else:
        raise CoreError(f"unknown target group {targets!r}")
    rho: State = build_ec_state(n).to_density()
    for q in qubits:
        rho = core.apply_channel(rho, NoiseChannel(channel, strength, q))
    labels = _input_set(input_set)
    fids = [output_fidelity(n, lab, None, rho) for lab in labels]
    return float(np.mean(fids))
