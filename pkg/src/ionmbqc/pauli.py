"""Signed Pauli strings with exact phase tracking.

Phases live in {1, -1, 1j, -1j}; single-letter products are looked up in an
exact table so composition never accumulates floating-point error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .core import ALG_TOL, ID2, X, Y, Z, CoreError, State, StateVector

LETTER_MATRICES = {"I": ID2, "X": X, "Y": Y, "Z": Z}

# (a, b) -> (phase, c) with  P_a P_b = phase * P_c
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)


@dataclass(frozen=True)
class PauliString:
    """Phase times a tensor product of I/X/Y/Z letters."""

    phase: complex
    letters: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "phase", complex(self.phase))
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.phase not in _PHASES:
            raise CoreError(f"phase {self.phase} not in {{1,-1,i,-i}}")
        for l in self.letters:
            if l not in LETTER_MATRICES:
                raise CoreError(f"unknown Pauli letter {l!r}")

    @classmethod
    def from_str(cls, s: str, phase: complex = 1) -> "PauliString":
        return cls(phase, tuple(s))

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(1, ("I",) * n)

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if len(self.letters) != len(other.letters):
            raise CoreError("length mismatch in Pauli product")
        phase = self.phase * other.phase
        letters = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _PRODUCT[(a, b)]
            phase *= ph
            letters.append(c)
        return PauliString(phase, tuple(letters))

    def __str__(self) -> str:
        sign = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return sign + "".join(self.letters)

    def to_matrix(self) -> np.ndarray:
        m = np.array([[self.phase]], dtype=complex)
        for l in self.letters:
            m = np.kron(m, LETTER_MATRICES[l])
        return m

    def expectation(self, state: State) -> float:
        """Real expectation value <P> on a pure or mixed state."""
        if state.num_qubits != self.num_qubits:
            raise CoreError("dimension mismatch in Pauli expectation")
        if isinstance(state, StateVector):
            v = state.amplitudes
            acc = self._apply_vec(v)
            return float(np.real(np.vdot(v, acc)))
        return float(np.real(np.trace(self.to_matrix() @ state.matrix)))

    def _apply_vec(self, v: np.ndarray) -> np.ndarray:
        n = self.num_qubits
        out = v.reshape([2] * n)
        for q, l in enumerate(self.letters):
            if l == "I":
                continue
            out = np.moveaxis(
                np.tensordot(LETTER_MATRICES[l], out, axes=([1], [q])), 0, q
            )
        return out.reshape(-1) * self.phase

    def matches_setting(self, setting: tuple[str, ...]) -> bool:
        """True if a measurement of ``setting`` determines this operator
        (every non-identity letter agrees position-wise)."""
        return all(l == "I" or l == s for l, s in zip(self.letters, setting))


def match_single_pauli(m: np.ndarray) -> tuple[complex, str]:
    """Identify a 2x2 matrix as phase * Pauli; raises if it is not one."""
    for name, p in LETTER_MATRICES.items():
        # phase = Tr(P^dag m)/2 if m is proportional to P
        ph = np.trace(p.conj().T @ m) / 2
        if abs(ph) > 0.5 and np.max(np.abs(m - ph * p)) < ALG_TOL * 10:
            for exact in _PHASES:
                if abs(ph - exact) < 1e-8:
                    return exact, name
            raise CoreError(f"matrix is Pauli-like but with non-unit phase {ph}")
    raise CoreError("matrix is not proportional to a Pauli operator")


def conjugate_by_locals(p: PauliString, unitaries: list[np.ndarray]) -> PauliString:
    """U^dag P U for a tensor product of single-qubit unitaries U."""
    if len(unitaries) != p.num_qubits:
        raise CoreError("one unitary per qubit required")
    phase = p.phase
    letters = []
    for u, l in zip(unitaries, p.letters):
        ph, name = match_single_pauli(u.conj().T @ LETTER_MATRICES[l] @ u)
        phase *= ph
        letters.append(name)
    if phase not in _PHASES:
        # accumulate to the nearest exact phase (guards rounding drift)
        phase = min(_PHASES, key=lambda e: abs(e - phase))
    return PauliString(phase, tuple(letters))


def product(ps: list[PauliString], n: int) -> PauliString:
    return reduce(lambda a, b: a * b, ps, PauliString.identity(n))
