"""Ion-string pulse model and graph-family compiler.

Three experimental primitives are modelled:

* ``MS(theta, active)``    -- collective coupling exp[-i theta sum_{a<b} X_a X_b]
  over the active (non-hidden) qubits,
* ``ZROT(qubit, theta)``   -- addressed light-shift rotation exp[-i theta Z/2],
* ``XROT_ALL(theta, active)`` -- carrier rotation exp[-i theta/2 sum X_k],

plus ``HIDE``/``UNHIDE`` bookkeeping pulses that park a qubit outside the
collective interaction (valid here because hidden qubits are always in |1>).

The compiler emits, for each supported family, a sequence that starts from
|1...1> and reproduces the family's native entangled state exactly; composing
with the family's correction table then yields the canonical graph state.
Pairwise couplings are sculpted from the all-to-all interaction by sign
refocusing: a Z(pi) pulse on qubit k flips every X_k X_b term of subsequent
MS pulses, so per-qubit sign vectors with prescribed inner products realize
any wanted coupling pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import core, graphs
from .core import CoreError, StateVector
from .graphs import GraphSpec


@dataclass(frozen=True)
class PulsePrimitive:
    kind: str                      # 'MS', 'ZROT', 'HIDE', 'UNHIDE', 'XROT_ALL'
    theta: float | None = None
    qubit: int | None = None
    active: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("MS", "ZROT", "HIDE", "UNHIDE", "XROT_ALL"):
            raise CoreError(f"unknown pulse kind {self.kind!r}")
        if self.active is not None:
            object.__setattr__(self, "active", tuple(sorted(set(self.active))))
        if self.kind == "MS" and (self.active is None or len(self.active) < 2):
            raise CoreError("MS pulse needs an active set of at least 2 qubits")
        if self.kind == "XROT_ALL" and (self.active is None or len(self.active) < 1):
            raise CoreError("XROT_ALL needs a non-empty active set")


def ms(theta: float, active) -> PulsePrimitive:
    return PulsePrimitive("MS", theta=float(theta), active=tuple(active))


def zrot(qubit: int, theta: float) -> PulsePrimitive:
    return PulsePrimitive("ZROT", theta=float(theta), qubit=int(qubit))


def hide(qubit: int) -> PulsePrimitive:
    return PulsePrimitive("HIDE", qubit=int(qubit))


def unhide(qubit: int) -> PulsePrimitive:
    return PulsePrimitive("UNHIDE", qubit=int(qubit))


def xrot_all(theta: float, active) -> PulsePrimitive:
    return PulsePrimitive("XROT_ALL", theta=float(theta), active=tuple(active))


@dataclass(frozen=True)
class PulseSequence:
    num_qubits: int
    primitives: tuple[PulsePrimitive, ...]

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        hidden: set[int] = set()
        for p in self.primitives:
            if p.qubit is not None and not 0 <= p.qubit < self.num_qubits:
                raise CoreError(f"pulse qubit {p.qubit} out of range")
            if p.active is not None and any(not 0 <= q < self.num_qubits for q in p.active):
                raise CoreError("pulse active set out of range")
            if p.kind == "HIDE":
                if p.qubit in hidden:
                    raise CoreError(f"qubit {p.qubit} already hidden")
                hidden.add(p.qubit)
            elif p.kind == "UNHIDE":
                if p.qubit not in hidden:
                    raise CoreError(f"qubit {p.qubit} is not hidden")
                hidden.remove(p.qubit)
            elif p.kind in ("MS", "XROT_ALL"):
                if hidden & set(p.active):
                    raise CoreError("pulse addresses a hidden qubit")
            elif p.kind == "ZROT":
                if p.qubit in hidden:
                    raise CoreError("Z rotation addresses a hidden qubit")
        if hidden:
            raise CoreError(f"unmatched HIDE for qubits {sorted(hidden)}")

    def __len__(self):
        return len(self.primitives)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        if self.num_qubits != other.num_qubits:
            raise CoreError("cannot concatenate sequences of different size")
        return PulseSequence(self.num_qubits, self.primitives + other.primitives)


@dataclass(frozen=True)
class PhysicalParams:
    """Lamb-Dicke parameter of a single ion, Rabi and detuning angular
    frequencies, and the ion count (eta scales as eta1/sqrt(n))."""

    eta1: float
    omega: float
    delta: float
    n_ions: int

    def __post_init__(self):
        if min(self.eta1, self.omega, self.delta) <= 0 or self.n_ions < 1:
            raise CoreError("physical parameters must be positive")


def theta_from_physics(p: PhysicalParams) -> float:
    """theta = pi eta^2 Omega^2 / delta^2 with eta = eta1/sqrt(n)."""
    eta = p.eta1 / math.sqrt(p.n_ions)
    return math.pi * eta ** 2 * p.omega ** 2 / p.delta ** 2


# --------------------------------------------------------------------------
# fast kernels
# --------------------------------------------------------------------------


def _hadamard_on(amps: np.ndarray, qubits, n: int) -> np.ndarray:
    out = amps
    for q in qubits:
        out = core._apply_raw(out, core.H, (q,), n)
    return out


def _ms_phases(theta: float, active, n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    m = np.zeros(2 ** n)
    for q in active:
        m += 1 - 2 * ((idx >> (n - 1 - q)) & 1)
    k = len(active)
    return np.exp(-1j * theta * (m * m - k) / 2)


def apply_ms(amps: np.ndarray, theta: float, active, n: int) -> np.ndarray:
    """exp[-i theta sum_{a<b in active} X_a X_b] |amps>; the coupling is
    diagonal in the X basis with eigenvalue (m^2 - k)/2, m the X-magnetization."""
    out = _hadamard_on(amps, active, n)
    out = out * _ms_phases(theta, active, n)
    return _hadamard_on(out, active, n)


def ms_unitary(theta: float, active, n: int) -> np.ndarray:
    active = tuple(sorted(set(int(a) for a in active)))
    if len(active) < 2:
        raise CoreError("MS interaction needs at least 2 active qubits")
    if any(not 0 <= a < n for a in active):
        raise CoreError("active qubit out of range")
    dim = 2 ** n
    u = np.eye(dim, dtype=complex)
    for col in range(dim):
        u[:, col] = apply_ms(np.ascontiguousarray(u[:, col]), theta, active, n)
    return u


def simulate_sequence(seq: PulseSequence, initial: StateVector) -> StateVector:
    """Apply primitives in order; hidden qubits are untouched spectators."""
    if initial.num_qubits != seq.num_qubits:
        raise CoreError("initial state size does not match sequence")
    n = seq.num_qubits
    amps = initial.amplitudes.copy()
    for p in seq.primitives:
        if p.kind == "MS":
            amps = apply_ms(amps, p.theta, p.active, n)
        elif p.kind == "ZROT":
            amps = core._apply_raw(amps, core.rz(p.theta), (p.qubit,), n)
        elif p.kind == "XROT_ALL":
            for q in p.active:
                amps = core._apply_raw(amps, core.rx(p.theta), (q,), n)
    return StateVector(n, amps)


def refocus_check(k: int, theta: float, n: int) -> bool:
    """Z_k-sandwich cancellation: Z_k MS(theta) Z_k MS(theta) equals the
    double-angle coupling on the complement of k, up to a global phase."""
    if not 0 <= k < n:
        raise CoreError("qubit out of range")
    active = tuple(range(n))
    u = ms_unitary(theta, active, n)
    dim = 2 ** n
    idx = np.arange(dim)
    signs = 1 - 2 * ((idx >> (n - 1 - k)) & 1)
    zmat = np.diag(signs.astype(complex))
    sandwich = zmat @ u @ zmat @ u
    rest = tuple(q for q in range(n) if q != k)
    if len(rest) >= 2:
        target = ms_unitary(2 * theta, rest, n)
    else:
        target = np.eye(dim, dtype=complex)
    ij = np.unravel_index(np.argmax(np.abs(target)), target.shape)
    phase = sandwich[ij] / target[ij]
    return bool(np.max(np.abs(sandwich - phase * target)) < 1e-9)


# --------------------------------------------------------------------------
# compiler
# --------------------------------------------------------------------------


def _walsh_rows(m: int) -> np.ndarray:
    """Rows of the order-m Hadamard sign matrix (m a power of two)."""
    rows = np.empty((m, m), dtype=int)
    for r in range(m):
        x = np.arange(m)
        rows[r] = 1 - 2 * _bit_parity(r & x)
    return rows


def _bit_parity(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v = v >> 1
    return out


def _refocused_coupling_pulses(sign_vectors: dict[int, np.ndarray], theta: float,
                               n: int) -> list[PulsePrimitive]:
    """Emit MS(theta) pulses interleaved with Z(pi) toggles so qubit q sees
    sign sign_vectors[q][j] during pulse j; net coupling on (a,b) is
    theta * <v_a, v_b>."""
    k = len(next(iter(sign_vectors.values())))
    cur = {q: 1 for q in range(n)}
    out: list[PulsePrimitive] = []
    for j in range(k):
        for q in range(n):
            want = int(sign_vectors[q][j])
            if want != cur[q]:
                out.append(zrot(q, math.pi))
                cur[q] = want
        out.append(ms(theta, range(n)))
    for q in range(n):
        if cur[q] != 1:
            out.append(zrot(q, math.pi))
    return out


def _bipartite_sign_vectors(n_mid: int) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Sign vectors realizing the K_{2,n} coupling pattern: ends A,B couple
    to every middle qubit with weight 2, all other pairs cancel."""
    m = 2
    while m < n_mid + 1:
        m *= 2
    rows = _walsh_rows(m)
    ones = rows[0]
    d = ones.copy()
    d[1:] = -1
    v_a = np.concatenate([ones, d])
    v_b = np.concatenate([d, -ones])
    v_mid = [np.concatenate([rows[i + 1], rows[i + 1]]) for i in range(n_mid)]
    return v_a, v_b, v_mid


def _euler_zxz(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u ~ Rz(c) Rx(b) Rz(a) up to global phase."""
    det = np.linalg.det(u)
    v = u / np.sqrt(det)
    cb = abs(v[0, 0])
    sb = abs(v[0, 1])
    b = 2 * math.atan2(sb, cb)
    if sb < 1e-12:
        return (-2 * np.angle(v[0, 0]), 0.0, 0.0)
    if cb < 1e-12:
        return (2 * (np.angle(v[0, 1]) + math.pi / 2), math.pi, 0.0)
    apc = -2 * np.angle(v[0, 0])       # a + c
    amc = 2 * (np.angle(v[0, 1]) + math.pi / 2)  # a - c
    return ((apc + amc) / 2, b, (apc - amc) / 2)


def _local_unitary_pulses(q: int, u: np.ndarray) -> list[PulsePrimitive]:
    a, b, c = _euler_zxz(u)
    out = []
    if abs(math.remainder(a, 2 * math.pi)) > 1e-12:
        out.append(zrot(q, a))
    if abs(math.remainder(b, 2 * math.pi)) > 1e-12:
        out.append(xrot_all(b, (q,)))
    if abs(math.remainder(c, 2 * math.pi)) > 1e-12:
        out.append(zrot(q, c))
    return out


def _degree_correction(degree: int) -> np.ndarray:
    """Entry of the generic correction mapping the pairwise-XX native state
    onto the CZ graph state: exp(i pi/4 deg Z) H X."""
    ph = np.diag([np.exp(1j * math.pi / 4 * degree), np.exp(-1j * math.pi / 4 * degree)])
    return ph @ core.H @ core.X


def _ecn_trailing(n: int) -> list[PulsePrimitive]:
    """Local pulses turning the pairwise-XX state of the EC topology into the
    reference native state (the one the EC correction table expects)."""
    table = graphs.table_ecn(n)
    g = graphs.ecn_graph(n)
    out: list[PulsePrimitive] = []
    for q in (0, n + 1):
        v = table.unitaries[q].conj().T @ _degree_correction(g.degree(q))
        out.extend(_local_unitary_pulses(q, v))
    return out


def compile_graph(family: str, n: int | None = None) -> PulseSequence:
    """Pulse program preparing the family's native entangled state from
    |1...1>.  Supported: GHZ(n), LC4, RC4, EC(n) for n in {1, 2, 3, 5}."""
    family = family.upper()
    if family.startswith("GHZ"):
        nq = int(family[3:]) if len(family) > 3 else int(n)
        if nq < 2:
            raise CoreError("GHZ needs at least 2 qubits")
        return PulseSequence(nq, (ms(math.pi / 4, range(nq)),))
    if family == "LC4":
        prim = [
            hide(0), hide(3),
            ms(math.pi / 4, (1, 2)),
            unhide(0), unhide(3),
            ms(math.pi / 8, range(4)),
            zrot(0, math.pi), zrot(1, math.pi),
            ms(math.pi / 8, range(4)),
            zrot(1, math.pi), zrot(3, math.pi),
        ]
        return PulseSequence(4, tuple(prim))
    if family == "RC4":
        # ring labelling: ends at vertices 0, 2 and middles at 1, 3
        v_a, v_b, v_mid = _bipartite_sign_vectors(2)
        vectors = {0: v_a, 1: v_mid[0], 2: v_b, 3: v_mid[1]}
        return PulseSequence(4, tuple(_refocused_coupling_pulses(vectors, math.pi / 8, 4)))
    if family.startswith("EC"):
        nn = int(family[2:]) if len(family) > 2 else int(n)
        if nn not in (1, 2, 3, 5):
            raise CoreError(f"EC compilation supports n in {{1,2,3,5}}, got {nn}")
        nq = nn + 2
        v_a, v_b, v_mid = _bipartite_sign_vectors(nn)
        vectors = {0: v_a, nq - 1: v_b}
        for i in range(nn):
            vectors[i + 1] = v_mid[i]
        prim = _refocused_coupling_pulses(vectors, math.pi / 8, nq)
        prim.extend(_ecn_trailing(nn))
        return PulseSequence(nq, tuple(prim))
    raise CoreError(f"unsupported family {family!r}")


def error_implementation_block(targets, theta: float, num_qubits: int) -> PulseSequence:
    """Fragment applying exp(+i theta X) on each target exactly (global
    carrier pulses sandwiching Z(pi) toggles on the targets)."""
    targets = tuple(sorted(set(int(t) for t in targets)))
    if not targets:
        raise CoreError("empty target set")
    if any(not 0 <= t < num_qubits for t in targets):
        raise CoreError("target out of range")
    everyone = tuple(range(num_qubits))
    prim = [xrot_all(-theta, everyone)]
    prim += [zrot(t, math.pi) for t in targets]
    prim += [xrot_all(theta, everyone)]
    prim += [zrot(t, math.pi) for t in targets]
    return PulseSequence(num_qubits, tuple(prim))


# --------------------------------------------------------------------------
# native-state references (closed forms, independent of the compiler)
# --------------------------------------------------------------------------


def pairwise_xx_state(g: GraphSpec) -> StateVector:
    """prod_{(a,b) in E} exp(-i pi/4 X_a X_b) |1...1>."""
    n = g.num_vertices
    amps = StateVector.all_ones(n).amplitudes.copy()
    for a, b in g.sorted_edges():
        amps = apply_ms(amps, math.pi / 4, (a, b), n)
    return StateVector(n, amps)


def native_lc4_state() -> StateVector:
    """Reference native state of the four-ion linear-cluster sequence."""
    coeff = {
        0b0000: 1, 0b0011: -1j, 0b0101: -1, 0b0110: -1j,
        0b1001: 1j, 0b1010: -1, 0b1100: -1j, 0b1111: -1,
    }
    amps = np.zeros(16, dtype=complex)
    for idx, c in coeff.items():
        amps[idx] = c / math.sqrt(8)
    return StateVector(4, amps)


def native_ecn_state(n: int) -> StateVector:
    """Reference native state of the EC-topology sequence (A, C_1..C_n, B)."""
    ket0 = np.array([1, 0], dtype=complex)
    ket1 = np.array([0, 1], dtype=complex)
    plus = (ket0 + ket1) / math.sqrt(2)
    minus = (ket0 - ket1) / math.sqrt(2)

    def nfold(v):
        out = np.array([1.0 + 0j])
        for _ in range(n):
            out = np.kron(out, v)
        return out

    zeros, ones = nfold(ket0), nfold(ket1)
    t1 = np.kron(-1j * np.kron(minus, zeros) + np.kron(plus, ones), minus)
    t2 = np.kron(np.kron(minus, ones) + 1j * np.kron(plus, zeros), plus)
    return StateVector(n + 2, (t1 + t2) / 2)


def native_state(family: str, n: int | None = None) -> StateVector:
    family = family.upper()
    if family.startswith("GHZ"):
        nq = int(family[3:]) if len(family) > 3 else int(n)
        amps = StateVector.all_ones(nq).amplitudes.copy()
        return StateVector(nq, apply_ms(amps, math.pi / 4, range(nq), nq))
    if family == "LC4":
        return native_lc4_state()
    if family == "RC4":
        return pairwise_xx_state(graphs.rc4_graph())
    if family.startswith("EC"):
        nn = int(family[2:]) if len(family) > 2 else int(n)
        return native_ecn_state(nn)
    raise CoreError(f"no native state for family {family!r}")


# --------------------------------------------------------------------------
# text serialization
# --------------------------------------------------------------------------


def dumps(seq: PulseSequence) -> str:
    lines = [f"NQUBITS {seq.num_qubits}"]
    for p in seq.primitives:
        if p.kind == "MS":
            lines.append(f"MS {p.theta!r} {','.join(map(str, p.active))}")
        elif p.kind == "ZROT":
            lines.append(f"Z {p.qubit} {p.theta!r}")
        elif p.kind == "HIDE":
            lines.append(f"HIDE {p.qubit}")
        elif p.kind == "UNHIDE":
            lines.append(f"UNHIDE {p.qubit}")
        elif p.kind == "XROT_ALL":
            lines.append(f"XALL {p.theta!r} {','.join(map(str, p.active))}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> PulseSequence:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("NQUBITS"):
        raise CoreError("pulse program must start with an NQUBITS line")
    n = int(lines[0].split()[1])
    prim = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "MS":
            prim.append(ms(float(parts[1]), (int(q) for q in parts[2].split(","))))
        elif parts[0] == "Z":
            prim.append(zrot(int(parts[1]), float(parts[2])))
        elif parts[0] == "HIDE":
            prim.append(hide(int(parts[1])))
        elif parts[0] == "UNHIDE":
            prim.append(unhide(int(parts[1])))
        elif parts[0] == "XALL":
            prim.append(xrot_all(float(parts[1]), (int(q) for q in parts[2].split(","))))
        else:
            raise CoreError(f"unknown pulse line {ln!r}")
    return PulseSequence(n, tuple(prim))


def save(seq: PulseSequence, path: str | Path) -> None:
    Path(path).write_text(dumps(seq))


def load(path: str | Path) -> PulseSequence:
    return loads(Path(path).read_text())
