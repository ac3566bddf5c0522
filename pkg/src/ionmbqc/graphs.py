"""Graphs, graph states, stabilizer machinery, Bell operators, and the
local-unitary correction tables that map ion-native entangled states onto
canonical CZ-built graph states.

Canonical construction: every vertex starts in |+> and one CZ is applied per
edge.  Stabilizer generators are K_a = X_a prod_{b in N(a)} Z_b; their 2^n
products form the stabilizer group, whose normalized sum equals the projector
onto the graph state and doubles as the Bell operator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import core
from .core import CZ, H, RXM, RXP, X, Y, Z, CoreError, State, StateVector
from .pauli import PauliString, conjugate_by_locals

MAX_GROUP_QUBITS = 12

# Bell-operator bounds attainable by local hidden-variable models, keyed by
# family tag.  These are cited constants, not computed quantities.
LHV_BOUNDS = {
    "LC4": 0.75,
    "RC4": 0.75,
    "EC1": 0.75,
    "EC2": 0.75,
    "EC3": 0.75,
    "EC5": 0.625,
}


@dataclass(frozen=True)
class GraphSpec:
    """Vertices 0..n-1 plus an undirected edge set and an optional family tag."""

    num_vertices: int
    edges: frozenset[tuple[int, int]]
    family: str | None = None

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise CoreError(f"self-loop at vertex {a}")
            if not (0 <= a < self.num_vertices and 0 <= b < self.num_vertices):
                raise CoreError(f"edge ({a},{b}) references a missing vertex")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, num_vertices, edges, family=None) -> "GraphSpec":
        return cls(num_vertices, frozenset((a, b) for a, b in edges), family)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted({b if a == v else a for a, b in self.edges if v in (a, b)}))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def remove_vertex(self, v: int) -> "GraphSpec":
        """Graph with vertex v deleted and the remainder renumbered."""
        remap = {old: new for new, old in enumerate(q for q in range(self.num_vertices) if q != v)}
        edges = {(remap[a], remap[b]) for a, b in self.edges if v not in (a, b)}
        return GraphSpec.from_edges(self.num_vertices - 1, edges)


def lc4_graph() -> GraphSpec:
    return GraphSpec.from_edges(4, [(0, 1), (1, 2), (2, 3)], "LC4")


def rc4_graph() -> GraphSpec:
    return GraphSpec.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)], "RC4")


def ecn_graph(n: int) -> GraphSpec:
    """Input qubit A=0, codeword C_1..C_n = 1..n, output B = n+1."""
    if n < 1:
        raise CoreError("ECn requires n >= 1")
    edges = [(0, i) for i in range(1, n + 1)] + [(i, n + 1) for i in range(1, n + 1)]
    return GraphSpec.from_edges(n + 2, edges, f"EC{n}")


def ghz_graph(n: int) -> GraphSpec:
    """Star graph: vertex 0 joined to all others."""
    if n < 2:
        raise CoreError("GHZ requires n >= 2")
    return GraphSpec.from_edges(n, [(0, i) for i in range(1, n)], f"GHZ{n}")


def family_graph(family: str, n: int | None = None) -> GraphSpec:
    family = family.upper()
    if family == "LC4":
        return lc4_graph()
    if family == "RC4":
        return rc4_graph()
    if family == "EC":
        return ecn_graph(int(n))
    if family == "GHZ":
        return ghz_graph(int(n))
    if family.startswith("EC"):
        return ecn_graph(int(family[2:]))
    if family.startswith("GHZ"):
        return ghz_graph(int(family[3:]))
    raise CoreError(f"unknown graph family {family!r}")


def write_edge_list(g: GraphSpec, path: str | Path) -> None:
    lines = [str(g.num_vertices)] + [f"{a} {b}" for a, b in g.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path, family: str | None = None) -> GraphSpec:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    n = int(lines[0])
    edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    return GraphSpec.from_edges(n, edges, family)


def build_graph_state(g: GraphSpec) -> StateVector:
    """|G> = prod_edges CZ |+>^n; satisfies K_a|G> = +|G> for all a."""
    state = StateVector.plus(g.num_vertices)
    for a, b in g.sorted_edges():
        state = core.apply_unitary(state, CZ, (a, b))
    return state


def stabilizer_generators(g: GraphSpec) -> list[PauliString]:
    gens = []
    for a in range(g.num_vertices):
        letters = ["I"] * g.num_vertices
        letters[a] = "X"
        for b in g.neighbors(a):
            letters[b] = "Z"
        gens.append(PauliString(1, tuple(letters)))
    return gens


@dataclass(frozen=True)
class StabilizerSet:
    generators: tuple[PauliString, ...]
    group: tuple[PauliString, ...]


def stabilizer_group(g: GraphSpec) -> StabilizerSet:
    """All 2^n signed products of the generators, deduplicated."""
    if g.num_vertices > MAX_GROUP_QUBITS:
        raise CoreError(f"stabilizer group of {g.num_vertices} qubits exceeds the size limit")
    gens = stabilizer_generators(g)
    elements = {}
    for picks in itertools.product((0, 1), repeat=len(gens)):
        p = PauliString.identity(g.num_vertices)
        for gen, take in zip(gens, picks):
            if take:
                p = p * gen
        elements[(p.phase, p.letters)] = p
    if len(elements) != 2 ** g.num_vertices:
        raise CoreError("stabilizer group is degenerate")
    return StabilizerSet(tuple(gens), tuple(elements.values()))


@dataclass(frozen=True)
class BellReport:
    graph: GraphSpec
    expectation: float
    lhv_bound: float
    violated: bool


def lhv_bound(g: GraphSpec) -> float:
    if g.family is None or g.family.upper() not in LHV_BOUNDS:
        raise CoreError(f"no cited LHV bound for family {g.family!r}")
    return LHV_BOUNDS[g.family.upper()]


def bell_expectation(state: State, g: GraphSpec) -> BellReport:
    """Mean of the 2^n stabilizer expectation values, with the cited bound."""
    if state.num_qubits != g.num_vertices:
        raise CoreError("state and graph dimensions differ")
    grp = stabilizer_group(g)
    mean = sum(s.expectation(state) for s in grp.group) / len(grp.group)
    bound = lhv_bound(g)
    return BellReport(g, float(mean), bound, bool(mean > bound))


def bell_operator_matrix(g: GraphSpec) -> np.ndarray:
    grp = stabilizer_group(g)
    dim = 2 ** g.num_vertices
    acc = np.zeros((dim, dim), dtype=complex)
    for s in grp.group:
        acc += s.to_matrix()
    return acc / len(grp.group)


# --------------------------------------------------------------------------
# correction tables
# --------------------------------------------------------------------------

_FACTORS = {"H": H, "X": X, "Z": Z, "RXP": RXP, "RXM": RXM}


def _product(names: tuple[str, ...]) -> np.ndarray:
    """Operator product; rightmost factor acts first."""
    u = np.eye(2, dtype=complex)
    for name in names:
        u = u @ _FACTORS[name]
    return u


def _is_single_clifford(u: np.ndarray) -> bool:
    for p in (X, Z):
        m = u @ p @ u.conj().T
        ok = False
        for q in (X, Y, Z):
            ph = np.trace(q.conj().T @ m) / 2
            if abs(abs(ph) - 1) < 1e-8 and np.max(np.abs(m - ph * q)) < 1e-8:
                ok = True
                break
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class CorrectionTable:
    """Per-qubit single-qubit Clifford corrections, stored both as factor
    words (rightmost factor applied first) and as explicit matrices."""

    words: tuple[tuple[str, ...], ...]
    unitaries: tuple[np.ndarray, ...] = field(default=None)

    def __post_init__(self):
        us = tuple(_product(w) for w in self.words)
        object.__setattr__(self, "unitaries", us)
        for u in us:
            if not _is_single_clifford(u):
                raise CoreError("correction entry is not a Clifford operation")

    def __len__(self):
        return len(self.words)


def table_lc4() -> CorrectionTable:
    return CorrectionTable((
        ("H", "Z", "RXM"),
        ("H", "Z", "X"),
        ("H", "Z"),
        ("H", "RXM"),
    ))


def table_ecn(n: int) -> CorrectionTable:
    end = ("H", "RXP", "Z")
    return CorrectionTable((end,) + (("H",),) * n + (end,))


def table_rc4() -> CorrectionTable:
    return CorrectionTable((
        ("H", "X", "Z"),
        ("H", "X"),
        ("H", "X"),
        ("H", "X", "Z"),
    ))


def table_ghz(n: int) -> CorrectionTable:
    """Maps the collective-interaction GHZ-class state onto the star graph
    state: qubit 0 gets RXM after the degree correction, leaves absorb one
    extra quarter Z turn."""
    # e^{i pi/4 k Z} = H RXP^k H, so e^{i pi/4 k Z} H X == H RXP^k X
    center = ("RXM", "H") + ("RXP",) * ((n - 1) % 8) + ("X",)
    leaf = ("H",) + ("RXP",) * (n % 8) + ("X",)
    return CorrectionTable((center,) + (leaf,) * (n - 1))


def table_for_family(family: str, n: int | None = None) -> CorrectionTable:
    family = family.upper()
    if family == "LC4":
        return table_lc4()
    if family == "RC4":
        return table_rc4()
    if family.startswith("EC"):
        return table_ecn(int(family[2:]) if n is None else int(n))
    if family.startswith("GHZ"):
        return table_ghz(int(family[3:]) if n is None else int(n))
    raise CoreError(f"no correction table for family {family!r}")


def apply_correction_table(state: StateVector, table: CorrectionTable) -> StateVector:
    if len(table) != state.num_qubits:
        raise CoreError("table length does not match qubit count")
    out = state
    for q, u in enumerate(table.unitaries):
        out = core.apply_unitary(out, u, (q,))
    return out


def reinterpret_pauli_setting(setting: PauliString, table: CorrectionTable) -> PauliString:
    """Setting P' with <E|P'|E> = <C|P|C> where C is the corrected state,
    i.e. P' = U^dag P U per qubit."""
    if len(table) != setting.num_qubits:
        raise CoreError("table length does not match setting length")
    return conjugate_by_locals(setting, list(table.unitaries))


# --------------------------------------------------------------------------
# local complementation and the EC3 ring/star equivalence
# --------------------------------------------------------------------------


def local_complement(g: GraphSpec, v: int) -> GraphSpec:
    """Toggle every edge inside the neighborhood of v."""
    nb = g.neighbors(v)
    edges = set(g.edges)
    for a, b in itertools.combinations(nb, 2):
        e = (min(a, b), max(a, b))
        if e in edges:
            edges.remove(e)
        else:
            edges.add(e)
    return GraphSpec.from_edges(g.num_vertices, edges)


def local_complement_unitaries(g: GraphSpec, v: int) -> list[np.ndarray]:
    """Single-qubit Cliffords sending |G> to |local_complement(G, v)>."""
    us = [np.eye(2, dtype=complex) for _ in range(g.num_vertices)]
    us[v] = RXM  # exp(-i pi/4 X)
    sq = np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)])  # exp(+i pi/4 Z)
    for b in g.neighbors(v):
        us[b] = sq
    return us


def ec3_lc_graph() -> GraphSpec:
    """Star centred on C1 with leaves {A, C2, C3}, plus pendant B on A."""
    return GraphSpec.from_edges(5, [(1, 0), (1, 2), (1, 3), (0, 4)], "EC3LC")


def ec3_lc_equivalence() -> tuple[list[np.ndarray], GraphSpec]:
    """Explicit per-qubit Cliffords mapping |EC3> onto the star-plus-pendant
    graph state, found by composing local complementations at C1, A, C1."""
    g = ecn_graph(3)
    total = [np.eye(2, dtype=complex) for _ in range(5)]
    for v in (1, 0, 1):
        us = local_complement_unitaries(g, v)
        total = [u @ t for u, t in zip(us, total)]
        g = local_complement(g, v)
    if set(g.edges) != set(ec3_lc_graph().edges):
        raise CoreError("local complementation sequence did not produce the expected graph")
    return total, ec3_lc_graph()
