import itertools

import numpy as np
import pytest

from ionmbqc import core, graphs, pulses
from ionmbqc.core import CoreError, DensityMatrix, StateVector, fidelity
from ionmbqc.graphs import (
    GraphSpec,
    apply_correction_table,
    bell_expectation,
    bell_operator_matrix,
    build_graph_state,
    ec3_lc_equivalence,
    ecn_graph,
    ghz_graph,
    lc4_graph,
    lhv_bound,
    rc4_graph,
    read_edge_list,
    reinterpret_pauli_setting,
    stabilizer_generators,
    stabilizer_group,
    table_ecn,
    table_ghz,
    table_lc4,
    table_rc4,
    write_edge_list,
)
from ionmbqc.pauli import PauliString

from conftest import random_density

FAMILIES = [lc4_graph(), rc4_graph(), ecn_graph(1), ecn_graph(3), ecn_graph(5)]

# the sixteen signed stabilizer terms of the four-qubit linear cluster
LC4_GROUP = {
    ("I", "I", "I", "I"): 1, ("X", "Z", "I", "I"): 1, ("Z", "X", "Z", "I"): 1,
    ("I", "Z", "X", "Z"): 1, ("I", "I", "Z", "X"): 1, ("Y", "Y", "Z", "I"): 1,
    ("X", "I", "X", "Z"): 1, ("X", "Z", "Z", "X"): 1, ("Z", "Y", "Y", "Z"): 1,
    ("Z", "X", "I", "X"): 1, ("I", "Z", "Y", "Y"): 1, ("Z", "Y", "X", "Y"): -1,
    ("X", "I", "Y", "Y"): 1, ("Y", "Y", "I", "X"): 1, ("Y", "X", "Y", "Z"): -1,
    ("Y", "X", "X", "Y"): 1,
}


class TestGraphSpec:
    def test_rejects_self_loop(self):
        with pytest.raises(CoreError):
            GraphSpec.from_edges(2, [(0, 0)])

    def test_rejects_missing_vertex(self):
        with pytest.raises(CoreError):
            GraphSpec.from_edges(2, [(0, 3)])

    def test_neighbors(self):
        g = lc4_graph()
        assert g.neighbors(1) == (0, 2)
        assert g.degree(0) == 1

    def test_edge_list_round_trip(self, tmp_path):
        g = ecn_graph(3)
        path = tmp_path / "g.txt"
        write_edge_list(g, path)
        back = read_edge_list(path, family="EC3")
        assert back.num_vertices == g.num_vertices
        assert back.edges == g.edges


class TestBuildGraphState:
    def test_single_vertex_is_plus(self):
        g = GraphSpec.from_edges(1, [])
        out = build_graph_state(g)
        np.testing.assert_allclose(out.amplitudes, StateVector.plus(1).amplitudes, atol=1e-12)

    def test_single_edge(self):
        g = GraphSpec.from_edges(2, [(0, 1)])
        expected = np.array([1, 1, 1, -1], dtype=complex) / 2
        np.testing.assert_allclose(build_graph_state(g).amplitudes, expected, atol=1e-12)

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.family)
    def test_stabilizer_eigenvalue_property(self, g):
        state = build_graph_state(g)
        for k in stabilizer_generators(g):
            assert k.expectation(state) == pytest.approx(1.0, abs=1e-10)

    def test_cz_order_independence(self, rng):
        g = ecn_graph(3)
        ref = build_graph_state(g)
        edges = list(g.sorted_edges())
        rng.shuffle(edges)
        state = StateVector.plus(g.num_vertices)
        for a, b in edges:
            state = core.apply_unitary(state, core.CZ, (a, b))
        assert fidelity(state, ref) == pytest.approx(1.0, abs=1e-12)

    def test_lc4_stabilized_by_full_group(self):
        state = build_graph_state(lc4_graph())
        for letters, sign in LC4_GROUP.items():
            term = PauliString(sign, letters)
            assert term.expectation(state) == pytest.approx(1.0, abs=1e-10)


class TestStabilizerGroup:
    def test_single_vertex(self):
        grp = stabilizer_group(GraphSpec.from_edges(1, []))
        assert {str(s) for s in grp.group} == {"+I", "+X"}

    def test_two_vertex_edge(self):
        # by hand: K1=XZ, K2=ZX, K1 K2 = (XZ)(ZX) = YY
        grp = stabilizer_group(GraphSpec.from_edges(2, [(0, 1)]))
        assert {str(s) for s in grp.group} == {"+II", "+XZ", "+ZX", "+YY"}

    def test_lc4_sixteen_terms_with_signs(self):
        grp = stabilizer_group(lc4_graph())
        assert len(grp.group) == 16
        got = {s.letters: s.phase for s in grp.group}
        for letters, sign in LC4_GROUP.items():
            assert got[letters] == sign, letters

    def test_group_closure(self):
        grp = stabilizer_group(rc4_graph())
        elems = {(s.phase, s.letters) for s in grp.group}
        for a, b in itertools.islice(itertools.product(grp.group, repeat=2), 64):
            p = a * b
            assert (p.phase, p.letters) in elems


class TestBell:
    def test_ideal_lc4(self):
        rep = bell_expectation(build_graph_state(lc4_graph()), lc4_graph())
        assert rep.expectation == pytest.approx(1.0, abs=1e-10)
        assert rep.lhv_bound == 0.75
        assert rep.violated

    def test_maximally_mixed(self):
        rep = bell_expectation(DensityMatrix.maximally_mixed(4), lc4_graph())
        assert rep.expectation == pytest.approx(1 / 16, abs=1e-12)
        assert not rep.violated

    def test_ideal_ec5(self):
        g = ecn_graph(5)
        rep = bell_expectation(build_graph_state(g), g)
        assert rep.expectation == pytest.approx(1.0, abs=1e-10)
        assert rep.lhv_bound == 0.625

    def test_bounds_table(self):
        assert lhv_bound(lc4_graph()) == 0.75
        assert lhv_bound(rc4_graph()) == 0.75
        assert lhv_bound(ecn_graph(1)) == 0.75
        assert lhv_bound(ecn_graph(3)) == 0.75
        assert lhv_bound(ecn_graph(5)) == 0.625
        with pytest.raises(CoreError):
            lhv_bound(GraphSpec.from_edges(3, [(0, 1)]))

    def test_expectation_equals_fidelity_random_mixed(self, rng):
        g = ecn_graph(1)
        target = build_graph_state(g)
        for _ in range(50):
            rho = random_density(rng, 3)
            rep = bell_expectation(rho, g)
            assert rep.expectation == pytest.approx(fidelity(rho, target), abs=1e-10)

    @pytest.mark.parametrize("g", FAMILIES + [ghz_graph(5)], ids=lambda g: g.family)
    def test_projector_identity(self, g):
        state = build_graph_state(g)
        proj = np.outer(state.amplitudes, state.amplitudes.conj())
        np.testing.assert_allclose(bell_operator_matrix(g), proj, atol=1e-10)


class TestCorrectionTables:
    def test_identity_table_unchanged(self, rng):
        from conftest import random_state

        table = graphs.CorrectionTable(((), (), ()))
        psi = random_state(rng, 3)
        out = apply_correction_table(psi, table)
        assert fidelity(out, psi) == pytest.approx(1.0, abs=1e-12)

    def test_lc4_table_on_native_state(self):
        out = apply_correction_table(pulses.native_lc4_state(), table_lc4())
        assert fidelity(out, build_graph_state(lc4_graph())) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_ecn_table_on_native_state(self, n):
        out = apply_correction_table(pulses.native_ecn_state(n), table_ecn(n))
        assert fidelity(out, build_graph_state(ecn_graph(n))) == pytest.approx(1.0, abs=1e-10)

    def test_rc4_table_on_native_state(self):
        out = apply_correction_table(pulses.native_state("RC4"), table_rc4())
        assert fidelity(out, build_graph_state(rc4_graph())) == pytest.approx(1.0, abs=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(CoreError):
            apply_correction_table(StateVector.plus(2), table_lc4())

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_ghz_table_is_clifford_and_correct(self, n):
        native = pulses.native_state("GHZ", n)
        out = apply_correction_table(native, table_ghz(n))
        assert fidelity(out, build_graph_state(ghz_graph(n))) == pytest.approx(1.0, abs=1e-10)


class TestReinterpretation:
    def test_identity_table(self):
        table = graphs.CorrectionTable(((), (), (), ()))
        setting = PauliString.from_str("XZYX")
        assert reinterpret_pauli_setting(setting, table) == setting

    def test_hadamard_table_swaps_x_z(self):
        table = graphs.CorrectionTable((("H",), ("H",)))
        out = reinterpret_pauli_setting(PauliString.from_str("XZ"), table)
        assert out.letters == ("Z", "X")

    def test_contract_on_random_states(self, rng):
        # <E|P'|E> must equal <corrected|P|corrected> for any state E
        from conftest import random_state

        table = table_lc4()
        for letters in [("Z", "Z", "X", "X"), ("X", "Y", "Z", "I"), ("Y", "Y", "Y", "Y")]:
            p = PauliString.from_str("".join(letters))
            p_prime = reinterpret_pauli_setting(p, table)
            for _ in range(5):
                e = random_state(rng, 4)
                corrected = apply_correction_table(e, table)
                assert p_prime.expectation(e) == pytest.approx(
                    p.expectation(corrected), abs=1e-10
                )

    def test_zzxx_reinterpretation_is_frozen(self):
        # the basis letters the uncorrected state must be measured in
        out = reinterpret_pauli_setting(PauliString.from_str("ZZXX"), table_lc4())
        assert out.letters == ("X", "X", "Z", "Y")


class TestLCEquivalence:
    def test_ec3_maps_to_star_plus_pendant(self):
        us, target_graph = ec3_lc_equivalence()
        state = build_graph_state(ecn_graph(3))
        for q, u in enumerate(us):
            state = core.apply_unitary(state, u, (q,))
        assert fidelity(state, build_graph_state(target_graph)) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_unitaries_are_single_qubit_cliffords(self):
        us, _ = ec3_lc_equivalence()
        for u in us:
            for p in (core.X, core.Z):
                m = u @ p @ u.conj().T
                from ionmbqc.pauli import match_single_pauli

                match_single_pauli(m)  # raises if not a Pauli
