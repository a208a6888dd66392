import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fock_space_matrix
from vqx.encoding import (FermionOperator, bravyi_kitaev, build_observables, decode_occupation, encode,
                          encode_occupation, encoding_matrix, jordan_wigner, ladder, molecular_fermion_operator,
                          number_op, qubit_hamiltonian)
from vqx.cases import H2
from vqx.integrals import molecular_problem
from vqx.pauli import PauliSum, PauliTerm, commutator_norm
from vqx.simulator import basis_state, expectation


def ps(d, n):
    return PauliSum(d, n)


class TestImages:
    def test_number_operator_jw(self):
        assert jordan_wigner(number_op(0), 2) == ps({"II": 0.5, "ZI": -0.5}, 2)

    def test_hopping_jw(self):
        hop = FermionOperator({((0, True), (1, False)): 1, ((1, True), (0, False)): 1})
        assert jordan_wigner(hop, 2) == ps({"XX": 0.5, "YY": 0.5}, 2)

    def test_identity(self):
        for enc in ("jw", "bk"):
            assert encode(FermionOperator.identity(), 4, enc) == PauliSum.identity(4)

    def test_mode_out_of_range(self):
        with pytest.raises(IndexError):
            jordan_wigner(ladder(5, True), 4)

    def test_bk_power_of_two(self):
        with pytest.raises(ValueError):
            encoding_matrix(3, "bk")

    def test_fenwick_matrix(self):
        B = encoding_matrix(4, "bk")
        np.testing.assert_array_equal(B, [[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 1]])

    @pytest.mark.parametrize("enc", ["jw", "bk"])
    def test_canonical_anticommutation(self, enc):
        n = 4
        a = [encode(ladder(p, False), n, enc).matrix() for p in range(n)]
        ad = [encode(ladder(p, True), n, enc).matrix() for p in range(n)]
        for p, q in itertools.product(range(n), repeat=2):
            np.testing.assert_allclose(a[p] @ ad[q] + ad[q] @ a[p], np.eye(16) * (p == q), atol=1e-12)
            np.testing.assert_allclose(a[p] @ a[q] + a[q] @ a[p], 0, atol=1e-12)

    @pytest.mark.parametrize("occ", ["".join(b) for b in itertools.product("01", repeat=4)])
    def test_encoded_occupation_is_number_eigenstate(self, occ):
        ket = encode_occupation(occ, "bk")
        assert decode_occupation(ket, "bk") == occ
        s = basis_state(ket)
        for p in range(4):
            assert expectation(s, encode(number_op(p), 4, "bk")) == pytest.approx(int(occ[p]))


class TestMolecular:
    def test_fifteen_terms(self, h2_problem):
        H = qubit_hamiltonian(h2_problem, "jw")
        assert len(H) == 15
        M = fock_space_matrix(h2_problem.h, h2_problem.g, h2_problem.e_nuc)
        np.testing.assert_allclose(np.linalg.eigvalsh(H.matrix()), np.linalg.eigvalsh(M), atol=1e-12)

    def test_bk_term_structure(self, h2_problem):
        # standard BK form: I, Z0, Z1, Z2, Z0Z1, Z0Z2, Z1Z3, X0Z1X2, Y0Z1Y2, Z0Z1Z2,
        # Z0Z2Z3, Z1Z2Z3, X0Z1X2Z3, Y0Z1Y2Z3, Z0Z1Z2Z3
        expected = {"IIII", "ZIII", "IZII", "IIZI", "ZZII", "ZIZI", "IZIZ", "XZXI", "YZYI", "ZZZI",
                    "ZIZZ", "IZZZ", "XZXZ", "YZYZ", "ZZZZ"}
        H = qubit_hamiltonian(h2_problem, "bk")
        assert {t.axes for t in H} == expected
        # paired coefficients of the standard form
        assert H.coefficient("XZXI") == pytest.approx(H.coefficient("YZYI"))
        assert H.coefficient("ZIII") == pytest.approx(H.coefficient("ZZII"))
        assert H.coefficient("ZIZI") == pytest.approx(H.coefficient("ZIZZ"))

    def test_reference_initial_kets(self):
        got = [encode_occupation(s.occupation, "bk") for s in H2.states]
        assert got == ["1000", "0110", "1100", "0010"]

    @pytest.mark.parametrize("r", [0.5, 0.7, 1.0, 1.5, 2.0])
    def test_isospectral(self, r):
        p = molecular_problem(H2.geometry(r))
        e_jw = np.linalg.eigvalsh(qubit_hamiltonian(p, "jw").matrix())
        e_bk = np.linalg.eigvalsh(qubit_hamiltonian(p, "bk").matrix())
        np.testing.assert_allclose(e_jw, e_bk, atol=1e-10)

    @pytest.mark.parametrize("enc", ["jw", "bk"])
    def test_symmetries_commute(self, h2_problem, heh_08, enc):
        obs = build_observables(2, enc)
        for prob in (h2_problem, heh_08):
            H = qubit_hamiltonian(prob, enc)
            for O in (obs.number, obs.sz, obs.s2):
                assert commutator_norm(H, O) < 1e-8


hermitian_fermion = st.lists(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=5)


class TestProperties:
    @given(hermitian_fermion)
    def test_jw_bk_isospectral(self, items):
        f = FermionOperator(n_modes=4)
        for p, q, re, im in items:
            f.add(((p, True), (q, False)), complex(re, im))
            f.add(((q, True), (p, False)), complex(re, -im))
        e1 = np.linalg.eigvalsh(jordan_wigner(f, 4).matrix())
        e2 = np.linalg.eigvalsh(bravyi_kitaev(f, 4).matrix())
        np.testing.assert_allclose(e1, e2, atol=1e-10)

    @pytest.mark.parametrize("enc", ["jw", "bk"])
    def test_number_spectrum(self, enc):
        vals = np.linalg.eigvalsh(build_observables(2, enc).number.matrix())
        np.testing.assert_allclose(sorted(set(np.round(vals, 10))), [0, 1, 2, 3, 4])


class TestObservables:
    def test_number_on_1100(self, obs_jw):
        assert expectation(basis_state("1100"), obs_jw.number) == pytest.approx(2)

    def test_open_shell_singlet_and_triplet(self, obs_jw):
        amps = np.zeros(16, complex)
        amps[0b1001], amps[0b0110] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        from vqx.simulator import StateVector

        assert expectation(StateVector(amps), obs_jw.s2) == pytest.approx(0, abs=1e-12)
        amps[0b0110] *= -1
        assert expectation(StateVector(amps), obs_jw.s2) == pytest.approx(2)

    @pytest.mark.parametrize("ket", ["1000", "0100", "0010", "0001"])
    def test_one_electron_doublet(self, obs_jw, ket):
        assert expectation(basis_state(ket), obs_jw.s2) == pytest.approx(0.75)
