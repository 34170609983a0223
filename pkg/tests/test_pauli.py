import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clusterbell import qstate
from clusterbell.pauli import (
    PauliAxis,
    PauliString,
    apply,
    conjugate_by_hadamard,
    enumerate_stabilizers,
    expectation,
    group_closure,
    multiply,
)

from conftest import dense_expectation, dense_pauli

pauli_words = st.text(alphabet="IXYZ", min_size=4, max_size=4)
phases = st.integers(min_value=0, max_value=3)


def ps(text):
    return PauliString.parse(text)


class TestParsing:
    @pytest.mark.parametrize("text", ["XYYX", "-IZYY", "iXY", "-iZZZ", "I", "-XIZY"])
    def test_round_trip(self, text):
        assert str(ps(text)) == text

    def test_zero_alias_for_identity(self):
        assert ps("0ZXX") == ps("IZXX")
        assert str(ps("0ZXX")) == "IZXX"

    def test_plus_prefix(self):
        assert ps("+XYYX") == ps("XYYX")

    @pytest.mark.parametrize("bad", ["", "XQ", "--X", "x", "i"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            ps(bad)

    def test_axis_enum(self):
        assert [a.value for a in PauliAxis] == ["I", "X", "Y", "Z"]


class TestMultiply:
    def test_xy_is_iz(self):
        assert multiply(ps("X"), ps("Y")) == PauliString((PauliAxis.Z,), 1)

    def test_identity(self):
        assert multiply(ps("IIII"), ps("XYYX")) == ps("XYYX")

    def test_matches_dense_product(self):
        prod = multiply(ps("ZYYZ"), ps("ZYXY"))
        np.testing.assert_allclose(
            prod.to_matrix(), dense_pauli("ZYYZ") @ dense_pauli("ZYXY"), atol=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            multiply(ps("XX"), ps("X"))

    @given(pauli_words, phases, pauli_words, phases)
    def test_matches_dense_product_everywhere(self, a, pa, b, pb):
        p, q = PauliString.parse(a), PauliString.parse(b)
        p, q = PauliString(p.axes, pa), PauliString(q.axes, pb)
        np.testing.assert_allclose(
            multiply(p, q).to_matrix(), p.to_matrix() @ q.to_matrix(), atol=1e-12
        )

    @given(pauli_words, pauli_words, pauli_words)
    def test_associative(self, a, b, c):
        p, q, r = ps(a), ps(b), ps(c)
        assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))

    @given(pauli_words, st.sampled_from([0, 2]))
    def test_hermitian_strings_square_to_identity(self, a, phase):
        p = PauliString(ps(a).axes, phase)
        assert multiply(p, p) == PauliString.identity(4)

    @given(pauli_words, st.sampled_from([0, 2]))
    def test_matrix_unitary_and_hermitian(self, a, phase):
        m = PauliString(ps(a).axes, phase).to_matrix()
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
        np.testing.assert_allclose(m @ m.conj().T, np.eye(16), atol=1e-12)


@pytest.mark.usefixtures("backend")
class TestApplyAndExpectation:
    def test_x_flips_zero(self):
        out = apply(ps("X"), qstate.basis_state("0"))
        np.testing.assert_allclose(out.vector, [0, 1])

    def test_identity_string(self, rng):
        s = qstate.random_state(4, rng)
        np.testing.assert_allclose(apply(ps("IIII"), s).vector, s.vector)

    def test_xyyx_stabilizes_target(self):
        s = qstate.target_cluster()
        np.testing.assert_allclose(apply(ps("XYYX"), s).vector, s.vector, atol=1e-12)

    def test_norm_preserved(self, rng):
        s = qstate.random_state(4, rng)
        for w in ("XYZI", "YYYY", "-ZIXY"):
            assert np.linalg.norm(apply(ps(w), s).vector) == pytest.approx(1.0, abs=1e-12)

    def test_apply_mixed_matches_dense(self, rng):
        s = qstate.apply_white_noise(qstate.random_state(4, rng), 0.3)
        m = dense_pauli("XYZI")
        np.testing.assert_allclose(
            apply(ps("XYZI"), s).data, m @ s.data @ m.conj().T, atol=1e-12
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply(ps("XX"), qstate.basis_state("000"))
        with pytest.raises(ValueError):
            expectation(qstate.basis_state("000"), ps("XX"))

    def test_izyy_on_target_is_minus_one(self):
        assert expectation(qstate.target_cluster(), ps("0ZYY")) == pytest.approx(-1.0, abs=1e-12)

    def test_z_on_all_zero(self):
        assert expectation(qstate.basis_state("0000"), ps("ZIII")) == 1.0

    def test_ghz_izxx_against_dense(self):
        g = qstate.ghz(4)
        oracle = dense_expectation(g.vector, "IZXX").real
        assert oracle == pytest.approx(0.0, abs=1e-12)
        assert expectation(g, ps("IZXX")) == pytest.approx(oracle, abs=1e-12)

    def test_rejects_imaginary_phase(self):
        with pytest.raises(ValueError, match="Hermitian"):
            expectation(qstate.target_cluster(), ps("iXYYX"))

    def test_negative_phase(self):
        assert expectation(qstate.target_cluster(), ps("-IZYY")) == pytest.approx(1.0)

    def test_expectations_bounded(self, rng):
        states = [qstate.random_state(4, rng) for _ in range(5)]
        states.append(qstate.apply_white_noise(states[0], 0.7))
        for s in states:
            for w in itertools.product("IXYZ", repeat=4):
                e = expectation(s, PauliString(w))
                assert -1 - 1e-12 <= e <= 1 + 1e-12


@pytest.mark.usefixtures("backend")
class TestStabilizers:
    def test_linear_cluster_census(self):
        stabs = dict((str(p), s) for p, s in enumerate_stabilizers(qstate.linear_cluster(4)))
        assert len(stabs) == 15
        assert {k: stabs[k] for k in ("ZYYZ", "ZYXY", "IZXZ", "IZYY")} == {
            "ZYYZ": 1, "ZYXY": -1, "IZXZ": 1, "IZYY": 1,
        }

    def test_target_census(self):
        stabs = dict((str(p), s) for p, s in enumerate_stabilizers(qstate.target_cluster()))
        assert len(stabs) == 15
        assert {k: stabs[k] for k in ("XYYX", "XYXY", "IZXX", "IZYY")} == {
            "XYYX": 1, "XYXY": 1, "IZXX": 1, "IZYY": -1,
        }

    def test_single_qubit_zero(self):
        assert [(str(p), s) for p, s in enumerate_stabilizers(qstate.basis_state("0"))] == [("Z", 1)]

    def test_group_closure_and_sign_consistency(self):
        stabs = enumerate_stabilizers(qstate.linear_cluster(4))
        signed = [PauliString(p.axes, 0 if s == 1 else 2) for p, s in stabs]
        group = set(signed) | {PauliString.identity(4)}
        assert len(group) == 16
        for a in group:
            for b in group:
                # sign of the product must be the product of the signs
                assert multiply(a, b) in group
        assert group_closure(signed) == group

    def test_every_stabilizer_fixes_state(self):
        s = qstate.linear_cluster(4)
        for p, sign in enumerate_stabilizers(s):
            np.testing.assert_allclose(dense_pauli(str(p)) @ s.vector, sign * s.vector, atol=1e-12)

    def test_mixed_rejected(self):
        with pytest.raises(ValueError):
            enumerate_stabilizers(qstate.apply_white_noise(qstate.ghz(2), 0.5))

    def test_bell_state(self):
        assert len(enumerate_stabilizers(qstate.ghz(2))) == 3


class TestHadamardConjugation:
    def test_zyyz(self):
        assert conjugate_by_hadamard(ps("ZYYZ"), {1, 4}) == ps("XYYX")

    def test_izyy_picks_up_sign(self):
        assert conjugate_by_hadamard(ps("IZYY"), {1, 4}) == ps("-IZYY")

    def test_empty_set(self):
        assert conjugate_by_hadamard(ps("XYZI"), set()) == ps("XYZI")

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            conjugate_by_hadamard(ps("XY"), {3})

    @given(pauli_words, phases)
    def test_involution(self, w, phase):
        p = PauliString(ps(w).axes, phase)
        assert conjugate_by_hadamard(conjugate_by_hadamard(p, {1, 4}), {1, 4}) == p

    @given(pauli_words)
    def test_matches_dense_conjugation(self, w):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        hh = np.kron(np.kron(np.kron(h, np.eye(2)), np.eye(2)), h)
        np.testing.assert_allclose(
            conjugate_by_hadamard(ps(w), {1, 4}).to_matrix(), hh @ dense_pauli(w) @ hh, atol=1e-12
        )

    def test_primed_set_maps_to_target_set(self):
        primed = enumerate_stabilizers(qstate.linear_cluster(4))
        target = enumerate_stabilizers(qstate.target_cluster())
        converted = set()
        for p, s in primed:
            c = conjugate_by_hadamard(PauliString(p.axes, 0 if s == 1 else 2), {1, 4})
            converted.add((str(c.unsigned()), c.sign))
        assert converted == {(str(p), s) for p, s in target}
