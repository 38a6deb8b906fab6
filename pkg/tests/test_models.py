"""Protocol builders: Pauli conventions, Hamiltonians, noise channels."""
import numpy as np
import pytest

from adiopt.dynamics import dissipator_liouvillian
from adiopt.errors import NegativeRateError
from adiopt.linalg import hermitian_eig, kron
from adiopt.models import (basis_ket, build_aep, build_atp, build_channel,
                           embed, pauli, pure_density)

I2 = np.eye(2, dtype=complex)


class TestPauli:
    def test_sigma_z(self):
        np.testing.assert_array_equal(pauli("z"), np.diag([1, -1]).astype(complex))

    def test_lowering_takes_0_to_1(self):
        out = pauli("minus") @ basis_ket("0")
        np.testing.assert_array_equal(out, basis_ket("1"))

    def test_lowering_from_x_and_y(self):
        np.testing.assert_allclose(pauli("minus"),
                                   (pauli("x") - 1j * pauli("y")) / 2, atol=1e-15)

    def test_unknown_direction(self):
        with pytest.raises(ValueError):
            pauli("w")


class TestEmbed:
    def test_first_of_two(self):
        np.testing.assert_array_equal(embed(pauli("z"), 1, 2), kron(pauli("z"), I2))

    def test_lowering_first_of_three(self):
        expected = kron(kron(pauli("minus"), I2), I2)
        np.testing.assert_array_equal(embed(pauli("minus"), 1, 3), expected)

    @pytest.mark.parametrize("qubit,n", [(1, 1), (2, 3), (4, 4)])
    def test_identity_embeds_to_identity(self, qubit, n):
        np.testing.assert_array_equal(embed(I2, qubit, n), np.eye(2 ** n))

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            embed(pauli("z"), 3, 2)


class TestBuildAep:
    def test_driving_ground_state_is_11(self):
        spec = build_aep()
        w, v = hermitian_eig(spec.hamiltonians[0])
        assert w[0] == pytest.approx(-2.0)
        np.testing.assert_allclose(np.abs(v[:, 0]), np.abs(basis_ket("11")),
                                   atol=1e-12)
        np.testing.assert_allclose(spec.initial_state,
                                   pure_density(basis_ket("11")), atol=1e-15)

    def test_problem_hamiltonian_on_target(self):
        # YY|chi> = -|chi> and ZZ|chi> = +|chi| for the Bell state,
        # so (YY - ZZ)|chi> = -2|chi>
        spec = build_aep()
        chi = (basis_ket("00") + basis_ket("11")) / np.sqrt(2)
        np.testing.assert_allclose(spec.hamiltonians[1] @ chi, -2 * chi, atol=1e-12)

    def test_target_is_problem_ground_state(self):
        spec = build_aep()
        h2 = spec.hamiltonians[1]
        w, _ = hermitian_eig(h2)
        energy = np.trace(spec.target_state @ h2).real
        assert energy == pytest.approx(w[0], abs=1e-12)

    def test_target_trace(self):
        assert np.trace(build_aep().target_state).real == pytest.approx(1.0)

    def test_hamiltonians_exactly_hermitian(self):
        for h in build_aep().hamiltonians:
            assert np.max(np.abs(h - h.conj().T)) == 0.0


class TestBuildAtp:
    def test_driving_on_ground_vector(self):
        spec = build_atp()
        bell = (basis_ket("00") + basis_ket("11")) / np.sqrt(2)
        v = np.kron(basis_ket("0"), bell)
        np.testing.assert_allclose(spec.hamiltonians[0] @ v, -2 * v, atol=1e-12)

    @pytest.mark.parametrize("ham_index", [0, 1])
    def test_twofold_degenerate_ground_space(self, ham_index):
        spec = build_atp()
        w, _ = hermitian_eig(spec.hamiltonians[ham_index])
        assert w[1] - w[0] < 1e-12
        assert w[2] - w[0] > 1.0

    def test_stated_ground_vectors(self):
        spec = build_atp()
        bell = (basis_ket("00") + basis_ket("11")) / np.sqrt(2)
        vs = [np.kron(basis_ket(b), bell) for b in ("0", "1")]
        w, _ = hermitian_eig(spec.hamiltonians[0])
        for v in vs:
            np.testing.assert_allclose(spec.hamiltonians[0] @ v, w[0] * v,
                                       atol=1e-12)
        assert abs(vs[0].conj() @ vs[1]) < 1e-15

    def test_boundary_states(self):
        spec = build_atp()
        plus = basis_ket("0") + basis_ket("1")
        bell = basis_ket("00") + basis_ket("11")
        np.testing.assert_allclose(spec.initial_state,
                                   pure_density(np.kron(plus, bell)), atol=1e-15)
        np.testing.assert_allclose(spec.target_state,
                                   pure_density(np.kron(bell, plus)), atol=1e-15)

    def test_local_field_adds_control(self):
        spec = build_atp(local_field=("y", 2))
        assert spec.n_controls == 3
        np.testing.assert_array_equal(spec.hamiltonians[2], embed(pauli("y"), 2, 3))

    def test_local_field_validation(self):
        with pytest.raises(IndexError):
            build_atp(local_field=("z", 4))
        with pytest.raises(ValueError):
            build_atp(local_field=("minus", 1))


class TestBuildChannel:
    def test_dephasing_two_qubits(self):
        ch = build_channel("dephasing", 2, 0.1)
        np.testing.assert_array_equal(ch.lindblad_ops[0], kron(pauli("z"), I2))
        np.testing.assert_array_equal(ch.lindblad_ops[1], kron(I2, pauli("z")))
        assert ch.rates == (0.1, 0.1)

    def test_amplitude_damping_two_qubits(self):
        ch = build_channel("amplitude_damping", 2, 0.05)
        np.testing.assert_array_equal(ch.lindblad_ops[0], kron(pauli("minus"), I2))
        np.testing.assert_array_equal(ch.lindblad_ops[1], kron(I2, pauli("minus")))

    def test_zero_rate_three_qubits(self):
        ch = build_channel("amplitude_damping", 3, 0.0)
        assert len(ch.lindblad_ops) == 3
        assert ch.rates == (0.0, 0.0, 0.0)
        assert ch.is_trivial

    def test_zero_rate_dissipator_vanishes(self):
        ch = build_channel("dephasing", 2, 0.0)
        np.testing.assert_array_equal(dissipator_liouvillian(ch, 4),
                                      np.zeros((16, 16)))

    def test_negative_rate_rejected(self):
        with pytest.raises(NegativeRateError):
            build_channel("dephasing", 2, -0.1)
