"""Core linear-algebra contracts: kron, eigh, expm, matrix square root."""
import numpy as np
import pytest
import scipy.linalg

from adiopt.errors import NotHermitianError, NotPositiveError
from adiopt.linalg import (hermitian_eig, hermitian_sqrt, kron, matrix_exp,
                           normalize_state)
from adiopt.models import pauli

I2 = np.eye(2, dtype=complex)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_hermitian(rng, n, scale=1.0):
    m = random_complex(rng, n, scale)
    return 0.5 * (m + m.conj().T)


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(I2, I2), np.eye(4))

    def test_sigma_z_first_qubit(self):
        np.testing.assert_array_equal(kron(pauli("z"), I2),
                                      np.diag([1, 1, -1, -1]).astype(complex))

    def test_yy_on_00(self):
        # sigma_y|0> = i|1>, so (sigma_y ox sigma_y)|00> = i*i |11> = -|11>
        ket00 = np.array([1, 0, 0, 0], dtype=complex)
        out = kron(pauli("y"), pauli("y")) @ ket00
        np.testing.assert_allclose(out, [0, 0, 0, -1], atol=1e-15)

    def test_associative_and_bilinear(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = random_complex(rng, 2)
            b = random_complex(rng, 2)
            c = random_complex(rng, 3)
            np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)),
                                       atol=1e-12)
            x, y = rng.standard_normal(2)
            np.testing.assert_allclose(kron(x * a + y * b, c),
                                       x * kron(a, c) + y * kron(b, c),
                                       atol=1e-12)


class TestHermitianEig:
    def test_sigma_z(self):
        w, v = hermitian_eig(pauli("z"))
        np.testing.assert_allclose(w, [-1.0, 1.0])
        # ascending order puts the |1> eigenvector first
        assert abs(v[1, 0]) == pytest.approx(1.0)

    def test_aep_driving_ground_state(self):
        # Z1 + Z2 is diagonal with entries (2, 0, 0, -2); ground state |11>
        h = kron(pauli("z"), I2) + kron(I2, pauli("z"))
        w, v = hermitian_eig(h)
        assert w[0] == pytest.approx(-2.0)
        np.testing.assert_allclose(np.abs(v[:, 0]), [0, 0, 0, 1], atol=1e-12)

    def test_reconstruction_random(self):
        rng = np.random.default_rng(11)
        m = random_hermitian(rng, 8)
        w, v = hermitian_eig(m)
        np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, m, atol=1e-9)

    @pytest.mark.parametrize("n", [4, 16, 64])
    def test_unitary_eigenvectors(self, n):
        rng = np.random.default_rng(n)
        _, v = hermitian_eig(random_hermitian(rng, n))
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-9)

    def test_ascending(self):
        rng = np.random.default_rng(3)
        w, _ = hermitian_eig(random_hermitian(rng, 12))
        assert np.all(np.diff(w) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestMatrixExp:
    def test_zero(self):
        np.testing.assert_allclose(matrix_exp(np.zeros((3, 3))), np.eye(3),
                                   atol=1e-15)

    def test_euler_identity(self):
        # exp(i theta sigma_x) = cos(theta) I + i sin(theta) sigma_x;
        # theta = pi/2 leaves i sigma_x
        out = matrix_exp(1j * np.pi / 2 * pauli("x"))
        np.testing.assert_allclose(out, 1j * pauli("x"), atol=1e-14)

    def test_diagonal(self):
        out = matrix_exp(np.diag([1.0, -2.0]).astype(complex))
        np.testing.assert_allclose(out, np.diag([np.e, np.exp(-2.0)]), atol=1e-14)

    def test_inverse_property(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            m = random_complex(rng, 6)
            m *= 5.0 / np.linalg.norm(m, 2)
            prod = matrix_exp(m) @ matrix_exp(-m)
            np.testing.assert_allclose(prod, np.eye(6), atol=1e-8)

    def test_against_eigendecomposition_normal(self):
        # for Hermitian m the exact answer is V exp(w) V^dag
        rng = np.random.default_rng(13)
        for scale in (0.1, 1.0, 10.0):
            m = random_hermitian(rng, 8, scale)
            w, v = np.linalg.eigh(m)
            exact = (v * np.exp(w)) @ v.conj().T
            got = matrix_exp(m)
            err = np.linalg.norm(got - exact) / np.linalg.norm(exact)
            assert err < 1e-10

    def test_against_scipy_nonnormal(self):
        rng = np.random.default_rng(17)
        for n in (4, 16, 64):
            m = random_complex(rng, n, 0.7)
            np.testing.assert_allclose(matrix_exp(m), scipy.linalg.expm(m),
                                       atol=1e-10, rtol=1e-9)


class TestHermitianSqrt:
    def test_identity(self):
        np.testing.assert_allclose(hermitian_sqrt(np.eye(4)), np.eye(4), atol=1e-12)

    def test_projector(self):
        ket = normalize_state(np.array([1.0, 1j, 0.5]))
        p = np.outer(ket, ket.conj())
        np.testing.assert_allclose(hermitian_sqrt(p), p, atol=1e-9)

    def test_diagonal(self):
        np.testing.assert_allclose(hermitian_sqrt(np.diag([4.0, 9.0])),
                                   np.diag([2.0, 3.0]), atol=1e-12)

    def test_square_recovers_random_psd(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            a = random_complex(rng, 6)
            m = a @ a.conj().T
            s = hermitian_sqrt(m)
            np.testing.assert_allclose(s @ s, m, atol=1e-9 * max(1.0, np.linalg.norm(m)))

    def test_clamps_roundoff_negatives(self):
        m = np.diag([1.0, -1e-9]).astype(complex)
        s = hermitian_sqrt(m)
        np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveError):
            hermitian_sqrt(np.diag([1.0, -0.5]))
