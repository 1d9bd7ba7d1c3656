import numpy as np
import pytest

from conftest import random_density
from eopulse.qmath import (
    bloch_vector,
    density,
    expm_hermitian_prop,
    fro_norm,
    haar_random_unitary,
    ket,
    pauli,
    process_fidelity,
    state_fidelity,
    tensor,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


class TestPauli:
    def test_pauli_x_single_qubit(self):
        assert np.array_equal(pauli("x", 0, 1), SX)

    def test_tensor_embedding(self):
        assert np.allclose(pauli("z", 0, 2), np.diag([1, 1, -1, -1]))
        assert np.allclose(pauli("z", 1, 2), np.diag([1, -1, 1, -1]))

    def test_involution(self):
        y = pauli("y", 0, 1)
        assert np.allclose(y @ y, np.eye(2))

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            pauli("x", 2, 2)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            pauli("w", 0, 1)

    def test_hermitian_and_unitary(self):
        for axis in "xyzi":
            p = pauli(axis, 1, 2)
            assert np.allclose(p, p.conj().T)
            assert np.allclose(p @ p.conj().T, np.eye(4))


class TestTensor:
    def test_identity(self):
        assert np.allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_zz(self):
        assert np.allclose(tensor(SZ, SZ), np.diag([1, -1, -1, 1]))

    def test_involution(self):
        xi = tensor(SX, np.eye(2))
        assert np.allclose(xi @ xi, np.eye(4))


class TestExpm:
    def test_pi_half_x(self):
        # cos(pi/2) I - i sin(pi/2) sigma_x
        assert np.allclose(expm_hermitian_prop(SX, np.pi / 2), -1j * SX,
                           atol=1e-12)

    def test_zero_generator(self):
        assert np.allclose(expm_hermitian_prop(np.zeros((3, 3)), 0.7), np.eye(3))

    def test_diagonal(self):
        theta = 0.37
        expected = np.diag([np.exp(-1j * theta), np.exp(1j * theta)])
        assert np.allclose(expm_hermitian_prop(SZ, theta), expected, atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            expm_hermitian_prop(np.array([[0, 1], [0, 0]], dtype=complex), 0.1)

    def test_unitarity_random(self, rng):
        for _ in range(20):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = a + a.conj().T
            u = expm_hermitian_prop(h, 0.3)
            assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-10


class TestHaar:
    def test_unitarity_over_seeds(self):
        for seed in range(100):
            u = haar_random_unitary(2, seed)
            assert np.linalg.norm(u.conj().T @ u - np.eye(2)) < 1e-10

    def test_deterministic(self):
        assert np.array_equal(haar_random_unitary(4, 11), haar_random_unitary(4, 11))

    @pytest.mark.parametrize("dim", [2, 4])
    def test_trace_moment(self, dim):
        # Haar moment: E |Tr U|^2 = 1, so |Tr U|^2 / dim averages to 1/dim.
        samples = np.array([abs(np.trace(haar_random_unitary(dim, s))) ** 2 / dim
                            for s in range(1000)])
        se = samples.std(ddof=1) / np.sqrt(len(samples))
        assert abs(samples.mean() - 1.0 / dim) < 3 * se

    def test_dim_too_small(self):
        with pytest.raises(ValueError):
            haar_random_unitary(1, 0)


class TestProcessFidelity:
    def test_self(self):
        u = haar_random_unitary(4, 3)
        assert process_fidelity(u, u) == pytest.approx(1.0, abs=1e-12)

    def test_traceless_product(self):
        assert process_fidelity(np.eye(2), SX) == pytest.approx(0.0, abs=1e-12)

    def test_global_phase_invariance(self, rng):
        u = haar_random_unitary(2, 5)
        for phi in rng.uniform(0, 2 * np.pi, 10):
            assert process_fidelity(np.eye(2), np.exp(1j * phi) * np.eye(2)) == \
                pytest.approx(1.0, abs=1e-12)
            assert process_fidelity(u, np.exp(1j * phi) * u) == \
                pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            process_fidelity(np.eye(2), np.eye(4))

    def test_non_unitary_target(self):
        with pytest.raises(ValueError):
            process_fidelity(2.0 * np.eye(2), np.eye(2))


class TestStateFidelity:
    def test_self(self, rng):
        rho = random_density(rng, 4)
        assert state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal(self):
        assert state_fidelity(density(ket(0, 2)), density(ket(1, 2))) == \
            pytest.approx(0.0, abs=1e-12)

    def test_pure_vs_maximally_mixed(self):
        # Closed form: <0| (I/2) |0> = 1/2.
        assert state_fidelity(density(ket(0, 2)), np.eye(2) / 2) == \
            pytest.approx(0.5, abs=1e-12)

    def test_symmetry(self, rng):
        for _ in range(10):
            a = random_density(rng, 2)
            b = random_density(rng, 2)
            assert state_fidelity(a, b) == pytest.approx(state_fidelity(b, a),
                                                         abs=1e-10)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            state_fidelity(2 * density(ket(0, 2)), density(ket(0, 2)))


class TestBlochVector:
    def test_poles_and_plus(self):
        assert np.allclose(bloch_vector(density(ket(0, 2))), (0, 0, 1), atol=1e-12)
        plus = (ket(0, 2) + ket(1, 2)) / np.sqrt(2)
        assert np.allclose(bloch_vector(density(plus)), (1, 0, 0), atol=1e-12)
        assert np.allclose(bloch_vector(np.eye(2) / 2), (0, 0, 0), atol=1e-12)

    def test_wrong_dim(self):
        with pytest.raises(ValueError):
            bloch_vector(np.eye(4) / 4)

    def test_pure_states_on_sphere(self, rng):
        for _ in range(25):
            psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            psi /= np.linalg.norm(psi)
            assert bloch_vector(density(psi)).norm() == pytest.approx(1.0, abs=1e-9)


class TestFroNorm:
    def test_values(self):
        assert fro_norm(np.eye(2)) == pytest.approx(np.sqrt(2), abs=1e-14)
        assert fro_norm(SX) == pytest.approx(np.sqrt(2), abs=1e-14)
        assert fro_norm(np.zeros((3, 3))) == 0.0
