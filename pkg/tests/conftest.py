import numpy as np
import pytest

from eopulse.qmath import pauli
from eopulse.system import OneQubitZ, SystemSpec, TwoQubitZZ, build_drift

TWO_PI = 2.0 * np.pi


def make_spec_1q(n_slices=8, total_time=1.0, controls=("x", "y"), omega=TWO_PI,
                 t1=np.inf, t2=np.inf):
    ops = tuple(pauli(a, 0, 1) for a in controls)
    labels = tuple(f"s{a}" for a in controls)
    return SystemSpec(1, build_drift(OneQubitZ(omega), 1), ops, labels,
                      total_time, n_slices, t1, t2)


def make_spec_2q(n_slices=8, total_time=1.0, t1=np.inf, t2=np.inf,
                 omega1=1.0, omega2=1.0, j=0.1):
    sx = pauli("x", 0, 1)
    eye = np.eye(2)
    ops = (np.kron(sx, eye), np.kron(eye, sx), np.kron(sx, sx))
    return SystemSpec(2, build_drift(TwoQubitZZ(omega1, omega2, j), 2), ops,
                      ("sx1", "sx2", "sxsx"), total_time, n_slices, t1, t2)


def central_difference(fn, amplitudes, h=1e-6):
    """Independent finite-difference gradient oracle over a K x N grid."""
    grad = np.zeros_like(amplitudes)
    for k in range(amplitudes.shape[0]):
        for n in range(amplitudes.shape[1]):
            up = amplitudes.copy()
            up[k, n] += h
            dn = amplitudes.copy()
            dn[k, n] -= h
            grad[k, n] = (fn(up) - fn(dn)) / (2 * h)
    return grad


def random_density(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
