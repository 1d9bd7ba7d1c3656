"""Dense complex linear algebra and quantum primitives.

Everything operates on plain ``numpy`` arrays (complex128). Matrices are
dimensionless with ħ = 1; dimensions of 2 and 4 (one and two qubits) are the
supported surface, larger dimensions work but are untested.
"""

from typing import NamedTuple

import numpy as np

from .constants import (
    BLOCH_IMAG_TOL,
    DENSITY_TRACE_TOL,
    HERMITIAN_TOL,
)

_PAULI = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class BlochVector(NamedTuple):
    """Cartesian Bloch-sphere coordinates of a single-qubit state."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def asarray(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def require_hermitian(a: np.ndarray, what: str = "matrix",
                      tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise ValueError(f"{what} is not Hermitian within {tol:g}")
    return a


def pauli(axis: str, qubit: int, n_qubits: int) -> np.ndarray:
    """Single-qubit Pauli (or identity) embedded in an n-qubit register.

    Parameters
    ----------
    axis : {'x', 'y', 'z', 'i'}
    qubit : int
        Index of the qubit the operator acts on (0-based).
    n_qubits : int

    Returns
    -------
    ndarray, shape (2**n_qubits, 2**n_qubits)
        The requested operator tensored with identities elsewhere.
    """
    if axis not in _PAULI:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of x, y, z, i")
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if not 0 <= qubit < n_qubits:
        raise IndexError(f"qubit index {qubit} out of range for {n_qubits} qubit(s)")
    out = np.array([[1.0 + 0j]])
    for q in range(n_qubits):
        out = np.kron(out, _PAULI[axis] if q == qubit else _PAULI["i"])
    return out


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two operators."""
    return np.kron(np.asarray(a, dtype=np.complex128),
                   np.asarray(b, dtype=np.complex128))


def expm_hermitian_prop(h: np.ndarray, dt: float) -> np.ndarray:
    """Propagator exp(-i h dt) of a Hermitian generator, via eigendecomposition.

    Exact per slice (up to roundoff) for the small dense Hamiltonians used
    here, unlike truncated series methods.
    """
    h = require_hermitian(h, "generator")
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * dt)
    return (vecs * phases) @ vecs.conj().T


def haar_random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed random unitary (Ginibre + QR with phase-fixed R).

    Deterministic for a given seed.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def process_fidelity(u_target: np.ndarray, u: np.ndarray) -> float:
    """Normalized squared trace overlap |Tr(U_T^† U) / d|^2.

    Invariant under a global phase of either argument; 1 means the gates
    agree up to global phase.
    """
    u_target = np.asarray(u_target, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if u_target.shape != u.shape:
        raise ValueError(f"dimension mismatch: {u_target.shape} vs {u.shape}")
    d = u.shape[0]
    if np.max(np.abs(u_target.conj().T @ u_target - np.eye(d))) > 1e-8:
        raise ValueError("target is not unitary")
    overlap = np.trace(u_target.conj().T @ u) / d
    return float(np.abs(overlap) ** 2)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    evals, vecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0.0, None)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def _require_density(rho: np.ndarray, what: str) -> np.ndarray:
    rho = require_hermitian(rho, what, tol=1e-8)
    if abs(np.trace(rho).real - 1.0) > DENSITY_TRACE_TOL:
        raise ValueError(f"{what} is not trace-normalized")
    return rho


def state_fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(ρ_a) ρ_b sqrt(ρ_a)))^2, in [0, 1]."""
    rho_a = _require_density(rho_a, "rho_a")
    rho_b = _require_density(rho_b, "rho_b")
    if rho_a.shape != rho_b.shape:
        raise ValueError("density matrices differ in dimension")
    s = _psd_sqrt(rho_a)
    evals = np.linalg.eigvalsh(s @ rho_b @ s)
    evals = np.clip(evals, 0.0, None)
    f = float(np.sum(np.sqrt(evals)) ** 2)
    return min(f, 1.0)


def bloch_vector(rho: np.ndarray) -> BlochVector:
    """Bloch coordinates (Tr ρσ_x, Tr ρσ_y, Tr ρσ_z) of a qubit state."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise ValueError(f"bloch_vector needs a 2x2 density matrix, got {rho.shape}")
    comps = []
    for axis in "xyz":
        val = np.trace(rho @ _PAULI[axis])
        if abs(val.imag) > BLOCH_IMAG_TOL:
            raise ValueError(f"Bloch component {axis} has imaginary residue {val.imag:g}")
        comps.append(float(val.real))
    return BlochVector(*comps)


def fro_norm(a: np.ndarray) -> float:
    """Frobenius norm sqrt(Tr(A^† A)); the norm used by the energetic cost."""
    return float(np.linalg.norm(np.asarray(a)))


def ket(index: int, dim: int) -> np.ndarray:
    """Computational-basis column vector |index⟩."""
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def density(psi: np.ndarray) -> np.ndarray:
    """|ψ⟩⟨ψ| of a (normalized) state vector."""
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return np.outer(psi, psi.conj())
