"""Named target gates and control-operator vocabulary for configs."""

import math

import numpy as np

from .qmath import haar_random_unitary, pauli, tensor

_SQ2 = 1.0 / math.sqrt(2.0)

HADAMARD = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
T_GATE = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128)
RX_PI_2 = np.array([[math.cos(math.pi / 4), -1j * math.sin(math.pi / 4)],
                    [-1j * math.sin(math.pi / 4), math.cos(math.pi / 4)]],
                   dtype=np.complex128)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=np.complex128)

NAMED_GATES = {
    "hadamard": HADAMARD,
    "cnot": CNOT,
    "t": T_GATE,
    "rx_pi_2": RX_PI_2,
}

GATE_NAMES = ("hadamard", "cnot", "t", "rx_pi_2", "identity", "haar")


def target_gate(name: str, n_qubits: int, haar_seed: int = 7) -> np.ndarray:
    """Resolve a named target to its matrix for an n-qubit system."""
    dim = 2 ** n_qubits
    if name == "identity":
        return np.eye(dim, dtype=np.complex128)
    if name == "haar":
        return haar_random_unitary(dim, haar_seed)
    if name not in NAMED_GATES:
        raise ValueError(f"unknown gate {name!r}; expected one of {GATE_NAMES}")
    gate = NAMED_GATES[name]
    if gate.shape != (dim, dim):
        raise ValueError(f"gate {name!r} is {gate.shape[0]}-dimensional, "
                         f"system is {dim}-dimensional")
    return gate.copy()


# Control-operator tokens accepted in configs. 1-qubit: sx, sy, sz;
# 2-qubit: per-qubit embeddings (sx1, sy2, ...) and products (sxsx, ...).
_ONE_QUBIT = {"sx": "x", "sy": "y", "sz": "z"}


def control_operator(token: str, n_qubits: int) -> np.ndarray:
    token = token.strip().lower()
    if n_qubits == 1:
        if token in _ONE_QUBIT:
            return pauli(_ONE_QUBIT[token], 0, 1)
        raise ValueError(f"unknown 1-qubit control {token!r} (use sx, sy, sz)")
    if n_qubits == 2:
        if len(token) == 3 and token[:2] in _ONE_QUBIT and token[2] in "12":
            return pauli(_ONE_QUBIT[token[:2]], int(token[2]) - 1, 2)
        if len(token) == 4 and token[:2] in _ONE_QUBIT and token[2:] in _ONE_QUBIT:
            return tensor(pauli(_ONE_QUBIT[token[:2]], 0, 1),
                          pauli(_ONE_QUBIT[token[2:]], 0, 1))
        raise ValueError(f"unknown 2-qubit control {token!r} "
                         "(use e.g. sx1, sy2, sxsx)")
    raise ValueError("control vocabulary covers 1- and 2-qubit systems")
