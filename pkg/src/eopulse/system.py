"""Controlled quantum system: drift + controls + time grid + decoherence.

Holds the piecewise-constant pulse model, closed/noisy propagation, the
normalized energetic cost functional, and Bloch-sphere path lengths.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _backend
from .constants import DENSITY_TRACE_TOL
from .qmath import fro_norm, pauli, require_hermitian, tensor

TWO_PI = 2.0 * math.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemSpec:
    """Immutable description of the controllable system.

    Parameters
    ----------
    n_qubits : int
    h_drift : ndarray
        Always-on Hamiltonian, Hermitian, dimension 2**n_qubits.
    controls : tuple of ndarray
        Control operators sigma_k multiplied by the pulse amplitudes.
    control_labels : tuple of str
        One label per control; used in tabular output headers.
    total_time : float
        Gate duration T; the grid step is dt = T / n_slices.
    n_slices : int
    t1, t2 : float
        Relaxation / dephasing times in units of T; ``inf`` disables noise.
        Physicality requires t2 <= 2 * t1.
    """

    n_qubits: int
    h_drift: np.ndarray
    controls: tuple
    control_labels: tuple
    total_time: float
    n_slices: int
    t1: float = math.inf
    t2: float = math.inf

    def __post_init__(self):
        dim = 2 ** self.n_qubits
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        drift = require_hermitian(self.h_drift, "h_drift")
        if drift.shape != (dim, dim):
            raise ValueError(f"h_drift has shape {drift.shape}, expected {(dim, dim)}")
        controls = tuple(self.controls)
        if len(controls) < 1:
            raise ValueError("at least one control operator is required")
        checked = []
        for i, c in enumerate(controls):
            c = require_hermitian(c, f"controls[{i}]")
            if c.shape != (dim, dim):
                raise ValueError(f"controls[{i}] has shape {c.shape}, expected {(dim, dim)}")
            checked.append(_readonly(c))
        labels = tuple(str(l) for l in self.control_labels)
        if len(labels) != len(checked):
            raise ValueError("control_labels must match controls in length")
        if self.n_slices < 2:
            raise ValueError("n_slices must be >= 2")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if not (self.t1 > 0 and self.t2 > 0):
            raise ValueError("t1 and t2 must be positive")
        if self.t2 > 2.0 * self.t1:
            raise ValueError(f"unphysical decoherence times: t2 ({self.t2}) > 2*t1 ({2 * self.t1})")
        object.__setattr__(self, "h_drift", _readonly(drift))
        object.__setattr__(self, "controls", tuple(checked))
        object.__setattr__(self, "control_labels", labels)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def dt(self) -> float:
        return self.total_time / self.n_slices

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    def control_stack(self) -> np.ndarray:
        """Controls as a (K, d, d) array."""
        return np.stack(self.controls)

    def noiseless(self) -> bool:
        return math.isinf(self.t1) and math.isinf(self.t2)


@dataclass(frozen=True)
class PulseSet:
    """A K x N grid of real control amplitudes u_k(n), clipped to |u| <= bound."""

    amplitudes: np.ndarray
    bound: float = 1.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.float64, copy=True)
        if amps.ndim != 2:
            raise ValueError(f"amplitudes must be a K x N grid, got shape {amps.shape}")
        if not self.bound > 0:
            raise ValueError("amplitude bound must be positive")
        if np.max(np.abs(amps)) > self.bound + 1e-9:
            raise ValueError(f"amplitudes exceed the bound {self.bound}")
        amps = np.clip(amps, -self.bound, self.bound)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_controls(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_slices(self) -> int:
        return self.amplitudes.shape[1]

    @classmethod
    def zeros(cls, n_controls: int, n_slices: int, bound: float = 1.0) -> "PulseSet":
        return cls(np.zeros((n_controls, n_slices)), bound)

    @classmethod
    def random(cls, n_controls: int, n_slices: int, scale: float, seed: int,
               bound: float = 1.0) -> "PulseSet":
        """Seeded uniform amplitudes in [-scale, scale]."""
        rng = np.random.default_rng(seed)
        amps = rng.uniform(-scale, scale, size=(n_controls, n_slices))
        return cls(np.clip(amps, -bound, bound), bound)


# Drift Hamiltonian families used throughout the experiments.

@dataclass(frozen=True)
class OneQubitIdentity:
    """Drift turned off (identity generator contributes only a global phase)."""


@dataclass(frozen=True)
class OneQubitZ:
    """H_D = (omega1 / 2) sigma_z."""

    omega1: float = TWO_PI


@dataclass(frozen=True)
class TwoQubitZZ:
    """H_D = (omega1/2) Z(x)I + (omega2/2) I(x)Z + J Z(x)Z."""

    omega1: float = TWO_PI
    omega2: float = TWO_PI
    j: float = 0.1 * TWO_PI


DriftKind = Union[OneQubitIdentity, OneQubitZ, TwoQubitZZ]


def build_drift(kind: DriftKind, n_qubits: int) -> np.ndarray:
    """Construct the drift Hamiltonian for one of the supported families."""
    if isinstance(kind, OneQubitIdentity):
        if n_qubits != 1:
            raise ValueError("OneQubitIdentity drift requires n_qubits = 1")
        return np.eye(2, dtype=np.complex128)
    if isinstance(kind, OneQubitZ):
        if n_qubits != 1:
            raise ValueError("OneQubitZ drift requires n_qubits = 1")
        return 0.5 * kind.omega1 * pauli("z", 0, 1)
    if isinstance(kind, TwoQubitZZ):
        if n_qubits != 2:
            raise ValueError("TwoQubitZZ drift requires n_qubits = 2")
        sz = pauli("z", 0, 1)
        return (0.5 * kind.omega1 * tensor(sz, np.eye(2))
                + 0.5 * kind.omega2 * tensor(np.eye(2), sz)
                + kind.j * tensor(sz, sz))
    raise TypeError(f"unknown drift kind: {kind!r}")


def _check_shape(spec: SystemSpec, pulses: PulseSet):
    want = (spec.n_controls, spec.n_slices)
    got = pulses.amplitudes.shape
    if got != want:
        raise ValueError(f"pulse grid shape {got} does not match system {want}")


def slice_hamiltonians(spec: SystemSpec, amplitudes: np.ndarray) -> np.ndarray:
    """All N slice Hamiltonians H_n = H_D + sum_k u_k(n) sigma_k, stacked."""
    return spec.h_drift[None, :, :] + np.einsum(
        "kn,kij->nij", amplitudes, spec.control_stack())


def slice_hamiltonian(spec: SystemSpec, pulses: PulseSet, n: int) -> np.ndarray:
    """The Hamiltonian acting during slice ``n`` (0-based)."""
    _check_shape(spec, pulses)
    if not 0 <= n < spec.n_slices:
        raise IndexError(f"slice index {n} out of range for N = {spec.n_slices}")
    h = spec.h_drift.copy()
    for k, sigma in enumerate(spec.controls):
        h = h + pulses.amplitudes[k, n] * sigma
    return h


def slice_decompositions(spec: SystemSpec, amplitudes: np.ndarray):
    """Eigendecompose every slice Hamiltonian and form the propagators.

    Returns
    -------
    evals : ndarray, shape (N, d)
    vecs : ndarray, shape (N, d, d)
    props : ndarray, shape (N, d, d)
        U_n = V exp(-i dt lambda) V^†.
    """
    hams = slice_hamiltonians(spec, amplitudes)
    evals, vecs = np.linalg.eigh(hams)
    phases = np.exp(-1j * spec.dt * evals)
    props = np.einsum("nij,nj,nkj->nik", vecs, phases, vecs.conj())
    return evals, vecs, np.ascontiguousarray(props)


def slice_propagators(spec: SystemSpec, pulses: PulseSet) -> np.ndarray:
    """Per-slice propagators U_n = exp(-i dt H_n), stacked (N, d, d)."""
    _check_shape(spec, pulses)
    _, _, props = slice_decompositions(spec, pulses.amplitudes)
    return props


def propagate_closed(spec: SystemSpec, pulses: PulseSet):
    """Closed-system evolution.

    Returns
    -------
    u_total : ndarray
        U(T) = U_N ... U_1 (right-to-left product).
    slice_unitaries : ndarray, shape (N, d, d)
    """
    props = slice_propagators(spec, pulses)
    xs = _backend.chain_forward(props)
    return xs[-1], props


def _qubit_kraus(spec: SystemSpec):
    """Per-slice single-qubit Kraus stages: amplitude damping then dephasing."""
    dt = spec.dt
    gamma1 = 0.0 if math.isinf(spec.t1) else 1.0 - math.exp(-dt / spec.t1)
    # Pure-dephasing rate: 1/T_phi = 1/T2 - 1/(2 T1).
    inv_tphi = (0.0 if math.isinf(spec.t2) else 1.0 / spec.t2) \
        - (0.0 if math.isinf(spec.t1) else 0.5 / spec.t1)
    inv_tphi = max(inv_tphi, 0.0)
    gamma_phi = 1.0 - math.exp(-dt * inv_tphi) if inv_tphi > 0 else 0.0

    stages = []
    if gamma1 > 0:
        stages.append([
            np.array([[1, 0], [0, math.sqrt(1 - gamma1)]], dtype=np.complex128),
            np.array([[0, math.sqrt(gamma1)], [0, 0]], dtype=np.complex128),
        ])
    if gamma_phi > 0:
        # Z-flip form: multiplies coherences by 1 - gamma_phi = exp(-dt/T_phi).
        p = gamma_phi / 2.0
        stages.append([
            math.sqrt(1 - p) * np.eye(2, dtype=np.complex128),
            math.sqrt(p) * np.array([[1, 0], [0, -1]], dtype=np.complex128),
        ])
    return stages


def _embed(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(n_qubits):
        out = np.kron(out, op if q == qubit else np.eye(2, dtype=np.complex128))
    return out


def kraus_stack(spec: SystemSpec) -> np.ndarray:
    """Composite per-slice noise channel as one Kraus stack (M, d, d).

    Composes the per-qubit amplitude-damping and pure-dephasing channels; an
    empty stack (M = 0) means the evolution is noise-free.
    """
    ops = [np.eye(spec.dim, dtype=np.complex128)]
    trivial = True
    for q in range(spec.n_qubits):
        for stage in _qubit_kraus(spec):
            trivial = False
            embedded = [_embed(k, q, spec.n_qubits) for k in stage]
            ops = [e @ o for e in embedded for o in ops]
    if trivial:
        return np.zeros((0, spec.dim, spec.dim), dtype=np.complex128)
    return np.ascontiguousarray(np.stack(ops))


def propagate_noisy(spec: SystemSpec, pulses: PulseSet, rho0: np.ndarray) -> np.ndarray:
    """Noisy evolution: per slice, U_n conjugation then the decoherence channel.

    Amplitude damping uses gamma_1 = 1 - exp(-dt/T1); pure dephasing uses
    gamma_phi = 1 - exp(-dt/T_phi) with 1/T_phi = 1/T2 - 1/(2 T1), so the
    combined coherence decay per slice is exactly exp(-dt/T2).
    """
    _check_shape(spec, pulses)
    rho0 = require_hermitian(rho0, "rho0", tol=1e-8)
    if rho0.shape != (spec.dim, spec.dim):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(spec.dim, spec.dim)}")
    if abs(np.trace(rho0).real - 1.0) > DENSITY_TRACE_TOL:
        raise ValueError("rho0 is not trace-normalized")
    props = slice_propagators(spec, pulses)
    return _backend.evolve_density(props, kraus_stack(spec), rho0)


def unit_norm_operator(spec: SystemSpec) -> float:
    """Norm of the all-unit-amplitude Hamiltonian, ||H_D + sum_k sigma_k||_F."""
    return fro_norm(spec.h_drift + sum(spec.controls))


def energy_normalizer(spec: SystemSpec) -> float:
    """Normalization constant of the energetic cost: T * ||H_D + sum_k sigma_k||_F."""
    return spec.total_time * unit_norm_operator(spec)


def energetic_cost(spec: SystemSpec, pulses: PulseSet) -> float:
    """Normalized time-integrated Frobenius norm of the total Hamiltonian.

    sum_n dt ||H_D + sum_k u_k(n) sigma_k||_F, divided by the all-unit-pulse
    value T ||H_D + sum_k sigma_k||_F; equals 1 when every slice saturates
    the unit amplitude bound. The normalizer always uses unit amplitudes, so
    a PulseSet with bound > 1 can exceed 1.
    """
    _check_shape(spec, pulses)
    hams = slice_hamiltonians(spec, pulses.amplitudes)
    norms = np.linalg.norm(hams, axis=(1, 2))
    return float(spec.dt * np.sum(norms) / energy_normalizer(spec))


def bloch_trajectory(spec: SystemSpec, pulses: PulseSet, psi0: np.ndarray) -> np.ndarray:
    """Closed-system Bloch coordinates after each slice, shape (N + 1, 3).

    Row 0 is the initial state.
    """
    if spec.n_qubits != 1:
        raise ValueError("Bloch trajectories are defined for a single qubit")
    _check_shape(spec, pulses)
    psi0 = np.asarray(psi0, dtype=np.complex128).reshape(-1)
    if psi0.shape != (2,):
        raise ValueError("psi0 must be a 2-component state vector")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError("psi0 must be normalized")
    props = slice_propagators(spec, pulses)
    xs = _backend.chain_forward(props)
    states = np.concatenate([psi0[None, :], np.einsum("nij,j->ni", xs, psi0)])
    cross = states[:, 0] * states[:, 1].conj()  # rho_01 per state
    traj = np.empty((states.shape[0], 3))
    traj[:, 0] = 2.0 * cross.real
    traj[:, 1] = -2.0 * cross.imag
    traj[:, 2] = np.abs(states[:, 0]) ** 2 - np.abs(states[:, 1]) ** 2
    return traj


def path_length(spec: SystemSpec, pulses: PulseSet, psi0: np.ndarray) -> float:
    """Bloch path length: sum of chord segments |b_n - b_{n-1}| over the slices."""
    traj = bloch_trajectory(spec, pulses, psi0)
    return float(np.sum(np.linalg.norm(np.diff(traj, axis=0), axis=1)))
