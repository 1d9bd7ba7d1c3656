"""Energy-aware quantum control pulse optimization.

Gradient-based (EO-GRAPE) and reinforcement-learning (EO-DRLPE) pulse
synthesis that co-minimize gate infidelity and a normalized pulse-energy
cost, plus the experiment suites (weight sweeps, noise sweeps, Bloch-sphere
geodesic analysis) and a CLI.
"""

from ._backend import active_backend, available_backends
from .grape import GrapeConfig, GrapeTrace, backward_propagators, energy_gradient, \
    fidelity_gradient, forward_propagators, grape_step, optimize
from .qmath import BlochVector, bloch_vector, expm_hermitian_prop, fro_norm, \
    haar_random_unitary, pauli, process_fidelity, state_fidelity, tensor
from .rl import EpisodeRecord, MlpPolicy, TrainConfig, policy_forward, \
    reinforce_update, rla1_reward, rla2_reward, sample_action, train_rla1, \
    train_rla2, warm_start
from .system import DriftKind, OneQubitIdentity, OneQubitZ, PulseSet, SystemSpec, \
    TwoQubitZZ, build_drift, energetic_cost, path_length, propagate_closed, \
    propagate_noisy, slice_hamiltonian
from .experiments import SweepResult, SweepRow, geodesic_experiment, \
    log_noise_schedule, moving_average, noise_sweep, pareto_sweep, weight_grid

__version__ = "0.1.0"
