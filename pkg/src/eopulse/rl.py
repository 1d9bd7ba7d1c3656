"""Closed-loop pulse learning with a from-scratch policy-gradient agent.

A small feed-forward network (tanh hiddens, tanh-squashed linear head scaled
to the amplitude bound) parametrizes the mean of a diagonal Gaussian over
whole pulse grids; episodes are single-step (one action = one K x N grid,
one reward). Training is plain REINFORCE with a running-mean baseline and
SGD + momentum, no ML framework.

Two agent roles share the machinery: RLA-1 optimizes pulses against the
noisy simulator (reward = w_f * state fidelity + w_e * (1 - energetic
cost)); RLA-2 imitates a given pulse grid (reward = negative squared
distance) and can warm-start RLA-1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .qmath import density, ket, process_fidelity, state_fidelity
from .system import PulseSet, SystemSpec, energetic_cost, propagate_closed, propagate_noisy

_LOG_2PI = math.log(2.0 * math.pi)

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by both agent roles.

    Weights are normalized to w_f + w_e = 1. The exploration spread is
    annealed linearly from std_start to std_end over the episodes.
    """

    n_episodes: int = 2000
    learning_rate: float = 0.01
    batch_size: int = 32
    baseline_decay: float = 0.9
    std_start: float = 0.5
    std_end: float = 0.05
    seed: int = 0
    w_f: float = 0.8
    w_e: float = 0.2
    hidden_sizes: tuple = (200, 100, 50, 30, 10)
    momentum: float = 0.9
    imitation_metric: str = "sq"  # squared (default) or absolute differences

    def __post_init__(self):
        if self.n_episodes < 1 or self.batch_size < 1:
            raise ValueError("n_episodes and batch_size must be positive")
        if not (self.learning_rate > 0 and self.std_start > 0 and self.std_end > 0):
            raise ValueError("learning_rate and std schedule must be positive")
        if not 0.0 <= self.baseline_decay < 1.0:
            raise ValueError("baseline_decay must be in [0, 1)")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        if self.w_f < 0 or self.w_e < 0 or self.w_f + self.w_e <= 0:
            raise ValueError("invalid reward weights")
        total = self.w_f + self.w_e
        object.__setattr__(self, "w_f", self.w_f / total)
        object.__setattr__(self, "w_e", self.w_e / total)
        if self.imitation_metric not in ("sq", "l1"):
            raise ValueError("imitation_metric must be 'sq' or 'l1'")


@dataclass
class MlpPolicy:
    """Feed-forward Gaussian policy over flattened pulse grids.

    ``weights[i]`` has shape (layer_sizes[i], layer_sizes[i+1]); hidden
    activations are tanh and the output head is bound * tanh(z), so means
    always respect the amplitude bound. ``log_std`` is the per-output
    Gaussian spread (driven by the annealing schedule during training).
    Velocity buffers and the reward baseline are optimizer state.
    """

    layer_sizes: tuple
    action_shape: tuple
    weights: list
    biases: list
    log_std: np.ndarray
    bound: float = 1.0
    velocity_w: list = field(default_factory=list)
    velocity_b: list = field(default_factory=list)
    baseline: float | None = None

    def __post_init__(self):
        if not self.velocity_w:
            self.velocity_w = [np.zeros_like(w) for w in self.weights]
            self.velocity_b = [np.zeros_like(b) for b in self.biases]

    @classmethod
    def initialize(cls, obs_dim: int, action_shape: tuple, hidden_sizes: tuple,
                   seed: int, bound: float = 1.0, init_std: float = 0.5) -> "MlpPolicy":
        """Seeded per-layer 1/sqrt(fan_in) Gaussian weights, zero biases."""
        k, n = action_shape
        sizes = (obs_dim, *hidden_sizes, k * n)
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(rng.standard_normal((fan_in, fan_out)) / math.sqrt(fan_in))
            biases.append(np.zeros(fan_out))
        log_std = np.full(k * n, math.log(init_std))
        return cls(sizes, tuple(action_shape), weights, biases, log_std, bound)

    @property
    def obs_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "MlpPolicy":
        return MlpPolicy(
            layer_sizes=tuple(self.layer_sizes),
            action_shape=tuple(self.action_shape),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            log_std=self.log_std.copy(),
            bound=self.bound,
            velocity_w=[v.copy() for v in self.velocity_w],
            velocity_b=[v.copy() for v in self.velocity_b],
            baseline=self.baseline,
        )


@dataclass
class EpisodeRecord:
    """One single-step episode: observation, emitted pulses, and its scores.

    ``raw_action`` is the pre-clip Gaussian sample and ``log_std`` the spread
    it was drawn with; both are needed to reconstruct the policy-gradient
    term exactly.
    """

    observation: np.ndarray
    action: PulseSet
    reward: float
    fidelity: float
    energetic_cost: float
    raw_action: np.ndarray
    log_std: np.ndarray


def _forward_batch(policy: MlpPolicy, obs: np.ndarray):
    """Forward pass on a (B, obs_dim) batch; returns means and activations."""
    hs = [obs]
    h = obs
    n_layers = len(policy.weights)
    for i in range(n_layers - 1):
        h = np.tanh(h @ policy.weights[i] + policy.biases[i])
        hs.append(h)
    z = h @ policy.weights[-1] + policy.biases[-1]
    means = policy.bound * np.tanh(z)
    return means, hs


def policy_forward(policy: MlpPolicy, obs: np.ndarray) -> np.ndarray:
    """Deterministic mean action for one observation (flat, within the bound)."""
    obs = np.asarray(obs, dtype=np.float64).reshape(-1)
    if obs.shape[0] != policy.obs_dim:
        raise ValueError(f"observation length {obs.shape[0]} != input size {policy.obs_dim}")
    means, _ = _forward_batch(policy, obs[None, :])
    return means[0]


def _sample(policy: MlpPolicy, obs: np.ndarray, rng: np.random.Generator):
    means = policy_forward(policy, obs)
    std = np.exp(policy.log_std)
    raw = means + std * rng.standard_normal(means.shape[0])
    log_prob = float(np.sum(
        -0.5 * ((raw - means) / std) ** 2 - policy.log_std - 0.5 * _LOG_2PI))
    clipped = np.clip(raw, -policy.bound, policy.bound)
    action = PulseSet(clipped.reshape(policy.action_shape), policy.bound)
    return action, log_prob, raw


def sample_action(policy: MlpPolicy, obs: np.ndarray, rng: np.random.Generator):
    """Draw a pulse grid from the Gaussian policy.

    Returns (action, log_prob); the log-probability is that of the raw
    sample, computed before clipping to the amplitude bound.
    """
    action, log_prob, _ = _sample(policy, obs, rng)
    return action, log_prob


def rla1_reward(spec: SystemSpec, pulses: PulseSet, u_target: np.ndarray,
                w_f: float, w_e: float) -> float:
    """Simulator reward: w_f * F(rho_T, rho_out) + w_e * (1 - energetic cost)."""
    reward, _, _ = _rla1_components(spec, pulses, u_target, w_f, w_e)
    return reward


def _rla1_components(spec, pulses, u_target, w_f, w_e):
    rho0 = density(ket(0, spec.dim))
    u_target = np.asarray(u_target, dtype=np.complex128)
    rho_target = u_target @ rho0 @ u_target.conj().T
    rho_out = propagate_noisy(spec, pulses, rho0)
    fid = state_fidelity(rho_target, rho_out)
    cost = energetic_cost(spec, pulses)
    return w_f * fid + w_e * (1.0 - cost), fid, cost


def rla2_reward(target_pulses: PulseSet, action: PulseSet,
                metric: str = "sq") -> float:
    """Imitation reward: negative summed squared (or absolute) difference."""
    if target_pulses.amplitudes.shape != action.amplitudes.shape:
        raise ValueError("pulse grids differ in shape")
    diff = target_pulses.amplitudes - action.amplitudes
    if metric == "sq":
        return float(-np.sum(diff**2))
    if metric == "l1":
        return float(-np.sum(np.abs(diff)))
    raise ValueError("metric must be 'sq' or 'l1'")


def reinforce_update(policy: MlpPolicy, batch: list, config: TrainConfig) -> MlpPolicy:
    """One policy-gradient ascent step from a batch of episodes.

    Maximizes mean((reward - baseline) * log_prob) with a running-mean
    baseline (initialized to the first batch mean) and SGD with momentum.
    Returns a new policy; raises on non-finite gradients.
    """
    if not batch:
        raise ValueError("empty episode batch")
    obs = np.stack([r.observation for r in batch])
    raw = np.stack([r.raw_action for r in batch])
    rewards = np.array([r.reward for r in batch])
    var = np.exp(2.0 * np.stack([r.log_std for r in batch]))

    new = policy.copy()
    baseline = rewards.mean() if new.baseline is None else new.baseline
    adv = rewards - baseline

    means, hs = _forward_batch(new, obs)
    b = len(batch)
    # dJ/dmeans for J = mean_b adv_b * log N(raw_b | means, var)
    g_means = adv[:, None] * (raw - means) / var / b
    delta = g_means * (new.bound - means**2 / new.bound)  # through bound*tanh(z)

    grads_w, grads_b = [], []
    for i in range(len(new.weights) - 1, -1, -1):
        grads_w.append(hs[i].T @ delta)
        grads_b.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ new.weights[i].T) * (1.0 - hs[i] ** 2)
    grads_w.reverse()
    grads_b.reverse()

    for g in grads_w + grads_b:
        if not np.all(np.isfinite(g)):
            raise RuntimeError(
                "non-finite policy gradient; aborting this episode batch "
                f"(rewards {rewards.min():.3g}..{rewards.max():.3g})")

    for i in range(len(new.weights)):
        new.velocity_w[i] = config.momentum * new.velocity_w[i] + grads_w[i]
        new.velocity_b[i] = config.momentum * new.velocity_b[i] + grads_b[i]
        new.weights[i] = new.weights[i] + config.learning_rate * new.velocity_w[i]
        new.biases[i] = new.biases[i] + config.learning_rate * new.velocity_b[i]
        if not (np.all(np.isfinite(new.weights[i])) and np.all(np.isfinite(new.biases[i]))):
            raise RuntimeError("non-finite parameters after update")

    new.baseline = (config.baseline_decay * baseline
                    + (1.0 - config.baseline_decay) * rewards.mean())
    return new


def _target_observation(spec: SystemSpec, u_target: np.ndarray) -> np.ndarray:
    """Flattened real/imag parts of the target state U_T |0..0><0..0| U_T^†."""
    rho0 = density(ket(0, spec.dim))
    u_target = np.asarray(u_target, dtype=np.complex128)
    rho_t = u_target @ rho0 @ u_target.conj().T
    return np.concatenate([rho_t.real.ravel(), rho_t.imag.ravel()])


def _anneal(config: TrainConfig, episode: int) -> float:
    frac = episode / max(1, config.n_episodes - 1)
    return config.std_start + (config.std_end - config.std_start) * frac


def _train(policy, obs, config, reward_fn):
    """Shared episodic loop: sample, score, batch-update."""
    rng = np.random.default_rng(config.seed)
    records = []
    pending = []
    for episode in range(config.n_episodes):
        policy.log_std[:] = math.log(_anneal(config, episode))
        action, _, raw = _sample(policy, obs, rng)
        reward, fid, cost = reward_fn(action)
        rec = EpisodeRecord(obs, action, reward, fid, cost, raw,
                            policy.log_std.copy())
        records.append(rec)
        pending.append(rec)
        if len(pending) >= config.batch_size or episode == config.n_episodes - 1:
            policy = reinforce_update(policy, pending, config)
            pending = []
    return policy, records


def train_rla1(spec: SystemSpec, u_target: np.ndarray, config: TrainConfig,
               init_policy: MlpPolicy | None = None):
    """Train the pulse-devising agent against the (noisy) simulator.

    Returns (policy, per-episode records); the trace has exactly
    config.n_episodes entries and is reproducible for a fixed seed.
    """
    obs = _target_observation(spec, u_target)
    shape = (spec.n_controls, spec.n_slices)
    if init_policy is not None:
        policy = init_policy.copy()
        if policy.obs_dim != obs.shape[0] or policy.action_shape != shape:
            raise ValueError("init_policy shapes do not match this system/target")
    else:
        policy = MlpPolicy.initialize(obs.shape[0], shape, config.hidden_sizes,
                                      config.seed, init_std=config.std_start)

    def score(action):
        return _rla1_components(spec, action, u_target, config.w_f, config.w_e)

    return _train(policy, obs, config, score)


def train_rla2(spec: SystemSpec, grape_pulses: PulseSet, config: TrainConfig):
    """Train the imitation agent to mimic a given pulse grid.

    The per-episode fidelity field records the process overlap between the
    action's unitary and the imitated pulses' unitary (the "theoretical
    unitary" view of this environment).
    """
    shape = (spec.n_controls, spec.n_slices)
    if grape_pulses.amplitudes.shape != shape:
        raise ValueError("grape_pulses shape does not match the system")
    # Constant observation: the target state of the imitated pulses' unitary.
    u_ref, _ = propagate_closed(spec, grape_pulses)
    obs = _target_observation(spec, u_ref)
    policy = MlpPolicy.initialize(obs.shape[0], shape, config.hidden_sizes,
                                  config.seed, init_std=config.std_start)

    def score(action):
        reward = rla2_reward(grape_pulses, action, config.imitation_metric)
        u_act, _ = propagate_closed(spec, action)
        return reward, process_fidelity(u_ref, u_act), energetic_cost(spec, action)

    return _train(policy, obs, config, score)


def warm_start(rla2_policy: MlpPolicy, layer_sizes: tuple | None = None) -> MlpPolicy:
    """Clone a trained imitation policy as the initial RLA-1 policy.

    Parameters are copied; optimizer state (velocities, baseline) is reset.
    Raises if the configured layer shapes differ.
    """
    if layer_sizes is not None and tuple(layer_sizes) != tuple(rla2_policy.layer_sizes):
        raise ValueError(
            f"layer shape mismatch: agent expects {tuple(layer_sizes)}, "
            f"policy has {tuple(rla2_policy.layer_sizes)}")
    fresh = rla2_policy.copy()
    fresh.velocity_w = [np.zeros_like(w) for w in fresh.weights]
    fresh.velocity_b = [np.zeros_like(b) for b in fresh.biases]
    fresh.baseline = None
    return fresh


def save_policy(policy: MlpPolicy, path) -> None:
    """Write a versioned parameter checkpoint (npz)."""
    arrays = {
        "version": np.array(CHECKPOINT_VERSION),
        "layer_sizes": np.array(policy.layer_sizes),
        "action_shape": np.array(policy.action_shape),
        "bound": np.array(policy.bound),
        "log_std": policy.log_std,
    }
    for i, (w, b) in enumerate(zip(policy.weights, policy.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    np.savez(path, **arrays)


def load_policy(path) -> MlpPolicy:
    with np.load(path) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"checkpoint version {version} != {CHECKPOINT_VERSION}")
        sizes = tuple(int(s) for s in data["layer_sizes"])
        weights = [data[f"w{i}"] for i in range(len(sizes) - 1)]
        biases = [data[f"b{i}"] for i in range(len(sizes) - 1)]
        return MlpPolicy(sizes, tuple(int(s) for s in data["action_shape"]),
                         weights, biases, data["log_std"], float(data["bound"]))
