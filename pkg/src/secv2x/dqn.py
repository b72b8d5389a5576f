"""Minimal deep Q-network in plain numpy.

Fully connected ReLU network trained with RMSProp on mean squared TD error,
plus the supporting pieces: uniform experience replay, a periodically synced
target copy, linear epsilon decay and masked greedy action selection.  Kept
dependency free so gradients stay checkable against finite differences and
checkpoints stay bit exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

CHECKPOINT_MAGIC = b"SECV2XQ1"


@dataclass
class DQNParams:
    hidden_sizes: tuple[int, ...] = (500, 250, 120)
    learning_rate: float = 0.01
    rmsprop_decay: float = 0.9
    rmsprop_eps: float = 1e-8
    gamma: float = 0.5
    batch_size: int = 2000
    replay_capacity: int = 20000
    target_sync_period: int = 100
    epsilon_start: float = 1.0
    epsilon_end: float = 0.02
    epsilon_decay_fraction: float = 0.8

    def validate(self) -> None:
        if not self.hidden_sizes or any(h <= 0 for h in self.hidden_sizes):
            raise ValueError("hidden_sizes must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 < self.rmsprop_decay < 1.0:
            raise ValueError("rmsprop_decay must lie in (0, 1)")
        if self.batch_size <= 0 or self.replay_capacity < self.batch_size:
            raise ValueError("replay_capacity must cover at least one batch")
        if self.target_sync_period <= 0:
            raise ValueError("target_sync_period must be positive")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError("epsilon schedule must satisfy 0 <= end <= start <= 1")
        if not 0.0 < self.epsilon_decay_fraction <= 1.0:
            raise ValueError("epsilon_decay_fraction must lie in (0, 1]")


def glorot_uniform(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class QNetwork:
    """MLP mapping a state vector to one Q value per action.

    Hidden layers use ReLU, the output layer is linear.  Parameters live in
    ``weights``/``biases``; RMSProp accumulators are allocated alongside so an
    optimizer step needs no extra state.
    """

    def __init__(self, state_dim: int, num_actions: int,
                 hidden_sizes: tuple[int, ...], rng: np.random.Generator):
        if state_dim <= 0 or num_actions <= 0:
            raise ValueError("state_dim and num_actions must be positive")
        self.state_dim = int(state_dim)
        self.num_actions = int(num_actions)
        self.layer_sizes = [self.state_dim, *hidden_sizes, self.num_actions]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            self.weights.append(glorot_uniform(fan_in, fan_out, rng))
            self.biases.append(np.zeros(fan_out))
        self.acc_w = [np.zeros_like(w) for w in self.weights]
        self.acc_b = [np.zeros_like(b) for b in self.biases]

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def num_parameters(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Q values for a single state (1d) or a batch of states (2d)."""
        single = x.ndim == 1
        h = np.atleast_2d(np.asarray(x, dtype=float))
        if h.shape[1] != self.state_dim:
            raise ValueError(f"expected state dim {self.state_dim}, got {h.shape[1]}")
        for i in range(self.num_layers - 1):
            h = np.maximum(h @ self.weights[i] + self.biases[i], 0.0)
        q = h @ self.weights[-1] + self.biases[-1]
        return q[0] if single else q

    def forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Batch forward pass keeping layer activations for backprop."""
        h = np.asarray(x, dtype=float)
        activations = [h]
        for i in range(self.num_layers - 1):
            h = np.maximum(h @ self.weights[i] + self.biases[i], 0.0)
            activations.append(h)
        q = h @ self.weights[-1] + self.biases[-1]
        return q, activations

    def copy_from(self, other: "QNetwork") -> None:
        for mine, theirs in zip(self.weights, other.weights):
            mine[...] = theirs
        for mine, theirs in zip(self.biases, other.biases):
            mine[...] = theirs

    def clone(self) -> "QNetwork":
        twin = QNetwork.__new__(QNetwork)
        twin.state_dim = self.state_dim
        twin.num_actions = self.num_actions
        twin.layer_sizes = list(self.layer_sizes)
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        twin.acc_w = [a.copy() for a in self.acc_w]
        twin.acc_b = [a.copy() for a in self.acc_b]
        return twin


@dataclass
class ReplayBuffer:
    """Fixed-capacity ring buffer of (s, a, r, s') transitions."""

    capacity: int
    state_dim: int
    states: np.ndarray = field(init=False)
    actions: np.ndarray = field(init=False)
    rewards: np.ndarray = field(init=False)
    next_states: np.ndarray = field(init=False)
    _size: int = field(init=False, default=0)
    _head: int = field(init=False, default=0)

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        self.states = np.zeros((self.capacity, self.state_dim))
        self.actions = np.zeros(self.capacity, dtype=np.int64)
        self.rewards = np.zeros(self.capacity)
        self.next_states = np.zeros((self.capacity, self.state_dim))

    def __len__(self) -> int:
        return self._size

    def push(self, state: np.ndarray, action: int, reward: float,
             next_state: np.ndarray) -> None:
        i = self._head
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self._head = (self._head + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Uniform sample without replacement; requires len >= batch_size."""
        if batch_size > self._size:
            raise ValueError("not enough stored transitions to sample a batch")
        idx = rng.choice(self._size, size=batch_size, replace=False)
        return (self.states[idx], self.actions[idx],
                self.rewards[idx], self.next_states[idx])


def epsilon_by_step(step: int, total_steps: int, params: DQNParams) -> float:
    """Linear decay from epsilon_start to epsilon_end over the first
    ``epsilon_decay_fraction`` of training steps, constant afterwards."""
    horizon = params.epsilon_decay_fraction * total_steps
    if horizon <= 0:
        return params.epsilon_end
    frac = min(step / horizon, 1.0)
    return params.epsilon_start + frac * (params.epsilon_end - params.epsilon_start)


def select_action(net: QNetwork, state: np.ndarray, epsilon: float,
                  allowed: np.ndarray, rng: np.random.Generator) -> int:
    """Epsilon-greedy over the allowed actions only.

    Exploration draws uniformly from the allowed set; exploitation takes the
    allowed action with the highest Q value, lowest index on ties.
    """
    allowed = np.asarray(allowed, dtype=bool)
    candidates = np.flatnonzero(allowed)
    if candidates.size == 0:
        raise ValueError("action mask allows no actions")
    if rng.random() < epsilon:
        return int(rng.choice(candidates))
    q = net.forward(state)
    q_allowed = np.where(allowed, q, -np.inf)
    return int(np.argmax(q_allowed))


def loss_and_gradients(net: QNetwork, target_net: QNetwork,
                       states: np.ndarray, actions: np.ndarray,
                       rewards: np.ndarray, next_states: np.ndarray,
                       gamma: float, next_mask: np.ndarray | None = None,
                       ) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean squared TD error and its gradients w.r.t. the online network.

    Targets r + gamma * max_a' Q_target(s', a') are treated as constants.
    ``next_mask`` restricts the target max to allowed actions (same mask for
    every sample in the batch); None means all actions are allowed.
    """
    batch = states.shape[0]
    q_all, activations = net.forward_cached(states)
    q_taken = q_all[np.arange(batch), actions]

    q_next = target_net.forward(next_states)
    if next_mask is not None:
        q_next = np.where(np.asarray(next_mask, dtype=bool), q_next, -np.inf)
    targets = rewards + gamma * q_next.max(axis=1)

    td = q_taken - targets
    loss = float(np.mean(td ** 2))

    # dL/dq_all is nonzero only at the taken action of each sample.
    dq = np.zeros_like(q_all)
    dq[np.arange(batch), actions] = 2.0 * td / batch

    grads_w = [np.empty(0)] * net.num_layers
    grads_b = [np.empty(0)] * net.num_layers
    delta = dq
    for i in range(net.num_layers - 1, -1, -1):
        grads_w[i] = activations[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i].T) * (activations[i] > 0.0)
    return loss, grads_w, grads_b


def rmsprop_step(net: QNetwork, grads_w: list[np.ndarray],
                 grads_b: list[np.ndarray], params: DQNParams) -> None:
    """In-place RMSProp update of the online network.

    acc <- decay * acc + (1 - decay) * g^2
    theta <- theta - lr * g / (sqrt(acc) + eps)
    """
    lr, decay, eps = params.learning_rate, params.rmsprop_decay, params.rmsprop_eps
    for w, g, acc in zip(net.weights, grads_w, net.acc_w):
        acc *= decay
        acc += (1.0 - decay) * g * g
        w -= lr * g / (np.sqrt(acc) + eps)
    for b, g, acc in zip(net.biases, grads_b, net.acc_b):
        acc *= decay
        acc += (1.0 - decay) * g * g
        b -= lr * g / (np.sqrt(acc) + eps)


def sync_target(net: QNetwork, target_net: QNetwork, gradient_step: int,
                period: int) -> bool:
    """Copy online parameters into the target every ``period`` gradient steps.

    Returns True when a copy happened.  Step counting starts at 1: the first
    sync lands after ``period`` updates.
    """
    if gradient_step % period == 0:
        target_net.copy_from(net)
        return True
    return False


def save_qnetwork(path, net: QNetwork) -> None:
    """Write an exact binary snapshot of the network parameters.

    Layout: magic, 4-byte little-endian JSON header length, JSON header with
    the layer sizes, then each layer's weight matrix (row major) and bias
    vector as raw little-endian float64, in layer order.  Loading restores
    parameters bit for bit; optimizer accumulators are not part of the file.
    """
    header = json.dumps({"layer_sizes": net.layer_sizes}).encode()
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        for w, b in zip(net.weights, net.biases):
            f.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_qnetwork(path) -> QNetwork:
    with open(path, "rb") as f:
        magic = f.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"not a checkpoint file: {path}")
        (header_len,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(header_len).decode())
        sizes = [int(s) for s in header["layer_sizes"]]
        if len(sizes) < 2:
            raise ValueError("checkpoint header must list at least two layer sizes")
        net = QNetwork(sizes[0], sizes[-1], tuple(sizes[1:-1]),
                       np.random.default_rng(0))
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            w = np.frombuffer(f.read(8 * fan_in * fan_out), dtype="<f8")
            net.weights[i] = w.reshape(fan_in, fan_out).copy()
            net.biases[i] = np.frombuffer(f.read(8 * fan_out), dtype="<f8").copy()
            net.acc_w[i] = np.zeros_like(net.weights[i])
            net.acc_b[i] = np.zeros_like(net.biases[i])
        trailing = f.read(1)
        if trailing:
            raise ValueError("checkpoint has trailing bytes; file is corrupt")
    return net
