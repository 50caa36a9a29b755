"""Deep-Q-learning controller for the beta exponent.

Each TTI the agent observes a 7-dimensional state (previous beta, the two
requirement distances, mean/std of the normalized delays, mean/std of the
reported MCS indexes), picks a beta increment from a discrete action set
via decayed epsilon-greedy, and learns from an experience-replay buffer
with a periodically synced target network.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .fairness import FairnessCase, FairnessReport
from .qnet import MomentumSgd, QNetwork, loss_and_grads

STATE_DIM = 7

# beta increments: 0 plus four symmetric decade steps, ascending
DEFAULT_ACTIONS = (-1e-1, -1e-2, -1e-3, -1e-4, 0.0, 1e-4, 1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class ActionSpace:
    deltas: tuple[float, ...] = DEFAULT_ACTIONS

    def __post_init__(self):
        if self.deltas.count(0.0) != 1:
            raise ValueError("action space must contain 0 exactly once")
        if sorted(self.deltas) != sorted(-d for d in self.deltas):
            raise ValueError("action space must be symmetric about 0")

    def __len__(self) -> int:
        return len(self.deltas)

    def __getitem__(self, i: int) -> float:
        return self.deltas[i]


@dataclass(frozen=True)
class AgentState:
    """Observation vector fed to the Q-network (raw, unnormalized)."""

    beta_prev: float
    d_inf: float
    d_sup: float
    mean_norm_delay: float
    std_norm_delay: float
    mean_mcs: float
    std_mcs: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.beta_prev, self.d_inf, self.d_sup,
                         self.mean_norm_delay, self.std_norm_delay,
                         self.mean_mcs, self.std_mcs])


def build_state(beta_prev: float, report: FairnessReport,
                norm_delays: np.ndarray,
                mcs_indexes: np.ndarray) -> AgentState:
    """Assemble the observation from this TTI's fairness outputs.

    Standard deviations are population (ddof=0) statistics. mcs_indexes is
    the per-user reported index (mean over RBs of the AMC choice, with -1
    marking outage RBs).
    """
    norm_delays = np.asarray(norm_delays, dtype=float)
    mcs_indexes = np.asarray(mcs_indexes, dtype=float)
    return AgentState(
        beta_prev=float(beta_prev),
        d_inf=report.d_inf,
        d_sup=report.d_sup,
        mean_norm_delay=float(norm_delays.mean()),
        std_norm_delay=float(norm_delays.std()),
        mean_mcs=float(mcs_indexes.mean()),
        std_mcs=float(mcs_indexes.std()),
    )


def reward(case: FairnessCase, delta_beta: float) -> float:
    """Reward for the action applied this TTI, given the resulting case.

    FF earns the maximal reward. In UF only an increase of beta is right
    (paid its own step size); in OF only a decrease is. Wrong-direction or
    idle actions in a non-FF case earn -1.
    """
    if case is FairnessCase.FF:
        return 1.0
    if case is FairnessCase.UF:
        return delta_beta if delta_beta > 0.0 else -1.0
    return -delta_beta if delta_beta < 0.0 else -1.0


@dataclass
class Hyperparameters:
    discount: float = 0.95
    learning_rate: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 32
    replay_capacity: int = 10_000
    target_sync_period: int = 1_000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 100_000  # linear decay horizon, then flat
    hidden_sizes: tuple[int, ...] = (60,)
    beta_init: float = 1.0
    beta_max: float = 10.0


class ReplayBuffer:
    """Bounded FIFO of transitions, stored as flat arrays."""

    def __init__(self, capacity: int, state_dim: int = STATE_DIM):
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=int)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.size = 0
        self._head = 0

    def __len__(self) -> int:
        return self.size

    def push(self, state: np.ndarray, action: int, rew: float,
             next_state: np.ndarray) -> None:
        i = self._head
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = rew
        self.next_states[i] = next_state
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.next_states[idx])


@dataclass
class AgentCore:
    """Online/target networks, replay, exploration schedule and the
    current beta value."""

    hp: Hyperparameters
    actions: ActionSpace
    online: QNetwork
    target: QNetwork
    replay: ReplayBuffer
    optimizer: MomentumSgd
    mcs_table_size: int = 15
    beta: float = field(default=1.0)
    train_steps: int = 0

    @classmethod
    def create(cls, hp: Hyperparameters, rng: np.random.Generator,
               actions: ActionSpace | None = None,
               mcs_table_size: int = 15) -> "AgentCore":
        actions = actions or ActionSpace()
        sizes = [STATE_DIM, *hp.hidden_sizes, len(actions)]
        online = QNetwork(sizes, rng)
        target = online.clone()
        return cls(hp=hp, actions=actions, online=online, target=target,
                   replay=ReplayBuffer(hp.replay_capacity),
                   optimizer=MomentumSgd(online, hp.learning_rate, hp.momentum),
                   mcs_table_size=mcs_table_size, beta=hp.beta_init)

    def normalize(self, state_vec: np.ndarray) -> np.ndarray:
        """Fixed affine scaling so all inputs are O(1): beta relative to its
        cap, distances clipped, MCS stats relative to table size."""
        v = np.array(state_vec, dtype=float)
        v[..., 0] = v[..., 0] / self.hp.beta_max
        v[..., 1] = np.clip(v[..., 1], -5.0, 5.0)
        v[..., 2] = np.clip(v[..., 2], -5.0, 5.0)
        v[..., 5] = v[..., 5] / self.mcs_table_size
        v[..., 6] = v[..., 6] / self.mcs_table_size
        return v

    def epsilon(self, n: int) -> float:
        hp = self.hp
        if hp.epsilon_decay_steps <= 0 or n >= hp.epsilon_decay_steps:
            return hp.epsilon_end
        frac = n / hp.epsilon_decay_steps
        return hp.epsilon_start + frac * (hp.epsilon_end - hp.epsilon_start)

    def q_values(self, state: AgentState) -> np.ndarray:
        return self.online.forward(self.normalize(state.as_vector()))[0]

    def select_action(self, state: AgentState, n: int, training: bool,
                      rng: np.random.Generator | None = None) -> int:
        """Decayed epsilon-greedy during training; pure greedy otherwise.
        Greedy ties break to the lowest action index."""
        if training:
            if rng is None:
                raise ValueError("training selection needs an rng")
            if rng.random() < self.epsilon(n):
                return int(rng.integers(0, len(self.actions)))
        return int(np.argmax(self.q_values(state)))

    def apply_action(self, action_index: int) -> float:
        """Shift beta by the chosen increment, clamped to [0, beta_max]."""
        delta = self.actions[action_index]
        self.beta = float(np.clip(self.beta + delta, 0.0, self.hp.beta_max))
        return self.beta

    def store(self, state: AgentState, action: int, rew: float,
              next_state: AgentState) -> None:
        self.replay.push(self.normalize(state.as_vector()), action, rew,
                         self.normalize(next_state.as_vector()))

    def train_step(self, rng: np.random.Generator) -> float | None:
        """One minibatch update of the online network; no-op while the
        replay holds fewer samples than a batch."""
        hp = self.hp
        if len(self.replay) < hp.batch_size:
            return None
        states, actions, rewards, next_states = self.replay.sample(
            hp.batch_size, rng)
        next_q = self.target.forward(next_states)
        targets = rewards + hp.discount * next_q.max(axis=1)
        loss, grads_w, grads_b = loss_and_grads(self.online, states, actions,
                                                targets)
        self.optimizer.step(self.online, grads_w, grads_b)
        self.train_steps += 1
        if self.train_steps % hp.target_sync_period == 0:
            self.target.copy_from(self.online)
        return loss


CHECKPOINT_VERSION = 1


def save_checkpoint(core: AgentCore, path) -> None:
    """Write the agent to a versioned JSON file: layer sizes, then
    row-major weight and bias arrays for both networks, the hyperparameter
    block, beta and the training-step counter."""
    payload = {
        "version": CHECKPOINT_VERSION,
        "hyperparameters": dataclasses.asdict(core.hp),
        "actions": list(core.actions.deltas),
        "mcs_table_size": core.mcs_table_size,
        "beta": core.beta,
        "train_steps": core.train_steps,
        "online": core.online.to_arrays(),
        "target": core.target.to_arrays(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_checkpoint(path) -> AgentCore:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')!r}")
    hp_fields = payload["hyperparameters"]
    hp_fields["hidden_sizes"] = tuple(hp_fields["hidden_sizes"])
    hp = Hyperparameters(**hp_fields)
    online = QNetwork.from_arrays(payload["online"])
    target = QNetwork.from_arrays(payload["target"])
    core = AgentCore(hp=hp, actions=ActionSpace(tuple(payload["actions"])),
                     online=online, target=target,
                     replay=ReplayBuffer(hp.replay_capacity),
                     optimizer=MomentumSgd(online, hp.learning_rate,
                                           hp.momentum),
                     mcs_table_size=int(payload["mcs_table_size"]),
                     beta=float(payload["beta"]),
                     train_steps=int(payload["train_steps"]))
    return core
