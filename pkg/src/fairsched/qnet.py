"""Minimal fully-connected Q-network: ReLU hidden layers, linear output,
momentum SGD on the mean squared Bellman error. Pure numpy so gradients
can be checked against finite differences and weights serialize to a
plain, versioned format.
"""

from __future__ import annotations

import numpy as np


class QNetwork:
    """MLP mapping a state vector to one Q-value per action."""

    def __init__(self, layer_sizes: list[int], rng: np.random.Generator):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.layer_sizes = list(layer_sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Q-values for a batch (or single) state; deterministic."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.maximum(x @ w + b, 0.0)
        return x @ self.weights[-1] + self.biases[-1]

    def copy_from(self, other: "QNetwork") -> None:
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    def clone(self) -> "QNetwork":
        twin = QNetwork.__new__(QNetwork)
        twin.layer_sizes = list(self.layer_sizes)
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        return twin

    def parameters(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def to_arrays(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_arrays(cls, data: dict) -> "QNetwork":
        net = cls.__new__(cls)
        net.layer_sizes = [int(s) for s in data["layer_sizes"]]
        net.weights = [np.array(w, dtype=float) for w in data["weights"]]
        net.biases = [np.array(b, dtype=float) for b in data["biases"]]
        for w, b, fan_in, fan_out in zip(net.weights, net.biases,
                                         net.layer_sizes, net.layer_sizes[1:]):
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise ValueError("checkpoint layer shapes do not match layer_sizes")
        return net


def loss_and_grads(net: QNetwork, states: np.ndarray, actions: np.ndarray,
                   targets: np.ndarray) -> tuple[float, list, list]:
    """Mean squared error between Q(s, a) and the targets, with gradients.

    loss = mean_i (Q(s_i, a_i) - y_i)^2; only the taken action's output
    contributes per sample. Returns (loss, dW per layer, db per layer).
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    actions = np.asarray(actions, dtype=int)
    targets = np.asarray(targets, dtype=float)
    batch = states.shape[0]

    activations = [states]
    x = states
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        x = np.maximum(x @ w + b, 0.0)
        activations.append(x)
    q = x @ net.weights[-1] + net.biases[-1]

    picked = q[np.arange(batch), actions]
    err = picked - targets
    loss = float(np.mean(err ** 2))

    # dL/dq is nonzero only at the taken actions
    dq = np.zeros_like(q)
    dq[np.arange(batch), actions] = 2.0 * err / batch

    grads_w: list[np.ndarray] = [None] * len(net.weights)
    grads_b: list[np.ndarray] = [None] * len(net.biases)
    delta = dq
    for layer in range(len(net.weights) - 1, -1, -1):
        grads_w[layer] = activations[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ net.weights[layer].T) * (activations[layer] > 0.0)
    return loss, grads_w, grads_b


class MomentumSgd:
    """Classic momentum update: v <- m*v - lr*g; p <- p + v."""

    def __init__(self, net: QNetwork, learning_rate: float, momentum: float):
        self.lr = learning_rate
        self.momentum = momentum
        self.vel_w = [np.zeros_like(w) for w in net.weights]
        self.vel_b = [np.zeros_like(b) for b in net.biases]

    def step(self, net: QNetwork, grads_w: list, grads_b: list) -> None:
        for i in range(len(net.weights)):
            self.vel_w[i] = self.momentum * self.vel_w[i] - self.lr * grads_w[i]
            self.vel_b[i] = self.momentum * self.vel_b[i] - self.lr * grads_b[i]
            net.weights[i] += self.vel_w[i]
            net.biases[i] += self.vel_b[i]
