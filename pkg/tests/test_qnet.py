import numpy as np
import pytest

from fairsched.qnet import MomentumSgd, QNetwork, loss_and_grads


def finite_difference_grads(net, states, actions, targets, h=1e-6):
    """Central differences of the minibatch loss wrt every parameter."""
    grads = []
    for p in net.parameters():
        g = np.zeros_like(p)
        flat = p.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            lp = loss_and_grads(net, states, actions, targets)[0]
            flat[i] = orig - h
            lm = loss_and_grads(net, states, actions, targets)[0]
            flat[i] = orig
            gflat[i] = (lp - lm) / (2 * h)
        grads.append(g)
    return grads


def hidden_preactivations(net, states):
    x = np.atleast_2d(states)
    out = []
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        z = x @ w + b
        out.append(z)
        x = np.maximum(z, 0.0)
    return np.concatenate([z.ravel() for z in out])


def random_problem(seed, batch=8, sizes=(7, 8, 9)):
    """Network + minibatch with hidden pre-activations bounded away from
    the ReLU kink, so central differences stay valid."""
    rng = np.random.default_rng(seed)
    while True:
        net = QNetwork(list(sizes), rng)
        states = rng.standard_normal((batch, sizes[0]))
        actions = rng.integers(0, sizes[-1], batch)
        targets = rng.standard_normal(batch)
        if np.min(np.abs(hidden_preactivations(net, states))) > 1e-4:
            return net, states, actions, targets


def relative_error(analytic, numeric):
    a = np.concatenate([g.ravel() for g in analytic])
    n = np.concatenate([g.ravel() for g in numeric])
    return np.linalg.norm(a - n) / max(np.linalg.norm(a),
                                       np.linalg.norm(n), 1e-12)


class TestGradients:
    def test_matches_finite_differences(self):
        for seed in range(3):
            net, states, actions, targets = random_problem(seed)
            _, gw, gb = loss_and_grads(net, states, actions, targets)
            numeric = finite_difference_grads(net, states, actions, targets)
            assert relative_error(gw + gb, numeric) < 1e-4

    def test_loss_value(self):
        rng = np.random.default_rng(0)
        net = QNetwork([2, 3, 2], rng)
        states = np.array([[1.0, -1.0]])
        q = net.forward(states)[0]
        loss, _, _ = loss_and_grads(net, states, np.array([1]),
                                    np.array([q[1] + 2.0]))
        assert loss == pytest.approx(4.0)

    def test_only_taken_action_contributes(self):
        rng = np.random.default_rng(1)
        net, states, actions, targets = random_problem(5, batch=4)
        loss1, gw1, _ = loss_and_grads(net, states, actions, targets)
        # perturbing an untaken action's output weight column leaves the
        # loss unchanged
        untaken = next(a for a in range(net.n_outputs)
                       if a not in set(actions.tolist()))
        net.weights[-1][:, untaken] += 10.0
        loss2, _, _ = loss_and_grads(net, states, actions, targets)
        assert loss1 == pytest.approx(loss2)


class TestQNetwork:
    def test_shapes(self):
        net = QNetwork([7, 60, 9], np.random.default_rng(0))
        assert net.n_inputs == 7 and net.n_outputs == 9
        assert net.forward(np.zeros(7)).shape == (1, 9)
        assert net.forward(np.zeros((5, 7))).shape == (5, 9)

    def test_deterministic_forward(self):
        net = QNetwork([4, 5, 3], np.random.default_rng(0))
        x = np.random.default_rng(1).standard_normal(4)
        assert np.array_equal(net.forward(x), net.forward(x))

    def test_glorot_bounds(self):
        net = QNetwork([7, 60, 9], np.random.default_rng(0))
        limit0 = np.sqrt(6.0 / (7 + 60))
        assert np.max(np.abs(net.weights[0])) <= limit0
        assert np.all(net.biases[0] == 0.0)

    def test_clone_and_copy_independent(self):
        net = QNetwork([3, 4, 2], np.random.default_rng(0))
        twin = net.clone()
        net.weights[0][0, 0] += 1.0
        assert twin.weights[0][0, 0] != net.weights[0][0, 0]
        twin.copy_from(net)
        assert np.array_equal(twin.weights[0], net.weights[0])

    def test_array_round_trip(self):
        net = QNetwork([3, 4, 2], np.random.default_rng(7))
        back = QNetwork.from_arrays(net.to_arrays())
        for a, b in zip(net.parameters(), back.parameters()):
            assert np.array_equal(a, b)

    def test_bad_shapes_rejected(self):
        net = QNetwork([3, 4, 2], np.random.default_rng(7))
        data = net.to_arrays()
        data["layer_sizes"] = [3, 5, 2]
        with pytest.raises(ValueError):
            QNetwork.from_arrays(data)


class TestMomentumSgd:
    def test_zero_learning_rate_is_noop(self):
        net, states, actions, targets = random_problem(2)
        before = [p.copy() for p in net.parameters()]
        opt = MomentumSgd(net, learning_rate=0.0, momentum=0.9)
        _, gw, gb = loss_and_grads(net, states, actions, targets)
        opt.step(net, gw, gb)
        for a, b in zip(before, net.parameters()):
            assert np.array_equal(a, b)

    def test_descends_on_fixed_batch(self):
        net, states, actions, targets = random_problem(3)
        opt = MomentumSgd(net, learning_rate=1e-3, momentum=0.9)
        loss0, gw, gb = loss_and_grads(net, states, actions, targets)
        for _ in range(300):
            opt.step(net, gw, gb)
            _, gw, gb = loss_and_grads(net, states, actions, targets)
        loss1, _, _ = loss_and_grads(net, states, actions, targets)
        assert loss1 < loss0
