"""Shared generators for scheduler-equivalence tests."""

import numpy as np
import pytest

from fairsched.channel import CellGeometry, McsTable, rb_rate_bits
from fairsched.sched import SchedulerState


@pytest.fixture
def small_geometry():
    return CellGeometry(n_rbs=4, n_users=3)


def ladder_delays(rng: np.random.Generator, n_users: int) -> np.ndarray:
    """Strictly distinct delays >= 1 ms whose pairwise ratios are >= 4/3.

    With ratios this large, a delay exponent of 50 dominates any spread in
    the QoS weights (<= 100x) and rates (<= 37x), so the large-beta limit
    has converged: the per-RB argmax provably lands on the max-delay user.
    """
    base = rng.uniform(1.4, 2.0)
    jitter = rng.uniform(1.0, 1.05, n_users)
    exponents = rng.permutation(n_users).astype(float)
    return 1e-3 * base ** exponents * jitter


def random_instance(rng: np.random.Generator, n_users: int, n_rbs: int,
                    beta: float = 1.0, ladder: bool = False):
    """Random (rates, delays, scheduler state) tuple with strictly positive
    rates drawn from the default MCS table."""
    geometry = CellGeometry(n_rbs=n_rbs, n_users=n_users)
    table = McsTable.default()
    entry_rates = np.array([rb_rate_bits(e.spectral_efficiency, geometry)
                            for e in table.entries])
    rates = entry_rates[rng.integers(0, len(entry_rates), (n_users, n_rbs))]
    if ladder:
        delays = ladder_delays(rng, n_users)
    else:
        delays = rng.uniform(0.0, 0.5, n_users)
    state = SchedulerState(avg_rate=rng.uniform(50.0, 5000.0, n_users),
                           beta=beta)
    return rates, delays, state
