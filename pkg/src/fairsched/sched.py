"""Scheduling policies (PF, LDF, M-LWDF, beta-M-LWDF) and the per-TTI
resource-block allocation sweep.

All four policies rank (user, RB) pairs by a utility and the allocator
assigns each RB to its utility-maximizing user. PF weighs instantaneous
rate against the moving-average rate; LDF serves the longest-waiting queue
with the whole TTI; M-LWDF multiplies QoS weight, queue delay and rate;
beta-M-LWDF raises the delay term to a tunable exponent. beta=0 recovers
PF (up to a common factor), beta=1 recovers M-LWDF, and large beta
approaches LDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

POLICIES = ("pf", "ldf", "mlwdf", "beta-mlwdf")

# floor keeping the PF/M-LWDF rate denominator away from zero at cold start
RATE_FLOOR = 1e-3
# floor keeping W**beta away from log(0); applied to positive delays only
DELAY_FLOOR = 1e-6


@dataclass
class SchedulerState:
    """Per-user moving-average rates and QoS parameters shared by all
    policies, plus the current beta exponent."""

    avg_rate: np.ndarray          # bits/TTI, floored at RATE_FLOOR
    t_pf: float = 100.0
    beta: float = 1.0
    delta_u: np.ndarray | float = 0.05   # target delay-violation probability
    t_u: np.ndarray | float = 0.1        # delay budget, seconds

    def __post_init__(self):
        self.avg_rate = np.maximum(np.asarray(self.avg_rate, dtype=float),
                                   RATE_FLOOR)
        if self.t_pf <= 0:
            raise ValueError("t_pf must be > 0")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        delta = np.asarray(self.delta_u, dtype=float)
        t_u = np.asarray(self.t_u, dtype=float)
        if np.any(delta <= 0) or np.any(delta >= 1):
            raise ValueError("delta_u must lie in (0, 1)")
        if np.any(t_u <= 0):
            raise ValueError("t_u must be > 0")

    @property
    def a_u(self) -> np.ndarray | float:
        """QoS numerator -ln(delta_u) * T_u."""
        return -np.log(self.delta_u) * self.t_u


@dataclass
class AllocationGrid:
    """Outcome of one TTI of scheduling: per-RB assignment and the bits
    granted to each user."""

    rb_user: np.ndarray    # (n_rbs,) user index, -1 for unassigned
    rb_mcs: np.ndarray     # (n_rbs,) MCS index, -1 for unassigned
    rb_rate: np.ndarray    # (n_rbs,) bits granted on the RB
    user_bits: np.ndarray  # (n_users,) total bits granted per user


def qos_factor(u: int, state: SchedulerState) -> float:
    """g_u = -ln(delta_u) * T_u / avg_rate_u."""
    a = np.broadcast_to(np.asarray(state.a_u, dtype=float),
                        state.avg_rate.shape)
    return float(a[u] / state.avg_rate[u])


def qos_factors(state: SchedulerState) -> np.ndarray:
    a = np.broadcast_to(np.asarray(state.a_u, dtype=float),
                        state.avg_rate.shape)
    return a / state.avg_rate


def update_avg_rate(state: SchedulerState, achieved: np.ndarray) -> None:
    """Exponential moving average of the achieved rate, window t_pf,
    floored so utilities never divide by zero."""
    w = 1.0 / state.t_pf
    state.avg_rate = np.maximum(
        (1.0 - w) * state.avg_rate + w * np.asarray(achieved, dtype=float),
        RATE_FLOOR)


def delay_power(delays: np.ndarray, beta: float) -> np.ndarray:
    """W**beta with 0**0 := 1, 0**beta := 0, and positive delays floored at
    DELAY_FLOOR before exponentiation to keep log finite.

    beta == 0 and beta == 1 short-circuit to exact ones / exact delays so
    the PF and M-LWDF reductions hold bit for bit.
    """
    delays = np.asarray(delays, dtype=float)
    if beta == 0.0:
        return np.ones_like(delays)
    if beta == 1.0:
        return delays.copy()
    out = np.power(np.maximum(delays, DELAY_FLOOR), beta)
    return np.where(delays == 0.0, 0.0, out)


def utility_pf(u: int, k: int, rates: np.ndarray,
               state: SchedulerState) -> float:
    """Instantaneous rate over moving-average rate."""
    return float(rates[u, k] / state.avg_rate[u])


def utility_ldf(u: int, delays: np.ndarray) -> float:
    """Queue delay alone; RB-independent."""
    return float(delays[u])


def utility_mlwdf(u: int, k: int, rates: np.ndarray, delays: np.ndarray,
                  state: SchedulerState) -> float:
    """QoS weight x queue delay x instantaneous rate."""
    return float(qos_factor(u, state) * delays[u] * rates[u, k])


def utility_beta(u: int, k: int, rates: np.ndarray, delays: np.ndarray,
                 state: SchedulerState) -> float:
    """QoS weight x delay**beta x instantaneous rate."""
    w_term = delay_power(delays[u], state.beta)
    return float(qos_factor(u, state) * w_term * rates[u, k])


def utility_grid(policy: str, rates: np.ndarray, delays: np.ndarray,
                 state: SchedulerState) -> np.ndarray:
    """(n_users, n_rbs) utility matrix for the per-RB argmax policies.

    M-LWDF and beta-M-LWDF share one expression (weighted = g * delay term)
    so the beta=1 grid reproduces the M-LWDF grid exactly.
    """
    if policy == "pf":
        return rates / state.avg_rate[:, None]
    if policy == "mlwdf":
        weighted = qos_factors(state) * delays
    elif policy == "beta-mlwdf":
        weighted = qos_factors(state) * delay_power(delays, state.beta)
    else:
        raise ValueError(f"no utility grid for policy {policy!r}")
    return weighted[:, None] * rates


def allocate_tti(policy: str, rates: np.ndarray, delays: np.ndarray,
                 state: SchedulerState,
                 mcs_indexes: np.ndarray | None = None) -> AllocationGrid:
    """Assign every RB for one TTI.

    PF / M-LWDF / beta-M-LWDF sweep RBs in index order and give each to
    the utility-maximizing user; users with zero rate on an RB are
    excluded, and an RB nobody can use stays unassigned. LDF grants the
    whole TTI to the single longest-delay user (ties: lowest user index),
    with per-RB MCS still chosen per RB.
    """
    rates = np.asarray(rates, dtype=float)
    delays = np.asarray(delays, dtype=float)
    n_users, n_rbs = rates.shape
    if delays.shape != (n_users,):
        raise ValueError("delays must have one entry per user")

    rb_user = np.full(n_rbs, -1, dtype=int)
    if policy == "ldf":
        best = int(np.argmax(delays))
        rb_user[rates[best] > 0.0] = best
    elif policy in ("pf", "mlwdf", "beta-mlwdf"):
        util = np.where(rates > 0.0, utility_grid(policy, rates, delays, state),
                        -np.inf)
        # np.argmax returns the first (lowest-index) maximizer
        winner = np.argmax(util, axis=0)
        feasible = np.isfinite(util[winner, np.arange(n_rbs)])
        rb_user = np.where(feasible, winner, -1)
    else:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")

    assigned = rb_user >= 0
    safe_user = np.where(assigned, rb_user, 0)
    cols = np.arange(n_rbs)
    rb_rate = np.where(assigned, rates[safe_user, cols], 0.0)
    if mcs_indexes is None:
        rb_mcs = np.full(n_rbs, -1, dtype=int)
    else:
        rb_mcs = np.where(assigned, np.asarray(mcs_indexes)[safe_user, cols], -1)
    user_bits = np.bincount(rb_user[assigned], weights=rb_rate[assigned],
                            minlength=n_users)
    return AllocationGrid(rb_user=rb_user, rb_mcs=rb_mcs, rb_rate=rb_rate,
                          user_bits=user_bits)
