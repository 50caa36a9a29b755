"""Simulation loop: channel -> AMC -> traffic -> scheduler -> QoS -> agent,
one TTI at a time, with metric collection and derived seeding.

One master seed is split into named sub-streams (mean SNRs, fading,
traffic phases, block errors, agent init, exploration, replay sampling),
so identical configs produce bit-identical trajectories and different
policies can share identical environment realizations.
"""

from __future__ import annotations

import logging

import numpy as np

from . import fairness as fns
from . import sched as sched_mod
from . import traffic as traffic_mod
from .agent import AgentCore, AgentState, ActionSpace, build_state, reward
from .channel import (ChannelState, advance_channel, draw_mean_snrs,
                      init_channel, rb_rate_bits, select_mcs_grid)
from .config import SimConfig
from .metrics import MetricsLog, TtiRecord

log = logging.getLogger("fairsched.sim")

STREAM_NAMES = ("snr", "channel", "traffic", "bler", "agent_init",
                "explore", "replay")


def derive_rngs(seed: int) -> dict[str, np.random.Generator]:
    """Named RNG streams spawned from one master seed, in a fixed order."""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(seq)
            for name, seq in zip(STREAM_NAMES, children)}


class Simulation:
    """Owns all mutable state of one run; strictly sequential."""

    def __init__(self, config: SimConfig, training: bool = False,
                 agent_core: AgentCore | None = None):
        self.config = config
        self.training = training
        geo = config.geometry
        self.rngs = derive_rngs(config.seed)
        self.mcs_table = config.mcs_table()

        # snr_seed >= 0 pins the cell's mean-SNR draw while the other
        # streams follow the master seed (held-out runs on the same cell)
        snr_rng = (self.rngs["snr"] if config.snr_seed < 0
                   else derive_rngs(config.snr_seed)["snr"])
        mean_snr = draw_mean_snrs(snr_rng, config.snr.mu_gamma_db,
                                  config.snr.sigma_gamma_db, geo.n_users)
        self.chan: ChannelState = init_channel(geo, mean_snr,
                                               self.rngs["channel"])

        self.queues = [traffic_mod.UserQueue(u) for u in range(geo.n_users)]
        period = round(config.traffic.t_cbr / geo.tti)
        if config.traffic.random_phases:
            self.phases = self.rngs["traffic"].integers(
                0, period, geo.n_users).tolist()
        else:
            self.phases = [0] * geo.n_users

        # cold-start moving average: the rate of the weakest MCS entry
        floor_rate = rb_rate_bits(
            self.mcs_table.entries[0].spectral_efficiency, geo)
        self.sched_state = sched_mod.SchedulerState(
            avg_rate=np.full(geo.n_users, floor_rate),
            t_pf=config.scheduler.t_pf,
            beta=config.agent.beta_init,
            delta_u=config.scheduler.delta_u,
            t_u=config.scheduler.t_u)

        self.policy = config.scheduler.policy
        self.agent: AgentCore | None = None
        if self.policy == "beta-mlwdf" and config.agent_enabled:
            if agent_core is not None:
                self.agent = agent_core
            else:
                self.agent = AgentCore.create(
                    config.agent, self.rngs["agent_init"],
                    actions=ActionSpace(tuple(config.actions)),
                    mcs_table_size=len(self.mcs_table))
            self.sched_state.beta = self.agent.beta

        warmup = (config.warmup_ttis
                  if config.warmup_ttis < config.steps else 0)
        self.metrics = MetricsLog(warmup_ttis=warmup,
                                  subsample_every=config.subsample_every)

        self.prev_state: AgentState | None = None
        self.pending_action: int | None = None
        # sojourn bookkeeping: departed packets plus end-of-run censoring
        self.sojourn_sum = np.zeros(geo.n_users)
        self.sojourn_count = np.zeros(geo.n_users, dtype=int)

    def step(self, n: int) -> TtiRecord:
        """Advance the world by one TTI and log it."""
        cfg = self.config
        geo = cfg.geometry
        tti = geo.tti

        self.chan = advance_channel(self.chan, geo, self.rngs["channel"])
        mcs_grid, rates = select_mcs_grid(self.chan.inst_snr, self.mcs_table,
                                          geo)

        traffic_mod.generate_arrivals(self.queues, n, cfg.traffic.s_cbr_bytes,
                                      cfg.traffic.t_cbr, tti, self.phases)
        delays = np.array([traffic_mod.queue_delay(q, n, tti)
                           for q in self.queues])

        applied_delta = 0.0
        if self.agent is not None and self.pending_action is not None:
            applied_delta = self.agent.actions[self.pending_action]
            self.sched_state.beta = self.agent.apply_action(self.pending_action)

        # empty buffers make a user unschedulable this TTI (rate-0 exclusion)
        backlogged = np.array([len(q) > 0 for q in self.queues])
        eff_rates = np.where(backlogged[:, None], rates, 0.0)
        grid = sched_mod.allocate_tti(self.policy, eff_rates, delays,
                                      self.sched_state, mcs_grid)

        success = self.rngs["bler"].random(geo.n_users) >= cfg.bler_target
        delivered = np.zeros(geo.n_users)
        for u in np.nonzero(grid.user_bits > 0.0)[0]:
            tb_bits = int(round(grid.user_bits[u]))
            got, departed = traffic_mod.serve(self.queues[u], tb_bits,
                                              bool(success[u]))
            delivered[u] = got
            for arrival, _size in departed:
                self.sojourn_sum[u] += (n - arrival) * tti
                self.sojourn_count[u] += 1

        sched_mod.update_avg_rate(self.sched_state, delivered)

        post_delays = np.array([traffic_mod.queue_delay(q, n, tti)
                                for q in self.queues])
        report = fns.evaluate(post_delays, cfg.fairness)
        norm = fns.normalized_delays(post_delays)
        rew = reward(report.case, applied_delta)

        if self.agent is not None:
            mcs_report = mcs_grid.mean(axis=1)
            next_state = build_state(self.agent.beta, report, norm, mcs_report)
            if self.training and self.prev_state is not None \
                    and self.pending_action is not None:
                self.agent.store(self.prev_state, self.pending_action, rew,
                                 next_state)
            self.pending_action = self.agent.select_action(
                next_state, n, self.training, self.rngs["explore"])
            if self.training:
                self.agent.train_step(self.rngs["replay"])
            self.prev_state = next_state

        record = TtiRecord(
            tti=n, fairness_case=report.case.value,
            beta=self.sched_state.beta, reward=rew,
            mean_queue_delay=float(post_delays.mean()),
            d_inf=report.d_inf, d_sup=report.d_sup,
            scheduled_bits=int(round(grid.user_bits.sum())),
            delivered_bits=int(delivered.sum()))
        self.metrics.add(record, norm)
        return record

    def finalize(self) -> MetricsLog:
        """Close the books: censored sojourn means and conservation check."""
        tti = self.config.geometry.tti
        end = self.config.steps
        arrived = delivered_total = queued = 0
        per_user_ms = np.zeros(self.config.geometry.n_users)
        for u, q in enumerate(self.queues):
            arrived += q.bits_arrived
            delivered_total += q.bits_delivered
            queued += q.bits_queued
            # censoring: packets still queued count their age so far
            total = self.sojourn_sum[u] + sum(
                (end - p.arrival_tti) * tti for p in q.packets)
            count = self.sojourn_count[u] + len(q.packets)
            per_user_ms[u] = 1e3 * total / count if count else 0.0
        if arrived != delivered_total + queued:
            raise AssertionError(
                f"bit conservation violated: arrived={arrived} "
                f"delivered={delivered_total} queued={queued}")
        self.metrics.per_user_delay_ms = per_user_ms
        self.metrics.bits_arrived = arrived
        self.metrics.bits_delivered = delivered_total
        return self.metrics

    def summary_meta(self) -> dict:
        cfg = self.config
        return {
            "policy": self.policy,
            "steps": cfg.steps,
            "seed": cfg.seed,
            "n_users": cfg.geometry.n_users,
            "n_rbs": cfg.geometry.n_rbs,
            "lambda": cfg.fairness.lam,
            "psi": cfg.fairness.psi,
            "xi": cfg.fairness.xi,
            "training": self.training,
        }


def run(config: SimConfig, training: bool = False,
        agent_core: AgentCore | None = None) -> tuple[MetricsLog, Simulation]:
    """Execute `config.steps` TTIs and return the finalized metrics."""
    sim = Simulation(config, training=training, agent_core=agent_core)
    log.info("run: policy=%s steps=%d seed=%d training=%s",
             sim.policy, config.steps, config.seed, training)
    for n in range(config.steps):
        sim.step(n)
    sim.finalize()
    log.info("run done: %s", sim.metrics.case_percentages())
    return sim.metrics, sim
