"""Run metrics: per-TTI records, subsampled normalized-delay samples and
end-of-run aggregates, with deterministic CSV/JSON writers.

File formats (stable, consumed by the report tooling):
  metrics.csv   one row per TTI: tti, fairness_case, beta, reward,
                mean_queue_delay, d_inf, d_sup, scheduled_bits,
                delivered_bits (floats via repr, so identical runs are
                byte-identical)
  samples.csv   subsampled per-user normalized delays: tti, user, norm_delay
  summary.json  schema_version 1 aggregate block, see summarize()
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

SUMMARY_SCHEMA_VERSION = 1

METRICS_COLUMNS = ("tti", "fairness_case", "beta", "reward",
                   "mean_queue_delay", "d_inf", "d_sup",
                   "scheduled_bits", "delivered_bits")


@dataclass
class TtiRecord:
    tti: int
    fairness_case: str
    beta: float
    reward: float
    mean_queue_delay: float   # s, averaged over users
    d_inf: float
    d_sup: float
    scheduled_bits: int
    delivered_bits: int


@dataclass
class MetricsLog:
    """Accumulates per-TTI records during a run; aggregates on demand."""

    warmup_ttis: int
    subsample_every: int
    records: list[TtiRecord] = field(default_factory=list)
    sample_ttis: list[int] = field(default_factory=list)
    norm_delay_samples: list[np.ndarray] = field(default_factory=list)
    per_user_delay_ms: np.ndarray | None = None
    bits_arrived: int = 0
    bits_delivered: int = 0

    def add(self, record: TtiRecord, norm_delays: np.ndarray) -> None:
        self.records.append(record)
        n = record.tti
        if n >= self.warmup_ttis and n % self.subsample_every == 0:
            self.sample_ttis.append(n)
            self.norm_delay_samples.append(np.array(norm_delays, dtype=float))

    def post_warmup(self) -> list[TtiRecord]:
        return [r for r in self.records if r.tti >= self.warmup_ttis]

    def case_percentages(self) -> dict[str, float]:
        recs = self.post_warmup()
        total = max(len(recs), 1)
        counts = {"FF": 0, "UF": 0, "OF": 0}
        for r in recs:
            counts[r.fairness_case] += 1
        return {case: 100.0 * c / total for case, c in counts.items()}

    def pooled_samples(self) -> np.ndarray:
        if not self.norm_delay_samples:
            return np.empty(0)
        return np.concatenate(self.norm_delay_samples)

    def summarize(self, meta: dict) -> dict:
        """Aggregate block written to summary.json. `meta` carries run
        identity (policy, seed, steps, cell size, fairness params)."""
        pct = self.case_percentages()
        recs = self.post_warmup()
        mean_w = (float(np.mean([r.mean_queue_delay for r in recs]))
                  if recs else 0.0)
        mean_reward = float(np.mean([r.reward for r in recs])) if recs else 0.0
        per_user = (self.per_user_delay_ms.tolist()
                    if self.per_user_delay_ms is not None else [])
        return {
            "schema_version": SUMMARY_SCHEMA_VERSION,
            **meta,
            "warmup_ttis_used": self.warmup_ttis,
            "ff_pct": pct["FF"],
            "uf_pct": pct["UF"],
            "of_pct": pct["OF"],
            "avg_delay_ms": float(np.mean(per_user)) if per_user else 0.0,
            "max_user_delay_ms": float(np.max(per_user)) if per_user else 0.0,
            "per_user_delay_ms": per_user,
            "time_avg_queue_delay_ms": 1e3 * mean_w,
            "mean_reward": mean_reward,
            "final_beta": self.records[-1].beta if self.records else 0.0,
            "bits_arrived": self.bits_arrived,
            "bits_delivered": self.bits_delivered,
        }

    # ---------- writers ----------

    def write_metrics_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(METRICS_COLUMNS)
            for r in self.records:
                writer.writerow([r.tti, r.fairness_case, repr(r.beta),
                                 repr(r.reward), repr(r.mean_queue_delay),
                                 repr(r.d_inf), repr(r.d_sup),
                                 r.scheduled_bits, r.delivered_bits])

    def write_samples_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tti", "user", "norm_delay"])
            for tti, sample in zip(self.sample_ttis, self.norm_delay_samples):
                for user, w in enumerate(sample):
                    writer.writerow([tti, user, repr(float(w))])

    def write_summary_json(self, path, meta: dict) -> None:
        with open(path, "w") as fh:
            json.dump(self.summarize(meta), fh, indent=2, sort_keys=True)
            fh.write("\n")
