"""Run configuration: a flat `key = value` text format whose keys mirror
the network-parameter table (units in the key names), loaded into nested
dataclasses with SI units.

Unknown keys are rejected so typos fail fast. Every field has a default,
so an empty file reproduces the reference cell setup.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .agent import DEFAULT_ACTIONS, Hyperparameters
from .channel import CellGeometry, McsTable
from .fairness import FairnessParams
from .sched import POLICIES


@dataclass(frozen=True)
class TrafficConfig:
    s_cbr_bytes: int = 850
    t_cbr: float = 6e-3       # s
    random_phases: bool = False

    def __post_init__(self):
        if self.s_cbr_bytes < 0:
            raise ValueError("s_cbr_bytes must be >= 0")
        if self.t_cbr <= 0:
            raise ValueError("t_cbr must be > 0")


@dataclass(frozen=True)
class SnrConfig:
    mu_gamma_db: float = 15.0
    sigma_gamma_db: float = 3.0

    def __post_init__(self):
        if self.sigma_gamma_db < 0:
            raise ValueError("sigma_gamma_db must be >= 0")


@dataclass(frozen=True)
class SchedulerConfig:
    policy: str = "beta-mlwdf"
    t_pf: float = 100.0
    delta_u: float = 0.05
    t_u: float = 0.1          # s

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not 0 < self.delta_u < 1:
            raise ValueError("delta_u must lie in (0, 1)")
        if self.t_pf <= 0 or self.t_u <= 0:
            raise ValueError("t_pf and t_u must be > 0")


@dataclass(frozen=True)
class SimConfig:
    geometry: CellGeometry = field(default_factory=CellGeometry)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    snr: SnrConfig = field(default_factory=SnrConfig)
    fairness: FairnessParams = field(default_factory=FairnessParams)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    agent: Hyperparameters = field(default_factory=Hyperparameters)
    actions: tuple[float, ...] = DEFAULT_ACTIONS
    bler_target: float = 0.1
    shannon_gap_db: float = 3.0
    mcs_table_path: str = ""
    agent_enabled: bool = True
    steps: int = 200_000
    warmup_ttis: int = 1_000
    subsample_every: int = 10
    seed: int = 1
    snr_seed: int = -1  # >= 0: draw mean SNRs from this seed's stream instead

    def __post_init__(self):
        if not 0 <= self.bler_target < 1:
            raise ValueError("bler_target must lie in [0, 1)")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.warmup_ttis < 0 or self.subsample_every < 1:
            raise ValueError("invalid warmup_ttis / subsample_every")
        self.fairness.validate_for(self.geometry.n_users)

    def mcs_table(self) -> McsTable:
        if self.mcs_table_path:
            return McsTable.load(self.mcs_table_path)
        return McsTable.default(gap_db=self.shannon_gap_db)


# config key -> (section, field, converter); section None = top level
def _kv_schema() -> dict:
    return {
        "n_rbs": ("geometry", "n_rbs", int),
        "n_users": ("geometry", "n_users", int),
        "numerology": ("geometry", "numerology", int),
        "tti_ms": ("geometry", "tti", _ms),
        "carrier_freq_ghz": ("geometry", "carrier_freq", _ghz),
        "user_speed_kmh": ("geometry", "user_speed", _kmh),
        "delay_spread_us": ("geometry", "delay_spread", _us),
        "s_cbr_bytes": ("traffic", "s_cbr_bytes", int),
        "t_cbr_ms": ("traffic", "t_cbr", _ms),
        "random_phases": ("traffic", "random_phases", _bool),
        "mu_gamma_db": ("snr", "mu_gamma_db", float),
        "sigma_gamma_db": ("snr", "sigma_gamma_db", float),
        "lambda": ("fairness", "lam", float),
        "psi": ("fairness", "psi", float),
        "xi": ("fairness", "xi", float),
        "strict_any_violator": ("fairness", "strict_any_violator", _bool),
        "policy": ("scheduler", "policy", str),
        "t_pf": ("scheduler", "t_pf", float),
        "delta_u": ("scheduler", "delta_u", float),
        "t_u_ms": ("scheduler", "t_u", _ms),
        "discount": ("agent", "discount", float),
        "learning_rate": ("agent", "learning_rate", float),
        "momentum": ("agent", "momentum", float),
        "batch_size": ("agent", "batch_size", int),
        "replay_capacity": ("agent", "replay_capacity", int),
        "target_sync_period": ("agent", "target_sync_period", int),
        "epsilon_start": ("agent", "epsilon_start", float),
        "epsilon_end": ("agent", "epsilon_end", float),
        "epsilon_decay_frac": ("agent", None, float),  # resolved against steps
        "hidden_sizes": ("agent", "hidden_sizes", _int_tuple),
        "beta_init": ("agent", "beta_init", float),
        "beta_max": ("agent", "beta_max", float),
        "actions": (None, "actions", _float_tuple),
        "bler_target": (None, "bler_target", float),
        "shannon_gap_db": (None, "shannon_gap_db", float),
        "mcs_table": (None, "mcs_table_path", str),
        "agent_enabled": (None, "agent_enabled", _bool),
        "steps": (None, "steps", int),
        "warmup_ttis": (None, "warmup_ttis", int),
        "subsample_every": (None, "subsample_every", int),
        "seed": (None, "seed", int),
        "snr_seed": (None, "snr_seed", int),
    }


def _ms(v: str) -> float:
    return float(v) * 1e-3


def _us(v: str) -> float:
    return float(v) * 1e-6


def _ghz(v: str) -> float:
    return float(v) * 1e9


def _kmh(v: str) -> float:
    return float(v) / 3.6


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _int_tuple(v: str) -> tuple[int, ...]:
    return tuple(int(p) for p in v.replace(",", " ").split())


def _float_tuple(v: str) -> tuple[float, ...]:
    return tuple(float(p) for p in v.replace(",", " ").split())


def parse_kv(text: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment; blank lines ignored."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def config_from_text(text: str, overrides: dict | None = None) -> SimConfig:
    """Build a SimConfig from file text plus programmatic overrides
    (override keys use the same names as the file)."""
    pairs = parse_kv(text)
    if overrides:
        pairs.update({k: str(v) for k, v in overrides.items()})
    schema = _kv_schema()
    unknown = set(pairs) - set(schema)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    sections: dict[str, dict] = {"geometry": {}, "traffic": {}, "snr": {},
                                 "fairness": {}, "scheduler": {}, "agent": {},
                                 None: {}}
    epsilon_decay_frac = 0.5
    for key, value in pairs.items():
        section, fname, conv = schema[key]
        if key == "epsilon_decay_frac":
            epsilon_decay_frac = conv(value)
            continue
        sections[section][fname] = conv(value)

    geom_kwargs = sections["geometry"]
    if "numerology" in geom_kwargs:
        geom_kwargs["subcarrier_spacing"] = 2 ** geom_kwargs["numerology"] * 15_000.0
    geometry = _build(CellGeometry, geom_kwargs)
    steps = int(sections[None].get("steps", SimConfig.steps))
    agent_kwargs = sections["agent"]
    agent_kwargs.setdefault("epsilon_decay_steps",
                            max(1, int(epsilon_decay_frac * steps)))
    return SimConfig(
        geometry=geometry,
        traffic=_build(TrafficConfig, sections["traffic"]),
        snr=_build(SnrConfig, sections["snr"]),
        fairness=_build(FairnessParams, sections["fairness"]),
        scheduler=_build(SchedulerConfig, sections["scheduler"]),
        agent=_build(Hyperparameters, agent_kwargs),
        **sections[None],
    )


def _build(cls, kwargs: dict):
    valid = {f.name for f in fields(cls)}
    bad = set(kwargs) - valid
    if bad:
        raise ValueError(f"invalid fields for {cls.__name__}: {sorted(bad)}")
    return cls(**kwargs)


def load_config(path, overrides: dict | None = None) -> SimConfig:
    text = Path(path).read_text()
    return config_from_text(text, overrides)
