"""Downlink channel: log-normal mean SNRs, time/frequency-correlated
Rayleigh fading per resource block, and MCS selection (AMC).

The fading is a per-RB correlated Rayleigh process: marginally CN(0,1)
complex gains, an AR(1) evolution in time with coefficient rho_t =
J0(2*pi*f_d*TTI), and exponential correlation rho_f**|k-k'| across RBs
derived from the coherence bandwidth 1/(2*pi*delay_spread). These are the
only channel properties the scheduler exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

SPEED_OF_LIGHT = 299_792_458.0  # m/s
SUBCARRIERS_PER_RB = 12


@dataclass(frozen=True)
class CellGeometry:
    """Static cell layout and OFDMA numerology."""

    n_rbs: int = 100
    n_users: int = 60
    numerology: int = 0
    subcarrier_spacing: float = 15_000.0    # Hz, must equal 2^mu * 15 kHz
    tti: float = 1e-3                       # s
    carrier_freq: float = 5e9               # Hz
    user_speed: float = 5.0 / 3.6           # m/s (5 km/h)
    delay_spread: float = 100e-6            # s, as configured (see docs)

    def __post_init__(self):
        if self.n_rbs < 1 or self.n_users < 1:
            raise ValueError("n_rbs and n_users must be >= 1")
        if self.numerology not in (0, 1, 2, 3):
            raise ValueError(f"numerology must be in 0..3, got {self.numerology}")
        expected = 2 ** self.numerology * 15_000.0
        if abs(self.subcarrier_spacing - expected) > 1e-6:
            raise ValueError(
                f"subcarrier_spacing {self.subcarrier_spacing} != 2^mu*15kHz ({expected})"
            )
        if self.tti <= 0 or self.carrier_freq <= 0:
            raise ValueError("tti and carrier_freq must be positive")
        if self.user_speed < 0 or self.delay_spread <= 0:
            raise ValueError("user_speed must be >= 0 and delay_spread > 0")

    @property
    def doppler_freq(self) -> float:
        return self.user_speed * self.carrier_freq / SPEED_OF_LIGHT

    @property
    def time_corr(self) -> float:
        """AR(1) coefficient between consecutive TTIs (Jakes spectrum)."""
        return float(j0(2.0 * np.pi * self.doppler_freq * self.tti))

    @property
    def freq_corr(self) -> float:
        """Correlation between adjacent RBs from the coherence bandwidth."""
        rb_bw = SUBCARRIERS_PER_RB * self.subcarrier_spacing
        coherence_bw = 1.0 / (2.0 * np.pi * self.delay_spread)
        return float(np.exp(-rb_bw / coherence_bw))


@dataclass
class McsEntry:
    index: int
    spectral_efficiency: float  # bits/s/Hz
    min_snr_db: float           # lowest SNR at which BLER <= target


class McsTable:
    """Ordered MCS entries with strictly increasing efficiency and SNR
    thresholds. Acts as the AMC lookup: highest index whose threshold the
    instantaneous SNR clears."""

    def __init__(self, entries: list[McsEntry]):
        if not entries:
            raise ValueError("MCS table must have at least one entry")
        effs = [e.spectral_efficiency for e in entries]
        thrs = [e.min_snr_db for e in entries]
        if any(b <= a for a, b in zip(effs, effs[1:])):
            raise ValueError("spectral efficiencies must be strictly increasing")
        if any(b <= a for a, b in zip(thrs, thrs[1:])):
            raise ValueError("SNR thresholds must be strictly increasing")
        self.entries = list(entries)
        self._thresholds_db = np.array(thrs)
        self._efficiencies = np.array(effs)
        self._indexes = np.array([e.index for e in entries])

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def default(cls, n_entries: int = 15, min_eff: float = 0.2,
                max_eff: float = 7.4, gap_db: float = 3.0) -> "McsTable":
        """Spectral efficiencies spanning min_eff..max_eff with thresholds
        from inverted Shannon capacity plus a gap (dB) calibrated for the
        BLER target."""
        effs = np.linspace(min_eff, max_eff, n_entries)
        thrs = 10.0 * np.log10(2.0 ** effs - 1.0) + gap_db
        return cls([McsEntry(i, float(e), float(t))
                    for i, (e, t) in enumerate(zip(effs, thrs))])

    @classmethod
    def from_text(cls, text: str) -> "McsTable":
        """Parse one entry per line: index, spectral_efficiency, min_snr_db
        (comma or whitespace separated; '#' starts a comment)."""
        entries = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 3:
                raise ValueError(f"MCS table line {lineno}: expected 3 fields, got {raw!r}")
            entries.append(McsEntry(int(parts[0]), float(parts[1]), float(parts[2])))
        return cls(entries)

    @classmethod
    def load(cls, path) -> "McsTable":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        lines = ["# index  spectral_efficiency(bits/s/Hz)  min_snr_db"]
        lines += [f"{e.index} {e.spectral_efficiency!r} {e.min_snr_db!r}"
                  for e in self.entries]
        return "\n".join(lines) + "\n"


def draw_mean_snrs(rng: np.random.Generator, mu_gamma: float,
                   sigma_gamma: float, n_users: int) -> np.ndarray:
    """Per-user mean SNRs: normal in dB (mean mu_gamma, std sigma_gamma),
    returned on linear scale."""
    if sigma_gamma < 0:
        raise ValueError("sigma_gamma must be >= 0")
    snr_db = rng.normal(mu_gamma, sigma_gamma, size=n_users)
    return 10.0 ** (snr_db / 10.0)


@dataclass
class ChannelState:
    """Fading gains and SNRs for one TTI, plus the correlation machinery
    needed to advance them."""

    h: np.ndarray          # (n_users, n_rbs) complex, CN(0,1) marginals
    mean_snr: np.ndarray   # (n_users,) linear
    inst_snr: np.ndarray   # (n_users, n_rbs) linear, mean_snr * |h|^2
    rho_t: float
    freq_chol: np.ndarray | None = field(repr=False)  # None: independent RBs


def _freq_cholesky(n_rbs: int, rho_f: float) -> np.ndarray | None:
    """Cholesky factor of the AR(1) Toeplitz correlation rho_f**|k-k'|
    (the unrolled recursion g[k] = rho*g[k-1] + sqrt(1-rho^2)*z[k]).
    None when the RBs are effectively independent."""
    if rho_f < 1e-12 or n_rbs == 1:
        return None
    k = np.arange(n_rbs)
    chol = np.zeros((n_rbs, n_rbs))
    chol[:, 0] = rho_f ** k
    scale = np.sqrt(1.0 - rho_f ** 2)
    for j in range(1, n_rbs):
        chol[j:, j] = scale * rho_f ** (k[: n_rbs - j])
    return chol


def _correlated_unit_gaussian(rng: np.random.Generator, n_users: int,
                              n_rbs: int,
                              freq_chol: np.ndarray | None) -> np.ndarray:
    """CN(0,1) matrix with exponential correlation across the RB axis;
    freq_chol=None means independent RBs."""
    z = (rng.standard_normal((n_users, n_rbs))
         + 1j * rng.standard_normal((n_users, n_rbs))) / np.sqrt(2.0)
    if freq_chol is None:
        return z
    return z @ freq_chol.T


def init_channel(geometry: CellGeometry, mean_snr: np.ndarray,
                 rng: np.random.Generator) -> ChannelState:
    """Warm-up draw: stationary fading sample for every user and RB."""
    freq_chol = _freq_cholesky(geometry.n_rbs, geometry.freq_corr)
    h = _correlated_unit_gaussian(rng, geometry.n_users, geometry.n_rbs,
                                  freq_chol)
    mean_snr = np.asarray(mean_snr, dtype=float)
    return ChannelState(h=h, mean_snr=mean_snr,
                        inst_snr=mean_snr[:, None] * np.abs(h) ** 2,
                        rho_t=geometry.time_corr, freq_chol=freq_chol)


def advance_channel(state: ChannelState, geometry: CellGeometry,
                    rng: np.random.Generator) -> ChannelState:
    """One TTI of AR(1) fading evolution; marginals stay CN(0,1)."""
    rho = state.rho_t
    if rho >= 1.0:
        h = state.h.copy()
    else:
        innovation = _correlated_unit_gaussian(rng, geometry.n_users,
                                               geometry.n_rbs, state.freq_chol)
        h = rho * state.h + np.sqrt(1.0 - rho ** 2) * innovation
    return ChannelState(h=h, mean_snr=state.mean_snr,
                        inst_snr=state.mean_snr[:, None] * np.abs(h) ** 2,
                        rho_t=state.rho_t, freq_chol=state.freq_chol)


def rb_rate_bits(spectral_efficiency: float, geometry: CellGeometry) -> float:
    """Potential rate of one RB for one TTI, in bits."""
    return (spectral_efficiency * SUBCARRIERS_PER_RB
            * geometry.subcarrier_spacing * geometry.tti)


def select_mcs(snr: float, table: McsTable,
               geometry: CellGeometry) -> tuple[int | None, float]:
    """AMC rule: highest MCS whose SNR threshold is met.

    Returns (mcs_index, potential rate in bits per TTI per RB);
    (None, 0.0) when the SNR is below the lowest threshold, i.e. the user
    cannot be scheduled on this RB this TTI.
    """
    if snr < 0:
        raise ValueError("snr must be >= 0")
    if snr == 0.0:
        return None, 0.0
    snr_db = 10.0 * np.log10(snr)
    pos = int(np.searchsorted(table._thresholds_db, snr_db, side="right")) - 1
    if pos < 0:
        return None, 0.0
    entry = table.entries[pos]
    return entry.index, rb_rate_bits(entry.spectral_efficiency, geometry)


def select_mcs_grid(inst_snr: np.ndarray, table: McsTable,
                    geometry: CellGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized AMC over the whole (user, RB) grid.

    Returns (mcs index grid with -1 for outage, rate grid in bits). Matches
    select_mcs entry-by-entry, bit for bit.
    """
    with np.errstate(divide="ignore"):
        snr_db = 10.0 * np.log10(inst_snr)
    pos = np.searchsorted(table._thresholds_db, snr_db, side="right") - 1
    outage = pos < 0
    safe = np.where(outage, 0, pos)
    entry_rates = np.array([rb_rate_bits(e.spectral_efficiency, geometry)
                            for e in table.entries])
    rates = np.where(outage, 0.0, entry_rates[safe])
    indexes = np.where(outage, -1, table._indexes[safe])
    return indexes, rates
