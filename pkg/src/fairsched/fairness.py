"""Latency-fairness criterion: normalized delays, CDF requirement, case
classification and requirement-distance extraction.

The cell is judged on the empirical CDF of the normalized user delay. A
straight requirement line through (0.5, 0) and (1.5, 1) splits the plane
into over-fair (OF), unfair (UF) and feasible-fair (FF) regions; the
classifier counts sorted users whose normalized delay exceeds the shifted
requirement line.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class FairnessCase(enum.Enum):
    OF = "OF"
    UF = "UF"
    FF = "FF"


@dataclass(frozen=True)
class FairnessParams:
    """Fractions defining the best-user set, the outlier set and the
    confidence margin around the requirement line."""

    lam: float = 0.2   # fraction of best (smallest-delay) users
    psi: float = 0.1   # fraction of worst users treated as outliers
    xi: float = 0.1    # confidence factor added to the requirement
    strict_any_violator: bool = False  # trigger OF/UF on a single violator

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0,1], got {self.lam}")
        if not 0.0 <= self.psi <= 1.0:
            raise ValueError(f"psi must be in [0,1], got {self.psi}")
        if self.xi < 0.0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")

    def n_best(self, m: int) -> int:
        return _ceil_frac(self.lam, m)

    def n_outliers(self, m: int) -> int:
        return _ceil_frac(self.psi, m)

    def validate_for(self, m: int) -> None:
        """Best, middle and outlier sets must leave a non-empty middle."""
        if self.n_best(m) + self.n_outliers(m) >= m:
            raise ValueError(
                f"degenerate split: ceil(lam*M)={self.n_best(m)} + "
                f"ceil(psi*M)={self.n_outliers(m)} must be < M={m}"
            )


def _ceil_frac(frac: float, m: int) -> int:
    # ceil(frac*m) guarded against float fuzz (0.2*60 == 12.000000000000002)
    return math.ceil(frac * m - 1e-9)


@dataclass(frozen=True)
class FairnessReport:
    """Per-TTI fairness snapshot: delays sorted ascending, per-rank gaps to
    the requirement, the classified case and the two state distances."""

    sorted_norm_delays: np.ndarray
    gaps: np.ndarray
    case: FairnessCase
    d_inf: float
    d_sup: float


def normalized_delays(delays: np.ndarray) -> np.ndarray:
    """Divide each user delay by the cell-average delay.

    An idle cell (zero average delay) is perfectly fair by convention:
    every user gets a unit normalized delay.
    """
    delays = np.asarray(delays, dtype=float)
    mean = delays.mean()
    if mean == 0.0:
        return np.ones_like(delays)
    return delays / mean


def cdf_requirement(w) -> float | np.ndarray:
    """Required CDF value at normalized delay w: the line through
    (0.5, 0) and (1.5, 1), clamped to [0, 1]."""
    return np.clip(np.asarray(w, dtype=float) - 0.5, 0.0, 1.0)[()]


def required_delay(j: int, m: int) -> float:
    """Normalized delay the j-th sorted user (1-indexed) must not exceed:
    the inverse requirement evaluated at j/m."""
    if not 1 <= j <= m:
        raise ValueError(f"rank j={j} outside [1, {m}]")
    return j / m + 0.5


def required_delays(m: int) -> np.ndarray:
    """Requirement values for all ranks 1..m."""
    return np.arange(1, m + 1) / m + 0.5


def empirical_cdf(norm_delays: np.ndarray, w: float) -> float:
    """Fraction of users whose normalized delay is <= w."""
    norm_delays = np.asarray(norm_delays, dtype=float)
    return float(np.mean(norm_delays <= w))


def classify(norm_delays: np.ndarray, params: FairnessParams) -> FairnessCase:
    """Label the cell OF, UF or FF from the sorted normalized delays.

    A sorted user j violates the requirement when its delay exceeds
    (j/M + 0.5) + xi. More than one violator among the best users means
    the distribution is squeezed against the average (OF); failing that,
    more than one violator among the middle users (outliers excluded)
    means excessive delay spread (UF); otherwise FF.
    """
    w_up = np.sort(np.asarray(norm_delays, dtype=float))
    m = w_up.size
    violators = w_up > required_delays(m) + params.xi
    threshold = 0 if params.strict_any_violator else 1
    nb = params.n_best(m)
    no = params.n_outliers(m)
    if int(violators[:nb].sum()) > threshold:
        return FairnessCase.OF
    if int(violators[nb:m - no].sum()) > threshold:
        return FairnessCase.UF
    return FairnessCase.FF


def state_distances(gaps: np.ndarray, case: FairnessCase,
                    params: FairnessParams) -> tuple[float, float]:
    """Distances of the best / remaining user sets to the requirement.

    `gaps` is the rank-sorted vector of (sorted delay - requirement). In
    the OF case the best set reports its worst offender (max) and the
    remainder its best margin (min); in UF and FF the roles flip so the
    set that matters for the current case carries its extreme value.
    """
    gaps = np.asarray(gaps, dtype=float)
    m = gaps.size
    nb = params.n_best(m)
    best, rest = gaps[:nb], gaps[nb:]
    if case is FairnessCase.OF:
        d_inf = float(best.max()) if best.size else 0.0
        d_sup = float(rest.min()) if rest.size else 0.0
    else:
        d_inf = float(best.min()) if best.size else 0.0
        d_sup = float(rest.max()) if rest.size else 0.0
    return d_inf, d_sup


def evaluate(delays: np.ndarray, params: FairnessParams) -> FairnessReport:
    """Full per-TTI fairness evaluation from raw (un-normalized) delays.

    Sorting is stable, so equal delays keep user-index order and ranks
    are deterministic. An idle cell (zero average delay) is feasible-fair
    by the normalization convention, bypassing the classifier: genuinely
    equal positive delays classify as OF, but no delay at all cannot be
    over-fair.
    """
    delays = np.asarray(delays, dtype=float)
    idle = delays.mean() == 0.0
    norm = normalized_delays(delays)
    order = np.argsort(norm, kind="stable")
    w_up = norm[order]
    gaps = w_up - required_delays(w_up.size)
    case = FairnessCase.FF if idle else classify(norm, params)
    d_inf, d_sup = state_distances(gaps, case, params)
    return FairnessReport(sorted_norm_delays=w_up, gaps=gaps, case=case,
                          d_inf=d_inf, d_sup=d_sup)
