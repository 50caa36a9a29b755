"""Normalized-delay CDF figure with the requirement line and the shaded
over-fair / unfair / feasible-fair regions.

Regions are constructed from the requirement line geometry itself (its
inverse is w = y + 0.5, shifted right by the confidence factor), never
from simulation data, so the figure stays correct for degenerate runs.
"""

from __future__ import annotations

import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .inputs import ReportInput

log = logging.getLogger("fairsched_report")

# fixed hash salt: identical inputs give byte-identical SVGs
plt.rcParams["svg.hashsalt"] = "fairsched-report"

REGION_COLORS = {"OF": "#9ecae9", "UF": "#f4a9a3", "FF": "#b5e0b2"}


def requirement_line(n: int = 101) -> tuple[np.ndarray, np.ndarray]:
    y = np.arange(n) / (n - 1)
    return y + 0.5, y


def build_cdf_figure(data: ReportInput, w_max: float = 3.0):
    """One curve per policy plus the requirement line, +-xi band and
    OF/UF/FF shading. Returns the matplotlib figure."""
    lam, psi, xi = data.fairness_params()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))

    w_req, y_req = requirement_line()
    # shaded regions, clipped to the plot window
    y_of = np.linspace(0.0, lam, 32)
    ax.fill_betweenx(y_of, y_of + 0.5 + xi, w_max, color=REGION_COLORS["OF"],
                     alpha=0.6, lw=0, label="over-fair region")
    y_uf = np.linspace(lam, 1.0 - psi, 64)
    ax.fill_betweenx(y_uf, y_uf + 0.5 + xi, w_max, color=REGION_COLORS["UF"],
                     alpha=0.6, lw=0, label="unfair region")
    y_ff = np.linspace(0.0, 1.0, 64)
    ax.fill_betweenx(y_ff, 0.0, y_ff + 0.5 + xi, color=REGION_COLORS["FF"],
                     alpha=0.4, lw=0, label="feasible-fair region")
    y_out = np.linspace(1.0 - psi, 1.0, 16)
    ax.fill_betweenx(y_out, y_out + 0.5 + xi, w_max,
                     color=REGION_COLORS["FF"], alpha=0.4, lw=0)

    ax.plot(w_req, y_req, "k-", lw=1.8, label="requirement")
    ax.plot(w_req + xi, y_req, "k--", lw=1.0, label="requirement +xi")
    ax.plot(w_req - xi, y_req, "k:", lw=1.0, label="requirement -xi")

    policies = data.policies
    if not policies:
        log.warning("no policy curves in input; rendering requirement only")
    for policy in policies:
        pts = data.cdf_curves[policy]
        w = [p[0] for p in pts]
        f = [p[1] for p in pts]
        ax.step(w, f, where="post", lw=1.6, label=policy)

    ax.set_xlim(0.0, w_max)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("normalized delay w")
    ax.set_ylabel("CDF")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def plot_cdf(data: ReportInput, out_dir, image_format: str = "svg") -> list:
    """Write the CDF comparison figure; returns the created paths."""
    fig = build_cdf_figure(data)
    path = out_dir / f"cdf_comparison.{image_format}"
    fig.savefig(path, format=image_format, metadata=_stable_metadata(image_format))
    plt.close(fig)
    return [path]


def _stable_metadata(image_format: str) -> dict | None:
    if image_format == "svg":
        return {"Date": None}  # no timestamp: identical runs, identical bytes
    return None
