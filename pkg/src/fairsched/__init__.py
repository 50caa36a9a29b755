"""Single-cell OFDMA downlink simulator where a deep-Q-learning agent
tunes the beta exponent of a beta-M-LWDF scheduler to keep the
normalized-delay distribution feasible-fair."""

__version__ = "0.1.0"

from .fairness import FairnessCase, FairnessParams, FairnessReport  # noqa: F401
