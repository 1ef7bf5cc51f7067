"""Diversity-multiplexing bounds for the two-user block-fading Gaussian interference channel."""
from __future__ import annotations

__version__ = "0.1.0"

from .closed_form import BoundsSummary, d_etw, d_hk_fixed, d_hk_general, d_hk_wors, summarize
from .core import ChannelGains, DiversityBreakdown, FadingExponents, PowerSplit, RatePair, Regime, classify_regime
from .oracle import OracleResult, min_exponent_sum, per_constraint_minima

__all__ = [
    "BoundsSummary",
    "ChannelGains",
    "DiversityBreakdown",
    "FadingExponents",
    "OracleResult",
    "PowerSplit",
    "RatePair",
    "Regime",
    "classify_regime",
    "d_etw",
    "d_hk_fixed",
    "d_hk_general",
    "d_hk_wors",
    "min_exponent_sum",
    "per_constraint_minima",
    "summarize",
]
