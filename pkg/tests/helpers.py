from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from ifc_dmt.core import ChannelGains, RatePair

# Lines printed by the acceptance suite, echoed again in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def on_grid(k_max: int, step: float = 0.05):
    return st.integers(0, k_max).map(lambda k: round(k * step, 10))


gains = st.builds(ChannelGains, on_grid(60), on_grid(60), on_grid(60), on_grid(60))
rates = st.builds(RatePair, on_grid(30), on_grid(30))
small_gains = st.builds(ChannelGains, on_grid(30), on_grid(30), on_grid(30), on_grid(30))
small_rates = st.builds(RatePair, on_grid(20), on_grid(20))


def random_gains(rng: np.random.Generator, k_max: int = 60, step: float = 0.05) -> ChannelGains:
    return ChannelGains(*(rng.integers(0, k_max + 1, 4) * step))


def random_rates(rng: np.random.Generator, k_max: int = 30, step: float = 0.05) -> RatePair:
    return RatePair(*(rng.integers(0, k_max + 1, 2) * step))
