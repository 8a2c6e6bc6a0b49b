"""Single-neuron dynamics: leaky integration, activity time and gating.

Activity time ``a`` is a float so that the permanently active state can be
stored as ``math.inf``. A neuron is active iff ``a > 0``; an inactive
neuron ignores presynaptic spikes but still leaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from colanet.errors import ConfigurationError

PERMANENTLY_ACTIVE = math.inf


def activity_tick(a: float) -> float:
    """Advance an activity time by one tick."""
    if a < -1:
        return a + 1
    if a == -1:
        return PERMANENTLY_ACTIVE
    if a == 0:
        return 0
    return a - 1


def activity_tick_array(a: np.ndarray) -> np.ndarray:
    out = np.where(a > 0, a - 1, a)
    out = np.where(a < -1, a + 1, out)
    return np.where(a == -1, PERMANENTLY_ACTIVE, out)


def gating_spike(a: float, omega: float) -> float:
    """Effect of a spike arriving at a gating synapse of weight ``omega``.

    Negative ``omega`` deactivates (``min``), positive activates for
    ``omega`` ticks (``max``).
    """
    if omega == 0:
        raise ConfigurationError("gating synapse weight must be non-zero")
    if omega < 0:
        return min(a, omega)
    return max(a, omega)


def is_active(a) -> bool:
    return a > 0


@dataclass(frozen=True)
class NeuronState:
    u: float = 0.0
    a: float = PERMANENTLY_ACTIVE
    h: float = 1.0
    last_fire_tick: Optional[int] = None
    last_fire_forced: bool = False


def lif_step(state: NeuronState, incoming: float, tau_v: float, tick: int | None = None,
             forced: bool = False) -> tuple[NeuronState, bool]:
    """One tick of leaky integration: decay, add the summed synaptic input,
    fire if ``u > h`` and subtract ``h``.

    The input is dropped when the neuron is inactive. Returns the new state
    and whether it fired.
    """
    if not tau_v > 0:
        raise ConfigurationError(f"tau_v must be positive, got {tau_v}")
    u = state.u * math.exp(-1.0 / tau_v)
    if state.a > 0:
        u += incoming
    if u > state.h:
        return replace(state, u=u - state.h, last_fire_tick=tick, last_fire_forced=forced), True
    return replace(state, u=u), False
