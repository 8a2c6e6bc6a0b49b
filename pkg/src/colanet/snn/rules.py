"""Anti-Hebbian and dopamine plasticity for L neurons.

Both rules target the plastic synapses that received at least one spike in
the ``T_H`` ticks up to and including the firing tick. The returned delta
maps are meant for :func:`colanet.plasticity.conserved_update`.
"""

from __future__ import annotations

from typing import Optional

import numpy as np


class SpikeHistory:
    """Input spikes of the example being presented.

    ``raster[t - 1]`` is the boolean vector of inputs spiking on tick ``t``;
    there are no input spikes outside ticks ``1..len(raster)``.
    """

    def __init__(self, raster: np.ndarray):
        self.raster = np.asarray(raster, dtype=bool)
        self._cum = None

    @property
    def num_inputs(self) -> int:
        return self.raster.shape[1]

    def spiked_in(self, after: int, upto: int) -> np.ndarray:
        """Mask of inputs with a spike on some tick ``t``, ``after < t <= upto``."""
        if self._cum is None:
            cum = np.zeros((self.raster.shape[0] + 1, self.raster.shape[1]), dtype=np.int32)
            np.cumsum(self.raster, axis=0, out=cum[1:])
            self._cum = cum
        last = self.raster.shape[0]
        hi = min(max(upto, 0), last)
        lo = min(max(after, 0), last)
        if hi <= lo:
            return np.zeros(self.raster.shape[1], dtype=bool)
        return (self._cum[hi] - self._cum[lo]) > 0

    def window(self, fire_tick: int, T_H: int) -> np.ndarray:
        return self.spiked_in(fire_tick - T_H, fire_tick)


def anti_hebbian_mask(history: SpikeHistory, fire_tick: int, forced: bool, T_H: int) -> np.ndarray:
    if forced:
        return np.zeros(history.num_inputs, dtype=bool)
    return history.window(fire_tick, T_H)


def dopamine_mask(
    history: SpikeHistory, last_fire_tick: Optional[int], dopamine_tick: int, T_H: int, T_P: int
) -> np.ndarray:
    if last_fire_tick is None or not 0 <= dopamine_tick - last_fire_tick <= T_P:
        return np.zeros(history.num_inputs, dtype=bool)
    return history.window(last_fire_tick, T_H)


def anti_hebbian(history: SpikeHistory, fire_tick: int, forced: bool, params) -> dict[int, float]:
    """Depression deltas for a firing; forced firings produce none."""
    mask = anti_hebbian_mask(history, fire_tick, forced, params.T_H)
    return {int(i): -params.d_H for i in np.flatnonzero(mask)}


def dopamine(history: SpikeHistory, last_fire_tick: Optional[int], dopamine_tick: int,
             params) -> dict[int, float]:
    """Potentiation deltas for a dopamine spike, regardless of whether the
    eligible firing was forced. Empty when the last firing is older than
    ``T_P`` ticks or absent."""
    mask = dopamine_mask(history, last_fire_tick, dopamine_tick, params.T_H, params.T_P)
    return {int(i): params.d_D for i in np.flatnonzero(mask)}
