"""Synaptic resource arithmetic shared by the digital and spiking engines.

Learning rules never touch weights directly. They move an unbounded
*resource* ``W`` which maps onto a bounded weight in ``[w_min, w_max)``::

    w = w_min + (w_max - w_min) * max(W, 0) / (w_max - w_min + max(W, 0))

A neuron's total resource is conserved: whenever some synapses are pushed
up or down, every other synapse (plus ``n_s`` unconnected reservoir
synapses) moves the opposite way by one common amount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from colanet.errors import ConfigurationError

__all__ = [
    "PlasticityParams",
    "ResourceVector",
    "compensation",
    "conserved_shift",
    "conserved_update",
    "resource_to_weight",
    "threshold_potential",
    "zero_weight_resource",
]


@dataclass(frozen=True)
class PlasticityParams:
    """Hyperparameters common to both engines.

    ``d_H`` and ``d_D`` default to the shared learning rate ``d``. Time
    windows and ``tau_v`` are in simulation ticks and only matter for the
    spiking engine.
    """

    w_min: float = -1.0
    w_max: float = 1.0
    d: float = 0.1
    d_H: Optional[float] = None
    d_D: Optional[float] = None
    n_s: int = 0
    alpha: float = 0.1
    T_H: int = 20
    T_P: int = 10
    tau_v: float = 10.0

    def __post_init__(self):
        if self.d_H is None:
            object.__setattr__(self, "d_H", self.d)
        if self.d_D is None:
            object.__setattr__(self, "d_D", self.d)
        if not (self.w_min < 0 < self.w_max):
            raise ConfigurationError(
                f"need w_min < 0 < w_max, got w_min={self.w_min}, w_max={self.w_max}"
            )
        for name in ("d", "d_H", "d_D", "tau_v"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be a positive finite number, got {value}")
        if not (0 <= self.alpha < 1):
            raise ConfigurationError(f"alpha must lie in [0, 1), got {self.alpha}")
        if int(self.n_s) != self.n_s or self.n_s < 0:
            raise ConfigurationError(f"n_s must be a non-negative integer, got {self.n_s}")
        for name in ("T_H", "T_P"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value}")
        object.__setattr__(self, "n_s", int(self.n_s))
        object.__setattr__(self, "T_H", int(self.T_H))
        object.__setattr__(self, "T_P", int(self.T_P))

    @property
    def W0(self) -> float:
        return zero_weight_resource(self)

    def with_(self, **changes) -> "PlasticityParams":
        """Copy with some fields replaced (``d_H``/``d_D`` follow a new ``d``
        unless given explicitly)."""
        if "d" in changes:
            changes.setdefault("d_H", None)
            changes.setdefault("d_D", None)
        return replace(self, **changes)


def _bounds(params) -> tuple[float, float]:
    w_min, w_max = float(params.w_min), float(params.w_max)
    if not w_min < w_max:
        raise ConfigurationError(f"w_min must be below w_max, got {w_min} >= {w_max}")
    return w_min, w_max


def resource_to_weight(W, params):
    """Map resource(s) to weight(s); works on scalars and numpy arrays."""
    w_min, w_max = _bounds(params)
    span = w_max - w_min
    pos = np.maximum(W, 0.0)
    w = w_min + span * pos / (span + pos)
    if np.ndim(w) == 0:
        return float(w)
    return w


def zero_weight_resource(params) -> float:
    """Resource value whose weight is exactly zero."""
    w_min, w_max = _bounds(params)
    if w_max == 0:
        raise ConfigurationError("w_max must be non-zero")
    if not (w_min < 0 < w_max):
        raise ConfigurationError("zero weight is only reachable when w_min < 0 < w_max")
    return -w_min * (w_max - w_min) / w_max


def threshold_potential(weights, alpha: float) -> float:
    """Firing threshold ``1 + alpha * sum(max(w, 0))``."""
    if not (0 <= alpha < 1):
        raise ConfigurationError(f"alpha must lie in [0, 1), got {alpha}")
    weights = np.asarray(weights, dtype=float)
    return 1.0 + alpha * float(np.maximum(weights, 0.0).sum())


def compensation(total_delta: float, n_free: int, n_s: int) -> float:
    """Per-slot shift that cancels ``total_delta`` over the free slots."""
    slots = n_free + n_s
    if slots <= 0:
        raise ConfigurationError(
            "every connected synapse is targeted and there are no silent synapses; "
            "total resource cannot be conserved"
        )
    return -total_delta / slots


@dataclass(frozen=True)
class ResourceVector:
    """Resources of one neuron's connected synapses plus the reservoir level.

    All ``n_s`` silent synapses share the single value ``reservoir``.
    """

    W: np.ndarray
    reservoir: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "W", np.array(self.W, dtype=float))

    def total(self, n_s: int) -> float:
        return float(self.W.sum()) + n_s * self.reservoir

    @classmethod
    def fresh(cls, num_synapses: int, params: PlasticityParams) -> "ResourceVector":
        W0 = zero_weight_resource(params)
        return cls(np.full(num_synapses, W0), W0)


def conserved_update(
    state: ResourceVector, targeted_deltas: Mapping[int, float], params
) -> ResourceVector:
    """Apply targeted resource changes and spread the opposite amount evenly
    over every untouched synapse and the reservoir.

    Returns a new ``ResourceVector``; ``state`` is left as is.
    """
    if not targeted_deltas:
        return ResourceVector(state.W, state.reservoir)
    n = state.W.shape[0]
    idx = np.fromiter(targeted_deltas.keys(), dtype=np.intp, count=len(targeted_deltas))
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"synapse index out of range for {n} synapses")
    deltas = np.fromiter(targeted_deltas.values(), dtype=float, count=len(targeted_deltas))
    c = compensation(float(deltas.sum()), n - idx.size, params.n_s)
    W = state.W + c
    W[idx] = state.W[idx] + deltas
    return ResourceVector(W, state.reservoir + c)


def conserved_shift(W: np.ndarray, reservoir: float, mask: np.ndarray, delta: float, n_s: int):
    """Masked form of :func:`conserved_update` where every targeted synapse
    gets the same ``delta``. Returns ``(W, reservoir)`` as new objects."""
    k = int(np.count_nonzero(mask))
    if k == 0:
        return W.copy(), reservoir
    c = compensation(delta * k, W.shape[0] - k, n_s)
    return np.where(mask, W + delta, W + c), reservoir + c
