"""Time-stepped simulation of one CoLaNET column.

A column holds ``M`` microcolumns, each an (L, WTA, REWGATE) triplet, plus
one BIASGATE and one OUT neuron::

    inputs --plastic--> L_m --strong--> WTA_m --gating(+)--> REWGATE_m
                         ^                |                     |
           BIASGATE --w_bias              +--strong--> OUT      +--dopamine--> L_m
              ^                                         |
    label --strong, 10 tick delay            OUT --gating(-)--> BIASGATE
    label --strong--> REWGATE_m

Within a tick the layers are swept bottom-up (BIASGATE, L, WTA, REWGATE,
OUT), so a spike reaches the next layer in the tick it was emitted. Only
the label -> BIASGATE connection carries a delay.

Each example occupies ``presentation_ticks + silence_ticks`` ticks. The
label node fires on every tick of a target example during training.
Dynamic state (potentials, activity times, pending spikes, firing
records) is reset at the start of every example.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from colanet.data import schedule_spikes
from colanet.digital import validate_input
from colanet.errors import ConfigurationError, InputError
from colanet.plasticity import (
    PlasticityParams,
    conserved_shift,
    resource_to_weight,
    zero_weight_resource,
)
from colanet.serialize import dump_document, load_document, params_from_dict, params_to_dict
from colanet.snn.neuron import PERMANENTLY_ACTIVE, activity_tick, activity_tick_array, gating_spike
from colanet.snn.rules import SpikeHistory, anti_hebbian_mask, dopamine_mask

CHECKPOINT_FORMAT = "colanet-snn"
CHECKPOINT_VERSION = 1

TraceSink = Callable[[int, str, str], None]


@dataclass(frozen=True)
class SimSchedule:
    presentation_ticks: int = 10
    silence_ticks: int = 10

    def __post_init__(self):
        if self.presentation_ticks < 1 or self.silence_ticks < 1:
            raise ConfigurationError("presentation and silence must both last at least one tick")

    @property
    def total_ticks(self) -> int:
        return self.presentation_ticks + self.silence_ticks


@dataclass(frozen=True)
class Wiring:
    """Constants of the non-plastic synapses.

    ``strong_weight`` makes any single spike fire a resting target with
    threshold 1. It is kept below ``1 + (1 - exp(-1/tau_v))`` so that the
    residual left after the subtractive reset cannot build up into extra,
    unprovoked firings when such spikes arrive on consecutive ticks.
    """

    strong_weight: float = 1.05
    label_bias_delay: int = 10
    wta_rewgate_omega: float = 1.0
    bias_margin: float = 1e-6

    def __post_init__(self):
        if not self.strong_weight > 1:
            raise ConfigurationError("strong_weight must exceed the resting threshold 1")
        if self.label_bias_delay < 0:
            raise ConfigurationError("label_bias_delay must be non-negative")
        if not self.wta_rewgate_omega > 0:
            raise ConfigurationError("wta_rewgate_omega must be positive")

    def bias_weight(self, schedule: SimSchedule, tau_v: float) -> float:
        """BIASGATE -> L weight that brings a resting L neuron past threshold 1
        on the last tick of the example under one BIASGATE spike per tick."""
        k = schedule.total_ticks - self.label_bias_delay
        if k < 1:
            raise ConfigurationError("label -> BIASGATE delay leaves no drive ticks")
        decay = math.exp(-1.0 / tau_v)
        return (1.0 + self.bias_margin) / sum(decay**j for j in range(k))


@dataclass(frozen=True)
class Synapse:
    """Wiring record; plastic synapses report their resource, the others
    their fixed weight or gating omega."""

    kind: str  # plastic | fixed | gating | dopamine
    source: str
    target: str
    weight_or_resource: float
    delay: int = 0


@dataclass
class Column:
    """Plastic state of one column plus the per-example dynamic state."""

    num_inputs: int
    num_microcolumns: int
    W: np.ndarray
    reservoir: np.ndarray
    w: np.ndarray = field(init=False)
    h: np.ndarray = field(init=False)

    def __post_init__(self):
        self.w = np.empty_like(self.W)
        self.h = np.empty(self.num_microcolumns)
        self.reset_state()

    def refresh(self, params: PlasticityParams, rows=None) -> None:
        rows = np.arange(self.num_microcolumns) if rows is None else rows
        w = resource_to_weight(self.W[rows], params)
        self.w[rows] = w
        self.h[rows] = 1.0 + params.alpha * np.maximum(w, 0.0).sum(axis=-1)

    def reset_state(self) -> None:
        M = self.num_microcolumns
        self.u_L = np.zeros(M)
        self.u_WTA = np.zeros(M)
        self.u_REW = np.zeros(M)
        self.a_REW = np.zeros(M)
        self.u_BIAS = 0.0
        self.a_BIAS = PERMANENTLY_ACTIVE
        self.u_OUT = 0.0
        self.last_fire = np.full(M, -1, dtype=np.int64)
        self.last_forced = np.zeros(M, dtype=bool)

    def row_totals(self, n_s: int) -> np.ndarray:
        return self.W.sum(axis=1) + n_s * self.reservoir


@dataclass
class ExampleResult:
    fired: bool
    first_out_tick: Optional[int] = None
    l_fires: int = 0
    wta_fires: int = 0
    dopamine_spikes: int = 0


class Network:
    """A single-column CoLaNET network for one binary task.

    Use :func:`build_colanet` to construct one.
    """

    def __init__(
        self,
        num_inputs: int,
        num_microcolumns: int,
        params: PlasticityParams,
        seed: int,
        schedule: SimSchedule,
        wiring: Wiring,
    ):
        self.num_inputs = num_inputs
        self.params = params
        self.seed = seed
        self.schedule = schedule
        self.wiring = wiring
        self.w_bias = wiring.bias_weight(schedule, params.tau_v)
        self.decay = math.exp(-1.0 / params.tau_v)
        W0 = zero_weight_resource(params)
        col = Column(
            num_inputs,
            num_microcolumns,
            np.full((num_microcolumns, num_inputs), W0),
            np.full(num_microcolumns, W0),
        )
        col.refresh(params)
        self.columns = [col]
        self.rng = np.random.default_rng(seed)
        self.clock = 0
        self.trace: Optional[TraceSink] = None

    @property
    def column(self) -> Column:
        return self.columns[0]

    @property
    def num_microcolumns(self) -> int:
        return self.column.num_microcolumns

    def neuron_ids(self) -> list[str]:
        M = self.num_microcolumns
        return (
            [f"L{m}" for m in range(M)]
            + [f"WTA{m}" for m in range(M)]
            + [f"REWGATE{m}" for m in range(M)]
            + ["BIASGATE", "OUT"]
        )

    def node_ids(self) -> list[str]:
        return [f"in{i}" for i in range(self.num_inputs)] + ["label"]

    def synapses(self) -> Iterator[Synapse]:
        col, wr, M = self.column, self.wiring, self.num_microcolumns
        for m in range(M):
            for i in range(self.num_inputs):
                yield Synapse("plastic", f"in{i}", f"L{m}", float(col.W[m, i]))
        for m in range(M):
            yield Synapse("fixed", f"L{m}", f"WTA{m}", wr.strong_weight)
            yield Synapse("gating", f"WTA{m}", f"REWGATE{m}", wr.wta_rewgate_omega)
            yield Synapse("fixed", "label", f"REWGATE{m}", wr.strong_weight)
            yield Synapse("dopamine", f"REWGATE{m}", f"L{m}", 0.0)
            yield Synapse("fixed", "BIASGATE", f"L{m}", self.w_bias)
            yield Synapse("fixed", f"WTA{m}", "OUT", wr.strong_weight)
        yield Synapse("fixed", "label", "BIASGATE", wr.strong_weight, wr.label_bias_delay)
        yield Synapse("gating", "OUT", "BIASGATE", -float(self.schedule.total_ticks))

    # -- simulation --------------------------------------------------------

    def _emit(self, tick: int, neuron: str, event: str) -> None:
        if self.trace is not None:
            self.trace(self.clock + tick, neuron, event)

    def simulate_example(
        self, counts, label_active: bool, learning: bool, raster: np.ndarray | None = None
    ) -> ExampleResult:
        """Present one example and run the full presentation + silence window.

        ``fired`` reports whether OUT fired during the presentation window.
        """
        counts = validate_input(counts, self.num_inputs)
        P = self.schedule.presentation_ticks
        T = self.schedule.total_ticks
        if raster is None:
            raster = schedule_spikes(counts, P)
        elif raster.shape != (P, self.num_inputs):
            raise InputError(f"spike raster must have shape {(P, self.num_inputs)}")
        history = SpikeHistory(raster)
        col = self.column
        col.reset_state()
        p, wr = self.params, self.wiring
        decay, strong = self.decay, wr.strong_weight
        result = ExampleResult(fired=False)
        tracing = self.trace is not None

        for t in range(1, T + 1):
            col.a_REW = activity_tick_array(col.a_REW)
            col.a_BIAS = activity_tick(col.a_BIAS)
            col.u_L *= decay
            col.u_WTA *= decay
            col.u_REW *= decay
            col.u_BIAS *= decay
            col.u_OUT *= decay

            # BIASGATE, driven by the delayed label train
            bias_spike = False
            if label_active and t - wr.label_bias_delay >= 1 and col.a_BIAS > 0:
                col.u_BIAS += strong
            if col.u_BIAS > 1.0:
                col.u_BIAS -= 1.0
                bias_spike = True
                if tracing:
                    self._emit(t, "BIASGATE", "fire")

            # L layer
            if t <= P:
                spk = raster[t - 1]
                if spk.any():
                    col.u_L += col.w[:, spk].sum(axis=1)
            if bias_spike:
                col.u_L += self.w_bias
            fired_L = np.flatnonzero(col.u_L > col.h)
            if fired_L.size:
                col.u_L[fired_L] -= col.h[fired_L]
                col.last_fire[fired_L] = t
                col.last_forced[fired_L] = bias_spike
                result.l_fires += fired_L.size
                for m in fired_L:
                    if tracing:
                        self._emit(t, f"L{m}", "forced_fire" if bias_spike else "fire")
                    if learning and not bias_spike:
                        mask = anti_hebbian_mask(history, t, False, p.T_H)
                        if self._plasticity(m, mask, -p.d_H) and tracing:
                            self._emit(t, f"L{m}", "anti_hebbian")
                col.u_WTA[fired_L] += strong

            # WTA arbitration: one uniformly drawn winner among the eligible
            winner = -1
            eligible = np.flatnonzero(col.u_WTA > 1.0)
            if eligible.size:
                winner = int(eligible[self.rng.integers(eligible.size)]) if eligible.size > 1 else int(eligible[0])
                u_win = col.u_WTA[winner] - 1.0
                col.u_WTA[eligible] = 0.0
                col.u_WTA[winner] = u_win
                result.wta_fires += 1
                if tracing:
                    self._emit(t, f"WTA{winner}", "fire")
                col.a_REW[winner] = gating_spike(col.a_REW[winner], wr.wta_rewgate_omega)

            # REWGATE: active ones fire on the label spike and emit dopamine
            if label_active:
                active = col.a_REW > 0
                if active.any():
                    col.u_REW[active] += strong
            fired_R = np.flatnonzero(col.u_REW > 1.0)
            if fired_R.size:
                col.u_REW[fired_R] -= 1.0
                for m in fired_R:
                    result.dopamine_spikes += 1
                    if tracing:
                        self._emit(t, f"REWGATE{m}", "dopamine")
                    if learning:
                        f = int(col.last_fire[m])
                        mask = dopamine_mask(history, f if f >= 0 else None, t, p.T_H, p.T_P)
                        if self._plasticity(m, mask, p.d_D) and tracing:
                            self._emit(t, f"L{m}", "dopamine_plasticity")

            # OUT and the BIASGATE block
            if winner >= 0:
                col.u_OUT += strong
            if col.u_OUT > 1.0:
                col.u_OUT -= 1.0
                if tracing:
                    self._emit(t, "OUT", "fire")
                if t <= P and not result.fired:
                    result.fired = True
                    result.first_out_tick = t
                col.a_BIAS = gating_spike(col.a_BIAS, -float(T - t + 1))
                if not learning:
                    break

            if t >= P and not label_active and self._quiescent(col):
                break

        self.clock += T
        return result

    @staticmethod
    def _quiescent(col: Column) -> bool:
        # without input or drive, potentials only shrink toward 0
        return (
            not (col.u_L > col.h).any()
            and not (col.u_WTA > 1.0).any()
            and not (col.u_REW > 1.0).any()
            and col.u_OUT <= 1.0
            and col.u_BIAS <= 1.0
        )

    def _plasticity(self, m: int, mask: np.ndarray, delta: float) -> bool:
        if not mask.any():
            return False
        col = self.column
        col.W[m], col.reservoir[m] = conserved_shift(
            col.W[m], float(col.reservoir[m]), mask, delta, self.params.n_s
        )
        col.refresh(self.params, m)
        return True

    # -- training / inference ------------------------------------------------

    def fit(self, data: Iterable, epochs: int = 1) -> "Network":
        """Train on ``(counts, is_target)`` pairs in order; the label node is
        active exactly on target examples."""
        for _ in range(int(epochs)):
            for i, (x, is_target) in enumerate(data):
                try:
                    self.simulate_example(x, bool(is_target), learning=True)
                except InputError as exc:
                    raise InputError(f"training example {i}: {exc}") from exc
        return self

    def predict(self, counts) -> bool:
        """Inference: no learning, label node silent."""
        return self.simulate_example(counts, label_active=False, learning=False).fired

    def predict_many(self, xs: Iterable) -> np.ndarray:
        return np.array([self.predict(x) for x in xs], dtype=bool)

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        col = self.column
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "num_inputs": self.num_inputs,
            "num_microcolumns": self.num_microcolumns,
            "seed": self.seed,
            "clock": self.clock,
            "params": params_to_dict(self.params),
            "schedule": asdict(self.schedule),
            "wiring": asdict(self.wiring),
            "W": col.W.tolist(),
            "reservoir": col.reservoir.tolist(),
            "rng_state": self.rng.bit_generator.state,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Network":
        if doc.get("format") != CHECKPOINT_FORMAT:
            raise ConfigurationError(f"not a network checkpoint: format={doc.get('format')!r}")
        if doc.get("version") != CHECKPOINT_VERSION:
            raise ConfigurationError(f"unsupported checkpoint version {doc.get('version')!r}")
        net = cls(
            doc["num_inputs"],
            doc["num_microcolumns"],
            params_from_dict(doc["params"]),
            doc["seed"],
            SimSchedule(**doc["schedule"]),
            Wiring(**doc["wiring"]),
        )
        col = net.column
        col.W[:] = np.array(doc["W"], dtype=float)
        col.reservoir[:] = np.array(doc["reservoir"], dtype=float)
        col.refresh(net.params)
        net.rng.bit_generator.state = doc["rng_state"]
        net.clock = int(doc["clock"])
        return net

    def save(self, path) -> None:
        dump_document(self.to_dict(), path)

    @classmethod
    def load(cls, path) -> "Network":
        return cls.from_dict(load_document(path))


def build_colanet(
    num_inputs: int,
    num_microcolumns: int = 16,
    params: PlasticityParams | None = None,
    seed: int = 0,
    schedule: SimSchedule | None = None,
    wiring: Wiring | None = None,
) -> Network:
    """Wire a fresh single-column network.

    Plastic resources start at the zero-weight level, REWGATE neurons start
    inactive and every other neuron permanently active.
    """
    if int(num_inputs) != num_inputs or num_inputs < 2:
        raise ConfigurationError(f"num_inputs must be an integer >= 2, got {num_inputs}")
    if int(num_microcolumns) != num_microcolumns or num_microcolumns < 1:
        raise ConfigurationError(f"num_microcolumns must be a positive integer, got {num_microcolumns}")
    return Network(
        int(num_inputs),
        int(num_microcolumns),
        params if params is not None else PlasticityParams(),
        int(seed),
        schedule if schedule is not None else SimSchedule(),
        wiring if wiring is not None else Wiring(),
    )


def train_snn(net: Network, data: Sequence, epochs: int = 1) -> Network:
    return net.fit(data, epochs)


def infer_snn(net: Network, counts) -> bool:
    return net.predict(counts)


class EventTrace:
    """Collects ``(tick, neuron, event)`` records; ``lines()`` renders them
    as whitespace-separated text, one event per line."""

    def __init__(self):
        self.events: list[tuple[int, str, str]] = []

    def __call__(self, tick: int, neuron: str, event: str) -> None:
        self.events.append((tick, neuron, event))

    def lines(self) -> list[str]:
        return [f"{t} {n} {e}" for t, n, e in self.events]

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.lines():
                fh.write(line + "\n")
