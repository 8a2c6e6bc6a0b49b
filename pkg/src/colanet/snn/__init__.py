"""Spiking engine: neuron dynamics, plasticity rules and the column network."""

from colanet.snn.network import (
    Column,
    EventTrace,
    ExampleResult,
    Network,
    SimSchedule,
    Synapse,
    Wiring,
    build_colanet,
    infer_snn,
    train_snn,
)
from colanet.snn.neuron import (
    PERMANENTLY_ACTIVE,
    NeuronState,
    activity_tick,
    gating_spike,
    lif_step,
)
from colanet.snn.rules import SpikeHistory, anti_hebbian, dopamine

__all__ = [
    "Column",
    "EventTrace",
    "ExampleResult",
    "Network",
    "NeuronState",
    "PERMANENTLY_ACTIVE",
    "SimSchedule",
    "SpikeHistory",
    "Synapse",
    "Wiring",
    "activity_tick",
    "anti_hebbian",
    "build_colanet",
    "dopamine",
    "gating_spike",
    "infer_snn",
    "lif_step",
    "train_snn",
]
