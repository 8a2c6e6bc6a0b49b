"""Column-layered spiking classifier and its continuous digital analogue."""

from colanet.digital import CountThreshold, DigitalClassifier
from colanet.errors import (
    ColanetError,
    ConfigurationError,
    EncodingError,
    IngestionError,
    InputError,
    StatisticsError,
)
from colanet.plasticity import (
    PlasticityParams,
    ResourceVector,
    conserved_update,
    resource_to_weight,
    threshold_potential,
    zero_weight_resource,
)

__version__ = "0.1.0"

__all__ = [
    "ColanetError",
    "ConfigurationError",
    "CountThreshold",
    "DigitalClassifier",
    "EncodingError",
    "IngestionError",
    "InputError",
    "PlasticityParams",
    "ResourceVector",
    "StatisticsError",
    "conserved_update",
    "resource_to_weight",
    "threshold_potential",
    "zero_weight_resource",
]
