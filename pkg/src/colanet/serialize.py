"""Versioned JSON dumps for trained models.

Every dump is a single JSON object with a ``format`` tag, an integer
``version`` and a ``params`` block. Floats are written with ``repr``
precision, so a load reproduces the saved state bit for bit.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import asdict
from pathlib import Path

from colanet.errors import ConfigurationError
from colanet.plasticity import PlasticityParams


def params_to_dict(params: PlasticityParams) -> dict:
    return asdict(params)


def params_from_dict(doc: dict) -> PlasticityParams:
    known = set(PlasticityParams.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) in dump: {sorted(unknown)}")
    return PlasticityParams(**doc)


def dump_document(doc: dict, path) -> None:
    path = Path(path)
    text = json.dumps(doc, separators=(",", ":"))
    if path.suffix == ".gz":
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def load_document(path) -> dict:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(path.read_text(encoding="utf-8"))
