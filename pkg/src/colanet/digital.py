"""Continuous (non-spiking) analogue of the column learning process.

The classifier keeps one row per microcolumn: the input resources ``W``,
the weights ``w`` derived from them, a firing threshold ``h`` and a
reservoir level for the silent synapses. Rows are appended on demand, so
a fresh classifier has ``N == 0``.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from colanet.errors import ConfigurationError, InputError
from colanet.plasticity import PlasticityParams, resource_to_weight, zero_weight_resource
from colanet.serialize import dump_document, load_document, params_from_dict, params_to_dict

__all__ = [
    "Branch",
    "CountThreshold",
    "DigitalClassifier",
    "TrainExample",
    "validate_input",
]

MODEL_FORMAT = "colanet-digital"
MODEL_VERSION = 1


class CountThreshold(str, enum.Enum):
    """Which inputs the depress/potentiate updates treat as "active".

    ``LITERAL`` reproduces the published procedure, where those two updates
    test ``n_i > 1`` while row creation and every compensation term count
    ``n_j > 0``. ``UNIFORM_GT0`` uses ``n_i > 0`` everywhere, which keeps
    the row total exactly conserved.
    """

    LITERAL = "literal"
    UNIFORM_GT0 = "uniform_gt0"


class Branch(str, enum.Enum):
    """Which state change a training step applied."""

    NONE = "none"
    CREATE = "create"
    DEPRESS = "depress"
    POTENTIATE = "potentiate"
    ALREADY_LEARNT = "already_learnt"


class TrainExample(NamedTuple):
    input: np.ndarray
    is_target: bool


def validate_input(x, num_inputs: int | None = None) -> np.ndarray:
    """Check a spike-count vector and return it as an int64 array.

    Counts must be non-negative integers, and the vector must contain at
    least one zero and at least one non-zero entry.
    """
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise InputError(f"input must be one-dimensional, got shape {arr.shape}")
    if num_inputs is not None and arr.shape[0] != num_inputs:
        raise InputError(f"input has {arr.shape[0]} entries, expected {num_inputs}")
    if arr.dtype.kind not in "iub":
        if arr.dtype.kind != "f" or not np.all(np.floor(arr) == arr):
            raise InputError("input counts must be integers")
    arr = arr.astype(np.int64)
    if (arr < 0).any():
        raise InputError("input counts must be non-negative")
    zeros = arr.shape[0] - np.count_nonzero(arr)
    if not 0 < zeros < arr.shape[0]:
        raise InputError(
            f"input must have at least one zero and one non-zero count "
            f"(found {zeros} zeros among {arr.shape[0]})"
        )
    return arr


class DigitalClassifier:
    """Growing set of microcolumn rows trained online, one example at a time.

    Args:
        num_inputs: length of every input count vector.
        params: shared plasticity hyperparameters; the digital engine uses
            ``w_min``, ``w_max``, ``d``, ``n_s`` and ``alpha``.
        count_threshold: see :class:`CountThreshold`.
    """

    def __init__(
        self,
        num_inputs: int,
        params: PlasticityParams | None = None,
        count_threshold: CountThreshold | str = CountThreshold.LITERAL,
    ):
        if int(num_inputs) != num_inputs or num_inputs < 2:
            raise ConfigurationError(f"num_inputs must be an integer >= 2, got {num_inputs}")
        self.num_inputs = int(num_inputs)
        self.params = params if params is not None else PlasticityParams()
        self.count_threshold = CountThreshold(count_threshold)
        self.W0 = zero_weight_resource(self.params)
        self._N = 0
        self._W = np.empty((0, self.num_inputs))
        self._w = np.empty((0, self.num_inputs))
        self._h = np.empty(0)
        self._reservoir = np.empty(0)

    # -- state views -------------------------------------------------------

    @property
    def N(self) -> int:
        return self._N

    @property
    def W(self) -> np.ndarray:
        return self._W[: self._N]

    @property
    def w(self) -> np.ndarray:
        return self._w[: self._N]

    @property
    def h(self) -> np.ndarray:
        return self._h[: self._N]

    @property
    def reservoir(self) -> np.ndarray:
        return self._reservoir[: self._N]

    def row_totals(self) -> np.ndarray:
        """Per-row resource including the ``n_s`` silent synapses."""
        return self.W.sum(axis=1) + self.params.n_s * self.reservoir

    def copy(self) -> "DigitalClassifier":
        other = DigitalClassifier(self.num_inputs, self.params, self.count_threshold)
        other._N = self._N
        other._W = self.W.copy()
        other._w = self.w.copy()
        other._h = self.h.copy()
        other._reservoir = self.reservoir.copy()
        return other

    # -- inference ---------------------------------------------------------

    def potentials(self, x) -> np.ndarray:
        """Normalised drive ``(w_a . n) / h_a`` of every row (empty if N == 0)."""
        x = validate_input(x, self.num_inputs)
        return self._potentials(x)

    def _potentials(self, x: np.ndarray) -> np.ndarray:
        if self._N == 0:
            return np.empty(0)
        return (self.w @ x.astype(float)) / self.h

    def predict(self, x) -> bool:
        """True iff some row's potential strictly exceeds 1."""
        p = self.potentials(x)
        return bool(p.size and p.max() > 1.0)

    def predict_many(self, xs: Iterable) -> np.ndarray:
        return np.array([self.predict(x) for x in xs], dtype=bool)

    # -- learning ----------------------------------------------------------

    def train_step(self, x, is_target: bool) -> Branch:
        """Present one example and update the state in place.

        Returns the branch that fired; weights and thresholds of the touched
        rows are recomputed from the resources before returning.
        """
        x = validate_input(x, self.num_inputs)
        p = self._potentials(x)
        d = self.params.d
        active = x > 0
        n_active = int(active.sum())
        comp = d * n_active / (self.num_inputs - n_active + self.params.n_s)
        if self.count_threshold is CountThreshold.LITERAL:
            targeted = x > 1
        else:
            targeted = active

        if p.size == 0 or p.max() <= 0:
            if not is_target:
                return Branch.NONE
            row = np.where(active, self.W0 + d, self.W0 - comp)
            self._append_row(row, self.W0 - comp)
            return Branch.CREATE

        if not is_target:
            self._depress(np.flatnonzero(p > 1), targeted, comp)
            return Branch.DEPRESS

        b = int(np.argmax(p))
        if p[b] <= 1:
            self._W[b] = np.where(targeted, self._W[b] + d, self._W[b] - comp)
            self._reservoir[b] -= comp
            self._refresh(np.array([b]))
            return Branch.POTENTIATE
        rows = np.flatnonzero(p > 1)
        self._depress(rows[rows != b], targeted, comp)
        return Branch.ALREADY_LEARNT

    def _depress(self, rows: np.ndarray, targeted: np.ndarray, comp: float) -> None:
        if rows.size == 0:
            return
        d = self.params.d
        self._W[rows] = np.where(targeted, self._W[rows] - d, self._W[rows] + comp)
        self._reservoir[rows] += comp
        self._refresh(rows)

    def _append_row(self, row: np.ndarray, reservoir: float) -> None:
        if self._N == self._W.shape[0]:
            cap = max(8, 2 * self._N)
            self._W = _grow(self._W, cap)
            self._w = _grow(self._w, cap)
            self._h = _grow(self._h, cap)
            self._reservoir = _grow(self._reservoir, cap)
        self._W[self._N] = row
        self._reservoir[self._N] = reservoir
        self._N += 1
        self._refresh(np.array([self._N - 1]))

    def _refresh(self, rows: np.ndarray) -> None:
        w = resource_to_weight(self._W[rows], self.params)
        self._w[rows] = w
        self._h[rows] = 1.0 + self.params.alpha * np.maximum(w, 0.0).sum(axis=1)

    def fit(self, data: Sequence, epochs: int = 1) -> "DigitalClassifier":
        """Run :meth:`train_step` over ``data`` (pairs of counts and label)
        in order, ``epochs`` times."""
        if int(epochs) != epochs or epochs < 1:
            raise ConfigurationError(f"epochs must be a positive integer, got {epochs}")
        for _ in range(int(epochs)):
            for i, (x, is_target) in enumerate(data):
                try:
                    self.train_step(x, bool(is_target))
                except InputError as exc:
                    raise InputError(f"training example {i}: {exc}") from exc
        return self

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "num_inputs": self.num_inputs,
            "count_threshold": self.count_threshold.value,
            "params": params_to_dict(self.params),
            "N": self._N,
            "W": self.W.tolist(),
            "reservoir": self.reservoir.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DigitalClassifier":
        if doc.get("format") != MODEL_FORMAT:
            raise ConfigurationError(f"not a digital model dump: format={doc.get('format')!r}")
        if doc.get("version") != MODEL_VERSION:
            raise ConfigurationError(f"unsupported model version {doc.get('version')!r}")
        clf = cls(doc["num_inputs"], params_from_dict(doc["params"]), doc["count_threshold"])
        N = int(doc["N"])
        if N:
            W = np.array(doc["W"], dtype=float).reshape(N, clf.num_inputs)
            clf._W = W.copy()
            clf._w = np.empty_like(W)
            clf._h = np.empty(N)
            clf._reservoir = np.array(doc["reservoir"], dtype=float)
            clf._N = N
            clf._refresh(np.arange(N))
        return clf

    def save(self, path) -> None:
        dump_document(self.to_dict(), path)

    @classmethod
    def load(cls, path) -> "DigitalClassifier":
        return cls.from_dict(load_document(path))


def _grow(arr: np.ndarray, rows: int) -> np.ndarray:
    out = np.empty((rows,) + arr.shape[1:])
    out[: arr.shape[0]] = arr
    return out
