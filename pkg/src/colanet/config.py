"""Experiment configuration and its ``key = value`` file format.

Blank lines and ``#`` comments are ignored. Keys are the field names of
:class:`ExperimentConfig` plus the plasticity fields (``w_min``, ``d`` ...),
which are collected into ``params``. Lists are comma separated;
``subsample`` is ``train_n,test_n`` or ``none``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from colanet.digital import CountThreshold
from colanet.errors import ConfigurationError
from colanet.plasticity import PlasticityParams

ENGINES = ("digital", "snn", "both")

_PARAM_FIELDS = {f.name: f for f in fields(PlasticityParams)}

# Tuned once on a stand-in digits set and frozen; mirrors configs/default.conf.
TUNED_PARAMS = PlasticityParams(w_min=-1.0, w_max=0.5, d=0.01, n_s=0, alpha=0.1)


@dataclass(frozen=True)
class ExperimentConfig:
    engine: str = "both"
    params: PlasticityParams = TUNED_PARAMS
    s_max: int = 10
    microcolumns: int = 16
    seeds: tuple[int, ...] = (1, 2, 3, 4)
    subsample: Optional[tuple[int, int]] = None
    count_threshold: CountThreshold = CountThreshold.LITERAL
    presentation_ticks: int = 10
    silence_ticks: int = 10
    epochs: int = 1
    digits: tuple[int, ...] = tuple(range(10))
    workers: int = 1
    data_dir: Optional[str] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigurationError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        object.__setattr__(self, "count_threshold", CountThreshold(self.count_threshold))
        if self.engine != "digital" and not self.seeds:
            raise ConfigurationError("SNN runs need at least one seed")
        if not 1 <= self.s_max <= self.presentation_ticks:
            raise ConfigurationError("s_max must lie in [1, presentation_ticks]")
        if self.microcolumns < 1 or self.epochs < 1 or self.workers < 1:
            raise ConfigurationError("microcolumns, epochs and workers must be positive")
        if self.subsample is not None and min(self.subsample) < 1:
            raise ConfigurationError("subsample sizes must be positive")
        if any(not 0 <= t <= 9 for t in self.digits):
            raise ConfigurationError("digits must lie in 0..9")

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _subsample(text: str) -> Optional[tuple[int, int]]:
    if text.strip().lower() in ("", "none", "full"):
        return None
    parts = _int_list(text)
    if len(parts) != 2:
        raise ConfigurationError(f"subsample must be 'train_n,test_n', got {text!r}")
    return parts


_PARSERS = {
    "engine": str,
    "s_max": int,
    "microcolumns": int,
    "seeds": _int_list,
    "subsample": _subsample,
    "count_threshold": CountThreshold,
    "presentation_ticks": int,
    "silence_ticks": int,
    "epochs": int,
    "digits": _int_list,
    "workers": int,
    "data_dir": str,
    "out_dir": str,
}


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines on top of ``base`` (or the defaults)."""
    base = base or ExperimentConfig()
    top: dict = {}
    plast: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _PARAM_FIELDS:
                plast[key] = int(value) if key in ("n_s", "T_H", "T_P") else float(value)
            elif key in _PARSERS:
                top[key] = _PARSERS[key](value)
            else:
                raise ConfigurationError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key}: {exc}") from exc
    if plast:
        top["params"] = base.params.with_(**plast)
    return base.with_(**top)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)


def format_config(cfg: ExperimentConfig) -> str:
    """Render a config in the same text format (round-trips through
    :func:`parse_config`)."""
    p = cfg.params
    lines = [f"engine = {cfg.engine}"]
    for name in _PARAM_FIELDS:
        lines.append(f"{name} = {getattr(p, name)!r}")
    lines += [
        f"s_max = {cfg.s_max}",
        f"microcolumns = {cfg.microcolumns}",
        f"seeds = {','.join(map(str, cfg.seeds))}",
        f"subsample = {'none' if cfg.subsample is None else ','.join(map(str, cfg.subsample))}",
        f"count_threshold = {cfg.count_threshold.value}",
        f"presentation_ticks = {cfg.presentation_ticks}",
        f"silence_ticks = {cfg.silence_ticks}",
        f"epochs = {cfg.epochs}",
        f"digits = {','.join(map(str, cfg.digits))}",
        f"workers = {cfg.workers}",
    ]
    if cfg.data_dir is not None:
        lines.append(f"data_dir = {cfg.data_dir}")
    if cfg.out_dir is not None:
        lines.append(f"out_dir = {cfg.out_dir}")
    return "\n".join(lines) + "\n"
