"""Pipeline configuration: namespaced JSON document with strict key checking.

Layout:

    {
      "expansion": {... ExpansionConfig fields ...},
      "mix":       {... MixConfig fields ...},
      "loss_weights": {"lambda1": ..., "lambda2": ...},
      "metrics":   {"tau": ...}
    }

Absent sections and fields fall back to defaults; unknown keys anywhere are
rejected so typos cannot silently change a run.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .core import FormatError
from .expansion import ExpansionConfig
from .losses import LossWeights
from .mixing import MixConfig


@dataclass(frozen=True)
class PipelineConfig:
    expansion: ExpansionConfig = ExpansionConfig()
    mix: MixConfig = MixConfig()
    loss_weights: LossWeights = LossWeights()
    tau: float = 0.5

    def validate(self) -> "PipelineConfig":
        self.expansion.validate()
        self.mix.validate()
        self.loss_weights.validate()
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"metrics tau must lie in (0, 1), got {self.tau}")
        return self

    def to_dict(self) -> dict:
        return {
            "expansion": dataclasses.asdict(self.expansion),
            "mix": dataclasses.asdict(self.mix),
            "loss_weights": dataclasses.asdict(self.loss_weights),
            "metrics": {"tau": self.tau},
        }


def _build(cls, payload: dict, where: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(payload) - names
    if unknown:
        raise FormatError(f"unknown key '{sorted(unknown)[0]}' in config section '{where}'")
    return cls(**payload)


def config_from_dict(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise FormatError("config document must be a JSON object")
    known = {"expansion", "mix", "loss_weights", "metrics"}
    unknown = set(doc) - known
    if unknown:
        raise FormatError(f"unknown top-level config key '{sorted(unknown)[0]}'")
    for section, val in doc.items():
        if not isinstance(val, dict):
            raise FormatError(f"config section '{section}' must be an object")
    metrics = dict(doc.get("metrics", {}))
    unknown_m = set(metrics) - {"tau"}
    if unknown_m:
        raise FormatError(f"unknown key '{sorted(unknown_m)[0]}' in config section 'metrics'")
    exp = dict(doc.get("expansion", {}))
    # JSON has no tuple type; nothing to coerce here today, but keep lists out
    cfg = PipelineConfig(
        expansion=_build(ExpansionConfig, exp, "expansion"),
        mix=_build(MixConfig, dict(doc.get("mix", {})), "mix"),
        loss_weights=_build(LossWeights, dict(doc.get("loss_weights", {})), "loss_weights"),
        tau=float(metrics.get("tau", 0.5)),
    )
    try:
        return cfg.validate()
    except ValueError as e:
        raise FormatError(f"invalid config: {e}") from None


def load_config(path: str | Path) -> PipelineConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from None
    return config_from_dict(doc)
