"""Compile-time configuration with validated defaults.

Every tunable of the pipeline lives here so a bare `compile` run uses the
documented defaults and a config file can override any of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import ConfigError

PROVIDERS = ("stub", "file", "http")


@dataclass
class CompileConfig:
    rms_threshold: float = 0.8
    min_interval_s: float = 30.0
    merge_angle_deg: float = 30.0
    smoothing_window: int = 5
    h_fov_deg: float = 120.0
    v_fov_deg: float = 90.0
    region_threshold: float = 0.5
    min_area_fraction: float = 0.001
    scene_threshold: float = 0.11
    w_spa: float = 1.0 / 3.0
    w_sem: float = 1.0 / 3.0
    w_soc: float = 1.0 / 3.0
    diversity_lambda: float = 0.75
    max_options: int = 5
    words_per_second: float = 3.0
    provider: str = "stub"
    provider_file: str | None = None
    title_word_budget: int = 8

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 0.0 <= self.rms_threshold <= 1.0:
            raise ConfigError(f"rms_threshold must be in [0, 1], got {self.rms_threshold}")
        if self.min_interval_s <= 0:
            raise ConfigError(f"min_interval_s must be positive, got {self.min_interval_s}")
        if not 0.0 < self.merge_angle_deg <= 180.0:
            raise ConfigError(f"merge_angle_deg must be in (0, 180], got {self.merge_angle_deg}")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ConfigError(
                f"smoothing_window must be odd and >= 1, got {self.smoothing_window}"
            )
        if not 0.0 < self.h_fov_deg <= 360.0:
            raise ConfigError(f"h_fov_deg must be in (0, 360], got {self.h_fov_deg}")
        if not 0.0 < self.v_fov_deg <= 180.0:
            raise ConfigError(f"v_fov_deg must be in (0, 180], got {self.v_fov_deg}")
        if not 0.0 < self.region_threshold <= 1.0:
            raise ConfigError(f"region_threshold must be in (0, 1], got {self.region_threshold}")
        if not 0.0 <= self.min_area_fraction < 1.0:
            raise ConfigError(
                f"min_area_fraction must be in [0, 1), got {self.min_area_fraction}"
            )
        if self.scene_threshold <= 0:
            raise ConfigError(f"scene_threshold must be positive, got {self.scene_threshold}")
        for name in ("w_spa", "w_sem", "w_soc"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.w_spa + self.w_sem + self.w_soc <= 0:
            raise ConfigError("diversity weights must not all be zero")
        if not 0.0 < self.diversity_lambda <= 1.0:
            raise ConfigError(f"lambda must be in (0, 1], got {self.diversity_lambda}")
        if self.max_options < 1:
            raise ConfigError(f"max_options must be >= 1, got {self.max_options}")
        if self.words_per_second <= 0:
            raise ConfigError(f"words_per_second must be positive, got {self.words_per_second}")
        if self.provider not in PROVIDERS:
            raise ConfigError(f"provider must be one of {PROVIDERS}, got {self.provider!r}")
        if self.title_word_budget < 1:
            raise ConfigError(f"title_word_budget must be >= 1, got {self.title_word_budget}")

    def normalized_weights(self) -> tuple[float, float, float]:
        """Weights scaled to sum to one; scaling all three equally is a no-op."""
        total = self.w_spa + self.w_sem + self.w_soc
        return self.w_spa / total, self.w_sem / total, self.w_soc / total

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CompileConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "CompileConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a flat JSON object")
        return cls.from_dict(data)


def word_budget(duration_s: float, words_per_second: float) -> int:
    """Words that fit in a narration interval at the configured speech rate."""
    if duration_s < 0:
        raise ConfigError(f"duration must be non-negative, got {duration_s}")
    return int(math.floor(duration_s * words_per_second))
