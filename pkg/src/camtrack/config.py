"""Episode and training configuration with strict JSON loading.

A config file is one flat JSON object; every key is optional and falls back
to the defaults below, unknown keys are rejected outright so typos cannot
silently change an experiment.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration."""


@dataclass
class EpisodeConfig:
    """Arena layout ranges used to randomize each episode."""

    arena_half: float = 10.0
    n_cameras: int = 4
    n_obstacles: int = 8
    obstacle_size_range: tuple[float, float] = (0.5, 3.0)
    obstacle_height_range: tuple[float, float] = (1.0, 2.5)
    target_speed_range: tuple[float, float] = (0.05, 0.2)
    camera_height_range: tuple[float, float] = (2.0, 3.0)

    def validate(self) -> None:
        if not 5.0 <= self.arena_half <= 20.0:
            raise ConfigError(f"arena_half must be in [5, 20], got {self.arena_half}")
        if not 2 <= self.n_cameras <= 8:
            raise ConfigError(f"n_cameras must be in [2, 8], got {self.n_cameras}")
        if not 0 <= self.n_obstacles <= 15:
            raise ConfigError(f"n_obstacles must be in [0, 15], got {self.n_obstacles}")
        for key in ("obstacle_size_range", "obstacle_height_range",
                    "target_speed_range", "camera_height_range"):
            lo, hi = getattr(self, key)
            if not (0.0 < lo < hi):
                raise ConfigError(f"{key} must satisfy 0 < lo < hi, got ({lo}, {hi})")
        if self.obstacle_size_range[1] >= 2.0 * self.arena_half:
            raise ConfigError("obstacle_size_range upper bound does not fit in the arena")


@dataclass
class TrainConfig:
    """Hyperparameters of the synchronous actor-critic training loop.

    total_steps counts pose-controller (label 0) camera-steps, i.e. the
    number of transitions that actually contribute gradients.
    """

    gamma: float = 0.95
    learning_rate: float = 0.1
    entropy_coeff: float = 0.005
    value_coeff: float = 0.5
    rollout_len: int = 20
    n_envs: int = 32
    grad_clip: float = 5.0
    total_steps: int = 300_000
    p_pose: float = 0.9
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must be in (0, 1), got {self.gamma}")
        for key in ("learning_rate", "entropy_coeff", "value_coeff", "grad_clip"):
            if not getattr(self, key) > 0.0:
                raise ConfigError(f"{key} must be positive, got {getattr(self, key)}")
        for key in ("rollout_len", "n_envs"):
            if not getattr(self, key) >= 1:
                raise ConfigError(f"{key} must be >= 1, got {getattr(self, key)}")
        if self.total_steps < 0:
            raise ConfigError(f"total_steps must be >= 0, got {self.total_steps}")
        if not 0.0 <= self.p_pose <= 1.0:
            raise ConfigError(f"p_pose must be in [0, 1], got {self.p_pose}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


_EPISODE_KEYS = {f.name for f in fields(EpisodeConfig)}
_TRAIN_KEYS = {f.name for f in fields(TrainConfig)}
_RANGE_KEYS = {"obstacle_size_range", "obstacle_height_range",
               "target_speed_range", "camera_height_range"}
_INT_KEYS = {"n_cameras", "n_obstacles", "rollout_len", "n_envs", "total_steps", "seed"}


def _coerce(key: str, value):
    if key in _RANGE_KEYS:
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
            raise ConfigError(f"{key} must be a [lo, hi] pair of numbers")
        return (float(value[0]), float(value[1]))
    if key in _INT_KEYS:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def load_config(path: str | Path) -> tuple[EpisodeConfig, TrainConfig]:
    """Parse a flat JSON config into (EpisodeConfig, TrainConfig).

    Missing keys take defaults; unknown keys and out-of-range values raise
    ConfigError naming the offending key.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a single JSON object")

    episode_kwargs, train_kwargs = {}, {}
    for key, value in data.items():
        if key in _EPISODE_KEYS:
            episode_kwargs[key] = _coerce(key, value)
        elif key in _TRAIN_KEYS:
            train_kwargs[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown config key: {key!r}")

    episode = EpisodeConfig(**episode_kwargs)
    train = TrainConfig(**train_kwargs)
    episode.validate()
    train.validate()
    return episode, train


def save_config(episode: EpisodeConfig, train: TrainConfig, path: str | Path) -> None:
    """Write the canonical form: every key explicit, keys sorted."""
    data = {}
    for cfg in (episode, train):
        for f in fields(cfg):
            value = getattr(cfg, f.name)
            data[f.name] = list(value) if isinstance(value, tuple) else value
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
