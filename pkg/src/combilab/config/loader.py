from __future__ import annotations

import hashlib
import json
import pathlib
from importlib import resources
from typing import Any

from pydantic import ValidationError

from ..errors import ConfigError
from .schema import ExperimentConfig

PRESETS = ("default", "figure_cuberoot", "figure_log", "tiny_exact")


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "<root>"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def parse_config(text: str) -> ExperimentConfig:
    """Parse JSON text into a validated ExperimentConfig."""
    try:
        data: Any = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError("configuration document must be a JSON object")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_validation_message(exc)) from exc


def load_config(path: str | pathlib.Path) -> ExperimentConfig:
    config_path = pathlib.Path(path).expanduser().resolve()
    try:
        text = config_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    return parse_config(text)


def load_preset(name: str = "default") -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}', choose one of {PRESETS}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text("utf-8")
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.model_dump(mode="json"), sort_keys=True, indent=2)


def config_hash(cfg: ExperimentConfig) -> str:
    """Hash of the result-bearing fields; worker count and output paths excluded."""
    payload = cfg.model_dump(mode="json", exclude={"workers", "output"})
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def with_overrides(cfg: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Apply non-None overrides and re-validate."""
    data = cfg.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "out_dir":
            data["output"]["out_dir"] = str(value)
        else:
            data[key] = value
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_validation_message(exc)) from exc
