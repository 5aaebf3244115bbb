"""Flat KEY=VALUE experiment configuration.

Files are parsed with python-dotenv, keys are case-insensitive and `#` starts
a comment. Precedence: model defaults < preset or file < CLI overrides.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from lb_lab.errors import ConfigError
from lb_lab.models.experiment import PRESETS, CriterionSpec, ExperimentSpec
from lb_lab.utils.logging import logger

# flat key -> (section, field); section None means a top-level spec field
SCHEMA: Dict[str, tuple[Optional[str], str]] = {
    "scenario": ("sim", "scenario"),
    "n": ("sim", "n_particles"),
    "steps": ("sim", "steps"),
    "dt": ("sim", "dt"),
    "epsilon": ("sim", "epsilon"),
    "sigma": ("sim", "sigma"),
    "r_cut": ("sim", "r_cut"),
    "force_strength": ("sim", "force_strength"),
    "omega": ("sim", "omega"),
    "v0": ("sim", "v0"),
    "disk_radius": ("sim", "disk_radius"),
    "min_separation": ("sim", "min_separation"),
    "seed": ("sim", "rng_seed"),
    "domain": ("sim", "domain"),
    "c_part": ("cost_model", "c_part"),
    "c_mig": ("cost_model", "c_mig"),
    "p": (None, "n_parts"),
    "partitioner": (None, "partitioner"),
    "criterion": (None, "criterion"),
    "smoothing_window": (None, "smoothing_window"),
    "threshold": (None, "threshold"),
    "hilbert_order": (None, "hilbert_order"),
    "eigengap": (None, "eigengap"),
    "rank_interval": (None, "rank_interval"),
    "emit_rank_work": (None, "emit_rank_work"),
    "output_dir": (None, "output_dir"),
    "label": (None, "label"),
}


def _normalise(values: Mapping[str, Optional[str]], source: str) -> Dict[str, str]:
    flat: Dict[str, str] = {}
    for key, value in values.items():
        name = key.strip().lower()
        if name not in SCHEMA:
            raise ConfigError(f"{source}: unknown key '{key}'")
        if value is not None and value.strip() != "":
            flat[name] = value.strip()
    return flat


def load_config_file(path: Path) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        values = dotenv_values(path, encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"Failed to read config {path}: {e}") from e
    return _normalise(values, str(path))


def preset_values(name: str) -> Dict[str, str]:
    try:
        return dict(PRESETS[name.strip().lower()])
    except KeyError:
        raise ConfigError(f"Unknown preset '{name}' (expected one of {', '.join(sorted(PRESETS))})") from None


def _parse_domain(text: str) -> tuple[float, ...]:
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"domain must be 'x0,y0,x1,y1', got '{text}'") from None
    if len(parts) != 4:
        raise ConfigError(f"domain must have four numbers, got '{text}'")
    return parts


def _describe(error: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in e['loc']) or 'spec'}: {e['msg']}" for e in error.errors())


def build_spec(values: Mapping[str, str]) -> ExperimentSpec:
    """Assemble a validated spec from flat, normalised key/value pairs."""
    data: Dict[str, Any] = {"sim": {}, "cost_model": {}}
    for key, value in values.items():
        section, field = SCHEMA[key]
        if key == "domain":
            data["sim"]["domain"] = _parse_domain(value)
        elif section is None:
            data[field] = value
        else:
            data[section][field] = value

    smoothing = data.pop("smoothing_window", None)
    criterion = data.pop("criterion", None)
    if criterion is not None or smoothing is not None:
        try:
            window = int(smoothing) if smoothing is not None else 1
            data["criterion"] = CriterionSpec.parse(criterion or "periodic", smoothing_window=window)
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"criterion: {e}") from e

    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment spec: {_describe(e)}") from e


def load_spec(
    config: Optional[Path] = None,
    preset: Optional[str] = None,
    overrides: Optional[Mapping[str, Optional[str]]] = None,
) -> ExperimentSpec:
    if config is not None and preset is not None:
        raise ConfigError("Use either a config file or a preset, not both")
    if config is not None:
        values = load_config_file(config)
        source = str(config)
    elif preset is not None:
        values = preset_values(preset)
        source = f"preset {preset}"
    else:
        values, source = {}, "defaults"
    values.update(_normalise(overrides or {}, "command line"))
    spec = build_spec(values)
    logger.debug(f"Loaded experiment spec from {source}: {spec.name}, P={spec.n_parts}, {spec.criterion.describe()}")
    return spec
