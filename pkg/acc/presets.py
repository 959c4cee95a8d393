# acc/presets.py
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from .errors import ConfigError
from .models import ConverterParams
from .run_config import ConverterConfig, RunConfig

logger = logging.getLogger(__name__)

PRESETS_PATH = Path(__file__).resolve().parent / "presets.json"


def load_presets() -> Dict[str, Dict[str, Any]]:
    """
    Bundled converter configurations, keyed by name.
    """
    with open(PRESETS_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def preset_converter(name: str, **overrides: Any) -> ConverterConfig:
    presets = load_presets()
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(presets)}")
    data = dict(presets[name])
    if "omega_p_rad_s" in overrides or "omega_p_over_omega_s" in overrides:
        data.pop("omega_p_rad_s", None)
        data.pop("omega_p_over_omega_s", None)
    data.update(overrides)
    try:
        return ConverterConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"preset {name!r} with overrides {overrides} is invalid: {e}") from e


def preset_params(name: str, k: Optional[float] = None, omega_p: Optional[float] = None) -> ConverterParams:
    overrides: Dict[str, Any] = {}
    if k is not None:
        overrides["omega_p_over_omega_s"] = k
    if omega_p is not None:
        overrides["omega_p_rad_s"] = omega_p
    return preset_converter(name, **overrides).to_params()


def preset_run_config(name: str) -> RunConfig:
    logger.debug("preset_run_config: %s", name)
    return RunConfig(converter=preset_converter(name))
