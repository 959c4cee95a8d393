# acc/handlers/common.py
import argparse
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from ..config import Settings
from ..errors import ConfigError
from ..models import SwitchedModel
from ..presets import load_presets, preset_run_config
from ..run_config import RunConfig, load_run_config

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config.json"


def add_common_args(parser: argparse.ArgumentParser, settings: Settings) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, default=None,
                        help=f"run config JSON (default: {DEFAULT_CONFIG_PATH.name})")
    source.add_argument("--preset", choices=sorted(load_presets()), default=None,
                        help="bundled converter instead of a config file")
    parser.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default: config out_dir, else {settings.out_dir!r})")


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "preset", None):
        return preset_run_config(args.preset)
    path = args.config or DEFAULT_CONFIG_PATH
    if not Path(path).exists():
        raise ConfigError(f"config file {path} not found")
    return load_run_config(path)


def resolve_out_dir(args: argparse.Namespace, cfg: RunConfig, settings: Settings) -> Path:
    out = args.out or (Path(cfg.out_dir) if cfg.out_dir else Path(settings.out_dir))
    out.mkdir(parents=True, exist_ok=True)
    return out


def perturb_state(model: SwitchedModel, x: np.ndarray, fraction: float, seed: Optional[int]) -> np.ndarray:
    """
    Additive perturbation: each coordinate moves by up to `fraction` of its
    characteristic scale, direction drawn from a seeded generator.
    """
    if fraction == 0.0:
        return np.asarray(x, dtype=float).copy()
    rng = np.random.default_rng(seed)
    delta = fraction * model.state_scales * rng.uniform(-1.0, 1.0, size=model.n)
    logger.debug("perturb_state: seed=%s delta=%s", seed, delta)
    return np.asarray(x, dtype=float) + delta
