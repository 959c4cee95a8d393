# acc/handlers/hb.py
import argparse
import logging
from typing import Any, Dict

from ..analysis.harmonic_balance import K_STAR, predict
from ..config import Settings
from ..storage import write_outputs
from .common import add_common_args, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)


def register_hb_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("hb", help="harmonic-balance period-doubling threshold")
    add_common_args(parser, settings)

    def cmd_hb(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        p = cfg.converter.to_params()
        pred = predict(p)

        results = {
            "v_s": p.v_s,
            "k_star": K_STAR,
            "prediction": pred,
        }
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_hb)
