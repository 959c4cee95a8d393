# acc/handlers/sweep_pole.py
import argparse
import logging
from typing import Any, Dict

from ..config import Settings
from ..services.sweep import run_sweep
from ..storage import write_outputs
from .common import add_common_args, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)


def register_sweep_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("sweep-pole", help="sweep omega_p and locate stability boundaries")
    add_common_args(parser, settings)
    parser.add_argument("--workers", type=int, default=None,
                        help=f"thread pool size (default: ACC_WORKERS={settings.workers})")

    def cmd_sweep(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        report = run_sweep(cfg, workers=args.workers or settings.workers)

        results = {
            "boundaries": [
                {
                    "kind": b.kind,
                    "k_lo": b.k_lo,
                    "k_hi": b.k_hi,
                    "bracket_width": b.width,
                    "omega_p_rad_s": b.omega_p,
                    "dominant": b.dominant,
                    "verdict": b.verdict,
                }
                for b in report.boundaries
            ],
            "gaps": [{"k": r.k, "error": r.error} for r in report.gaps],
            "unstable_points": sum(1 for r in report.records if r.verdict not in (None, "stable")),
            "averaged_unstable_points": sum(
                1 for r in report.records if r.avg_max_re is not None and r.avg_max_re >= 0.0
            ),
        }
        write_outputs(report, out / "sweep.csv")
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_sweep)
