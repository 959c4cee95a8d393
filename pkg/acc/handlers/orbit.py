# acc/handlers/orbit.py
import argparse
import logging
from typing import Any, Dict

from ..analysis.steady_state import find_periodic_orbit, orbit_waveform
from ..circuit.converter import build_buck_model
from ..circuit.simulator import ripple_peak_to_peak
from ..config import Settings
from ..storage import write_outputs
from .common import add_common_args, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)


def register_orbit_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("orbit", help="periodic steady state by Newton shooting")
    add_common_args(parser, settings)
    parser.add_argument("--period-multiple", type=int, choices=(1, 2), default=None,
                        help="override orbit.period_multiple from the config")

    def cmd_orbit(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        p = cfg.converter.to_params()
        model = build_buck_model(p)
        m_p = args.period_multiple or cfg.orbit.period_multiple

        orbit = find_periodic_orbit(model, p.u, m_p, tol=cfg.orbit.newton_tol, max_iter=cfg.orbit.max_iter)
        waveform = orbit_waveform(model, orbit, cfg.orbit.waveform_samples)

        results = {
            "period_multiple": orbit.m,
            "state_labels": list(model.state_labels),
            "x_start": orbit.x_start,
            "duties_s": list(orbit.duties),
            "duty_cycles": list(orbit.duty_cycles),
            "mean_duty_cycle": orbit.mean_duty_cycle,
            "residual": orbit.residual,
            "iterations": orbit.iterations,
            "x_switch": orbit.x_switch,
            "deriv_minus": orbit.deriv_minus,
            "deriv_plus": orbit.deriv_plus,
            "y_ripple_pp": ripple_peak_to_peak(waveform, orbit.m),
        }
        write_outputs(waveform, out / "orbit_waveform.csv")
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_orbit)
