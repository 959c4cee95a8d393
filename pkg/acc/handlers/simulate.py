# acc/handlers/simulate.py
import argparse
import logging
from typing import Any, Dict

import numpy as np

from ..analysis.steady_state import averaged_equilibrium, find_periodic_orbit
from ..circuit.converter import build_buck_model
from ..circuit.simulator import detect_period, ripple_peak_to_peak, simulate
from ..config import Settings
from ..errors import ConvergenceError, InsufficientDataError, SaturationError
from ..storage import write_outputs
from .common import add_common_args, perturb_state, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)


def register_simulate_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("simulate", help="cycle-by-cycle simulation from a perturbed steady state")
    add_common_args(parser, settings)

    def cmd_simulate(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        opts = cfg.simulate
        p = cfg.converter.to_params()
        model = build_buck_model(p)

        x0 = None
        if opts.start_from_orbit:
            try:
                x0 = find_periodic_orbit(model, p.u, 1, tol=cfg.orbit.newton_tol,
                                         max_iter=cfg.orbit.max_iter).x_start
            except (ConvergenceError, SaturationError) as e:
                logger.warning("simulate: no T-periodic orbit (%s), starting from averaged equilibrium", e)
        if x0 is None:
            x0 = averaged_equilibrium(model, p.u, model.duty_hint or 0.5)
        x0 = perturb_state(model, x0, opts.perturbation, opts.seed)

        tr = simulate(model, x0, p.u, opts.n_cycles,
                      samples_per_cycle=opts.samples_per_cycle, grid_points=opts.grid_points)

        try:
            detection = detect_period(tr, opts.period_tol).label
        except InsufficientDataError as e:
            logger.warning("simulate: %s", e)
            detection = "insufficient_data"

        tail = tr.duties[-8:]
        results = {
            "x0": x0,
            "n_cycles": tr.n_cycles,
            "detection": detection,
            "trailing_duty_cycles": [d / tr.T for d in tail],
            "trailing_mean_duty_cycle": float(np.mean(tail)) / tr.T,
            "saturated_cycles": sum(1 for s in tr.saturation if s != "none"),
            "y_ripple_pp_last_cycle": ripple_peak_to_peak(tr, 1),
            "final_state": tr.strobe[-1],
        }
        write_outputs(tr, out / "trajectory.csv")
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_simulate)
