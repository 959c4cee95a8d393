# acc/handlers/tf.py
import argparse
import logging
from typing import Any, Dict

import numpy as np

from ..analysis.sampled_data import frequency_response, linearize, transfer_response
from ..analysis.steady_state import find_periodic_orbit
from ..circuit.converter import build_buck_model
from ..config import Settings
from ..models import FrequencyResponse
from ..storage import write_outputs
from .common import add_common_args, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)

RESPONSES = {
    "toc": "control_to_output",
    "tos": "audio",
    "tic": "control_to_current",
}


def register_tf_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("tf", help="sampled-data transfer functions and frequency response")
    add_common_args(parser, settings)

    def cmd_tf(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        p = cfg.converter.to_params()
        model = build_buck_model(p)

        orbit = find_periodic_orbit(model, p.u, 1, tol=cfg.orbit.newton_tol, max_iter=cfg.orbit.max_iter)
        lin = linearize(model, orbit)

        opts = cfg.tf
        omegas = np.geomspace(opts.omega_min_over_omega_s, opts.omega_max_over_omega_s, opts.n_points) * p.omega_s
        fr = FrequencyResponse(
            omegas=omegas,
            responses={name: frequency_response(lin, model, kind, omegas) for name, kind in RESPONSES.items()},
        )

        results = {
            "dc_gain": {name: transfer_response(lin, model, kind, 1.0) for name, kind in RESPONSES.items()},
            "omega_range_rad_s": [float(omegas[0]), float(omegas[-1])],
            "nyquist_rad_s": np.pi / p.T,
        }
        write_outputs(fr, out / "frequency_response.csv")
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_tf)
