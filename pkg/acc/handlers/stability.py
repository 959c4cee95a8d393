# acc/handlers/stability.py
import argparse
import logging
from typing import Any, Dict

from ..analysis.averaged import averaged_jacobian
from ..analysis.sampled_data import classify_stability, linearize
from ..analysis.steady_state import find_periodic_orbit
from ..circuit.converter import build_buck_model
from ..config import Settings
from ..storage import write_outputs
from .common import add_common_args, resolve_out_dir, resolve_run_config

logger = logging.getLogger(__name__)


def register_stability_handlers(subparsers, settings: Settings) -> None:
    parser = subparsers.add_parser("stability", help="sampled-data orbital stability vs. averaged poles")
    add_common_args(parser, settings)

    def cmd_stability(args: argparse.Namespace) -> Dict[str, Any]:
        cfg = resolve_run_config(args)
        out = resolve_out_dir(args, cfg, settings)
        p = cfg.converter.to_params()
        model = build_buck_model(p)

        orbit = find_periodic_orbit(model, p.u, cfg.orbit.period_multiple,
                                    tol=cfg.orbit.newton_tol, max_iter=cfg.orbit.max_iter)
        lin = linearize(model, orbit)
        verdict = classify_stability(lin, cfg.stability.eig_tol)
        avg = averaged_jacobian(model, p.u)

        results = {
            "omega_p_rad_s": p.omega_p,
            "k": p.k,
            "period_multiple": orbit.m,
            "duty_cycles": list(orbit.duty_cycles),
            "phi": lin.phi,
            "gamma1": lin.gamma1,
            "gamma2": lin.gamma2,
            "eigenvalues": lin.eigs,
            "verdict": verdict.kind,
            "marginal": verdict.marginal,
            "max_magnitude": verdict.max_magnitude,
            "dominant": verdict.dominant,
            "averaged_poles": avg.poles,
            "averaged_max_re": avg.max_real_part,
        }
        logger.info("stability: k=%.4f verdict=%s max|lambda|=%.6f", p.k, verdict.kind, verdict.max_magnitude)
        write_outputs(results, out / "report.json", cfg)
        return results

    parser.set_defaults(func=cmd_stability)
