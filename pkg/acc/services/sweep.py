# acc/services/sweep.py
"""
Compensator-pole sweep: per grid point solve the T-orbit, linearize,
classify; then bisect every stable/unstable bracket down to the requested
width. Grid points are independent and merged back by index.
"""
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List

import numpy as np
from tqdm import tqdm

from ..analysis.averaged import averaged_jacobian
from ..analysis.sampled_data import classify_stability, linearize
from ..analysis.steady_state import find_periodic_orbit
from ..circuit.converter import build_buck_model
from ..errors import AccError, SweepError
from ..models import ConverterParams, SweepBoundary, SweepRecord, SweepReport
from ..run_config import RunConfig

logger = logging.getLogger(__name__)


def evaluate_pole(
        base: ConverterParams,
        k: float,
        eig_tol: float = 1e-6,
        newton_tol: float = 1e-10,
        max_iter: int = 50,
) -> SweepRecord:
    """One sweep point. Solver failures come back as a gap record, never raised."""
    p = base.with_omega_p(k * base.omega_s)
    record = SweepRecord(omega_p=p.omega_p, k=k)
    try:
        model = build_buck_model(p)
        orbit = find_periodic_orbit(model, p.u, 1, tol=newton_tol, max_iter=max_iter)
        lin = linearize(model, orbit)
        verdict = classify_stability(lin, eig_tol)
        avg = averaged_jacobian(model, p.u)
    except AccError as e:
        logger.warning("sweep: gap at k=%.5f (%s: %s)", k, e.category, e)
        record.error = f"{e.category}: {e}"
        return record

    record.duty = orbit.duty_cycles[0]
    record.eigs = _ordered(lin.eigs)
    record.max_magnitude = verdict.max_magnitude
    record.verdict = verdict.kind
    record.avg_max_re = avg.max_real_part
    logger.debug("sweep: k=%.5f max|lambda|=%.6f %s", k, verdict.max_magnitude, verdict.kind)
    return record


def _ordered(eigs: np.ndarray) -> np.ndarray:
    """Deterministic order: descending magnitude, then real part, then imaginary part."""
    keys = [(-round(abs(e), 12), round(e.real, 12), round(e.imag, 12)) for e in eigs]
    return np.array([eigs[i] for i in sorted(range(len(eigs)), key=lambda i: keys[i])])


def _dominant(record: SweepRecord) -> complex:
    return complex(record.eigs[0]) if record.eigs is not None and len(record.eigs) else 0j


def _refine(cfg: RunConfig, base: ConverterParams, left: SweepRecord, right: SweepRecord) -> SweepBoundary:
    opts = cfg.sweep
    lo, hi = left, right
    lo_stable = lo.verdict == "stable"
    while hi.k - lo.k > opts.boundary_tol:
        mid_k = 0.5 * (lo.k + hi.k)
        mid = evaluate_pole(base, mid_k, cfg.stability.eig_tol, cfg.orbit.newton_tol, cfg.orbit.max_iter)
        if mid.is_gap:
            logger.warning("sweep: bisection stopped at k=%.5f, orbit solve failed", mid_k)
            break
        if (mid.verdict == "stable") == lo_stable:
            lo = mid
        else:
            hi = mid

    unstable = hi if lo_stable else lo
    boundary = SweepBoundary(
        k_lo=lo.k,
        k_hi=hi.k,
        omega_s=base.omega_s,
        kind="loss" if lo_stable else "gain",
        dominant=_dominant(unstable),
        verdict=unstable.verdict,
    )
    logger.info(
        "sweep: boundary %s at k=%.4f (width %.4f), dominant eigenvalue %s",
        boundary.kind, boundary.k, boundary.width, boundary.dominant,
    )
    return boundary


def run_sweep(cfg: RunConfig, workers: int = 1) -> SweepReport:
    base = cfg.converter.to_params()
    opts = cfg.sweep
    grid = np.linspace(opts.k_min, opts.k_max, opts.n_points)

    def work(k: float) -> SweepRecord:
        return evaluate_pole(base, float(k), cfg.stability.eig_tol, cfg.orbit.newton_tol, cfg.orbit.max_iter)

    show_progress = sys.stderr.isatty()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        records: List[SweepRecord] = list(
            tqdm(pool.map(work, grid), total=len(grid), desc="sweep", disable=not show_progress)
        )

    valid = [r for r in records if not r.is_gap]
    if not valid:
        raise SweepError(f"all {len(records)} sweep points failed")

    boundaries: List[SweepBoundary] = []
    for left, right in zip(valid, valid[1:]):
        if (left.verdict == "stable") != (right.verdict == "stable"):
            boundaries.append(_refine(cfg, base, left, right))

    logger.info(
        "sweep: %s points, %s gaps, %s boundaries", len(records), len(records) - len(valid), len(boundaries),
    )
    return SweepReport(records=records, boundaries=boundaries)
