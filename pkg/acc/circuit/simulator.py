# acc/circuit/simulator.py
"""
Exact cycle-by-cycle simulation of the two-stage PWM model.

Each clock period starts in S1. The first downward crossing of the
compensator output y(t) through the ramp h(t) latches the converter into
S2 until the next clock edge. State propagation is always by the exact
affine flow; the scan grid only brackets the crossing.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..errors import DivergenceError, InsufficientDataError
from ..models import (
    CycleResult,
    CycleSamples,
    PeriodDetection,
    SwitchedModel,
    Trajectory,
)
from ..utils.numerics import SWITCHING_TOL_REL, affine_flow, find_root_scalar

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 64
DIVERGENCE_FACTOR = 1e6


class CycleStepper:
    """
    Stage propagators for one (model, u) pair. u is held constant over the
    cycle, so the bracketing-grid step operators are computed once.
    """

    def __init__(self, model: SwitchedModel, u, grid_points: int = DEFAULT_GRID_POINTS):
        self.model = model
        self.u = np.asarray(u, dtype=float).reshape(2)
        self.T = model.ramp.T
        self.grid_points = max(2, int(grid_points))
        self.b1 = model.B1 @ self.u
        self.b2 = model.B2 @ self.u
        self.y_offset = float(model.D_row @ self.u)
        self.dt = self.T / self.grid_points
        self._step1 = affine_flow(model.A1, self.b1, self.dt)
        self._step2 = affine_flow(model.A2, self.b2, self.dt)

    def stage1(self, x0: np.ndarray, t: float) -> np.ndarray:
        phi, g = affine_flow(self.model.A1, self.b1, t)
        return phi @ x0 + g

    def stage2(self, x0: np.ndarray, t: float) -> np.ndarray:
        phi, g = affine_flow(self.model.A2, self.b2, t)
        return phi @ x0 + g

    def y(self, x: np.ndarray) -> float:
        return float(self.model.C_row @ x) + self.y_offset

    def h(self, t_local: float) -> float:
        # local cycle time in [0, T]; h(T) is the left limit V_h
        return self.model.ramp.V_l + self.model.ramp.slope * t_local

    def gap(self, x: np.ndarray, t_local: float) -> float:
        return self.y(x) - self.h(t_local)

    def state_at(self, x_n: np.ndarray, d: float, x_d: np.ndarray, t: float) -> np.ndarray:
        if t <= d:
            return self.stage1(x_n, t)
        return self.stage2(x_d, t - d)

    def _scan_stage1(self, x_n: np.ndarray) -> Optional[Tuple[float, float]]:
        """First grid interval on which y - h changes sign downward under S1."""
        phi, g = self._step1
        x = x_n
        prev = self.gap(x, 0.0)
        for k in range(1, self.grid_points + 1):
            x = phi @ x + g
            t = k * self.dt
            cur = self.gap(x, t)
            if prev >= 0.0 > cur:
                return (k - 1) * self.dt, t
            prev = cur
        return None

    def _count_crossings(self, x_n: np.ndarray, d: float, x_d: np.ndarray) -> int:
        """Downward crossings of y - h along the latched trajectory, on the scan grid."""
        count = 1
        k0 = int(np.floor(d / self.dt)) + 1
        if k0 > self.grid_points:
            return count
        x = self.stage2(x_d, k0 * self.dt - d)
        prev = self.gap(x, k0 * self.dt)
        phi, g = self._step2
        for k in range(k0 + 1, self.grid_points + 1):
            x = phi @ x + g
            cur = self.gap(x, k * self.dt)
            if prev >= 0.0 > cur:
                count += 1
            prev = cur
        return count

    def advance(self, x_n: np.ndarray, samples_per_cycle: int = 0) -> Tuple[CycleResult, Optional[CycleSamples]]:
        x_n = np.asarray(x_n, dtype=float).reshape(-1)
        T = self.T

        if self.gap(x_n, 0.0) < 0.0:
            d, saturated, crossings = 0.0, "full-off", 0
        else:
            bracket = self._scan_stage1(x_n)
            if bracket is None:
                d, saturated, crossings = T, "full-on", 0
            else:
                lo, hi = bracket
                d = find_root_scalar(
                    lambda t: self.gap(self.stage1(x_n, t), t),
                    lo,
                    hi,
                    tol=SWITCHING_TOL_REL * T,
                )
                # a root on the cycle edge is a saturated cycle, not a switching
                if d <= 0.0:
                    d, saturated, crossings = 0.0, "full-off", 0
                elif d >= T:
                    d, saturated, crossings = T, "full-on", 0
                else:
                    saturated = "none"
                    crossings = -1

        x_d = self.stage1(x_n, d)
        x_end = self.stage2(x_d, T - d)
        if saturated == "none":
            crossings = self._count_crossings(x_n, d, x_d)

        result = CycleResult(
            x_end=x_end,
            d=d,
            saturated=saturated,
            crossing_count=crossings,
            x_switch=x_d,
        )

        samples = None
        if samples_per_cycle > 0:
            samples = self._dense(x_n, d, x_d, samples_per_cycle)
        return result, samples

    def _dense(self, x_n: np.ndarray, d: float, x_d: np.ndarray, count: int) -> CycleSamples:
        ts = [k * self.T / count for k in range(count)]
        if 0.0 < d < self.T and not any(abs(t - d) <= 1e-15 * self.T for t in ts):
            ts.append(d)
            ts.sort()
        xs = np.array([self.state_at(x_n, d, x_d, t) for t in ts])
        ys = xs @ self.model.C_row + self.y_offset
        hs = np.array([self.h(t) for t in ts])
        return CycleSamples(t=np.asarray(ts), x=xs, y=ys, h=hs)


def advance_cycle(
        m: SwitchedModel,
        x_n,
        u_n,
        samples_per_cycle: int = 0,
        stepper: Optional[CycleStepper] = None,
) -> Tuple[CycleResult, Optional[CycleSamples]]:
    """
    One clock period from the state x_n at the clock edge with inputs u_n
    held constant. Returns the cycle result and, when samples_per_cycle > 0,
    dense samples for plotting.
    """
    stepper = stepper or CycleStepper(m, u_n)
    result, samples = stepper.advance(x_n, samples_per_cycle)
    if not np.all(np.isfinite(result.x_end)):
        raise DivergenceError("state became non-finite", cycle_index=0)
    return result, samples


def simulate(
        m: SwitchedModel,
        x0,
        u,
        n_cycles: int,
        samples_per_cycle: int = 32,
        grid_points: int = DEFAULT_GRID_POINTS,
) -> Trajectory:
    if n_cycles < 1:
        raise InsufficientDataError(f"n_cycles must be >= 1, got {n_cycles}")

    stepper = CycleStepper(m, u, grid_points=grid_points)
    T = m.ramp.T
    x = np.asarray(x0, dtype=float).reshape(-1)

    ts: List[np.ndarray] = []
    xs: List[np.ndarray] = []
    ys: List[np.ndarray] = []
    hs: List[np.ndarray] = []
    boundaries: List[int] = []
    duties: List[float] = []
    saturation: List[str] = []
    strobe: List[np.ndarray] = [x]
    n_samples = 0

    def partial() -> Trajectory:
        return _assemble(m, ts, xs, ys, hs, boundaries, duties, saturation, strobe)

    for n in range(n_cycles):
        result, samples = stepper.advance(x, samples_per_cycle)
        if samples is not None:
            boundaries.append(n_samples)
            ts.append(samples.t + n * T)
            xs.append(samples.x)
            ys.append(samples.y)
            hs.append(samples.h)
            n_samples += len(samples.t)

        x = result.x_end
        if not np.all(np.isfinite(x)) or np.max(np.abs(x / m.state_scales)) > DIVERGENCE_FACTOR:
            logger.warning("simulate: divergence at cycle %s (scaled norm too large)", n)
            raise DivergenceError(
                f"state diverged at cycle {n}",
                cycle_index=n,
                trajectory=partial(),
            )
        duties.append(result.d)
        saturation.append(result.saturated)
        strobe.append(x)

    if samples_per_cycle > 0:
        boundaries.append(n_samples)
        ts.append(np.array([n_cycles * T]))
        xs.append(x[None, :])
        ys.append(np.array([stepper.y(x)]))
        hs.append(np.array([m.ramp.V_l]))

    logger.debug("simulate: %s cycles, last duty=%r", n_cycles, duties[-1])
    return partial()


def _assemble(m, ts, xs, ys, hs, boundaries, duties, saturation, strobe) -> Trajectory:
    n = m.n
    return Trajectory(
        t=np.concatenate(ts) if ts else np.zeros(0),
        x=np.vstack(xs) if xs else np.zeros((0, n)),
        y=np.concatenate(ys) if ys else np.zeros(0),
        h=np.concatenate(hs) if hs else np.zeros(0),
        cycle_boundaries=list(boundaries),
        duties=list(duties),
        saturation=list(saturation),
        strobe=np.array(strobe),
        T=m.ramp.T,
        state_labels=m.state_labels,
        state_scales=m.state_scales,
    )


def detect_period(tr: Trajectory, tol_rel: float = 1e-6, max_period: int = 16) -> PeriodDetection:
    """
    Smallest m with ||x((n+m)T) - x(nT)|| <= tol_rel over the trailing window
    of stroboscopic samples, in per-coordinate scaled units.
    """
    if tol_rel <= 0:
        raise InsufficientDataError("tol_rel must be positive")
    strobe = tr.strobe / tr.state_scales
    if len(strobe) < 8:
        raise InsufficientDataError(f"need at least 8 stroboscopic samples, got {len(strobe)}")

    norms = np.max(np.abs(strobe), axis=1)
    initial = max(norms[0], 1.0)
    if norms[-1] > 1e3 * initial and norms[-1] >= np.max(norms):
        return PeriodDetection(kind="diverging")

    width = max(8, len(strobe) // 2)
    window = strobe[-width:]
    ref = max(1.0, float(np.max(np.abs(window))))

    m = 1
    while m <= min(max_period, width // 2):
        diffs = window[m:] - window[:-m]
        if np.max(np.abs(diffs)) <= tol_rel * ref:
            return PeriodDetection(kind="periodic", period=m)
        m *= 2
    return PeriodDetection(kind="aperiodic")


def ripple_peak_to_peak(tr: Trajectory, last_cycles: int = 1, signal: str = "y") -> float:
    """Peak-to-peak of y (or h) over the trailing cycles of a dense trajectory."""
    if not tr.cycle_boundaries:
        raise InsufficientDataError("trajectory has no dense samples")
    last_cycles = max(1, min(last_cycles, tr.n_cycles))
    start = tr.cycle_boundaries[tr.n_cycles - last_cycles]
    values = getattr(tr, signal)[start:]
    return float(np.max(values) - np.min(values))
