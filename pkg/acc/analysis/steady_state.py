# acc/analysis/steady_state.py
"""
Periodic steady states as fixed points of the cycle map.

Unknowns are the state at the clock edge and one switching instant per
cycle. The residual is exact (affine flows, no event search), so unstable
orbits are found as easily as stable ones.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..circuit.simulator import simulate
from ..errors import AccError, ConvergenceError, DomainError, SaturationError
from ..models import PeriodicOrbit, SwitchedModel, Trajectory
from ..utils.numerics import affine_flow, expm_integral

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 8
FD_STEP_REL = 1e-6
COLLAPSE_SPLITS = (0.05, 0.10, 0.20, 0.30, 0.35, 0.40, 0.45)


def averaged_equilibrium(m: SwitchedModel, u, d_guess: float) -> np.ndarray:
    """
    Minimum-norm least-squares equilibrium of the duty-weighted dynamics
    (d A1 + (1-d) A2) x + (d B1 + (1-d) B2) u = 0.
    """
    if not 0.0 <= d_guess <= 1.0:
        raise DomainError(f"d_guess must be in [0, 1], got {d_guess!r}")
    u = np.asarray(u, dtype=float).reshape(2)
    a_avg = d_guess * m.A1 + (1.0 - d_guess) * m.A2
    b_avg = (d_guess * m.B1 + (1.0 - d_guess) * m.B2) @ u

    x_eq, _, rank, _ = scipy.linalg.lstsq(a_avg, -b_avg)

    # integrator coordinates show up as all-zero columns
    known_free = int(np.sum(np.all(a_avg == 0.0, axis=0)))
    if rank < m.n - known_free:
        logger.warning(
            "averaged_equilibrium: rank %s < %s (N=%s, integrators=%s); using minimum-norm solution",
            rank, m.n - known_free, m.n, known_free,
        )
    return np.asarray(x_eq, dtype=float)


def _align_free_coordinates(m: SwitchedModel, u: np.ndarray, x: np.ndarray, d_guess: float) -> np.ndarray:
    """
    Move x along the null space of the averaged dynamics so that y sits on
    the ramp at the guessed switching instant.
    """
    a_avg = d_guess * m.A1 + (1.0 - d_guess) * m.A2
    _, sv, vh = np.linalg.svd(a_avg)
    cutoff = 1e-12 * max(sv[0], 1.0)
    null = vh[np.concatenate([sv, np.zeros(m.n - len(sv))]) <= cutoff].T
    if null.size == 0:
        return x
    c = m.C_row @ null
    norm = float(c @ c)
    if norm == 0.0:
        return x
    target = m.ramp.V_l + m.ramp.amplitude * d_guess
    delta = target - m.output(x, u)
    return x + null @ (c * delta / norm)


class _ShootingProblem:
    def __init__(self, model: SwitchedModel, u: np.ndarray, period_multiple: int):
        self.model = model
        self.u = u
        self.p = period_multiple
        self.n = model.n
        self.T = model.ramp.T
        self.b1 = model.B1 @ u
        self.b2 = model.B2 @ u
        self.y_offset = float(model.D_row @ u)
        self.z_scales = np.concatenate([model.state_scales, np.full(self.p, self.T)])
        self.r_scales = np.concatenate([model.state_scales, np.full(self.p, model.ramp.amplitude)])

    def propagate(self, x0: np.ndarray, duties: Sequence[float]):
        starts, switches = [], []
        x = x0
        for d in duties:
            starts.append(x)
            phi1, g1 = affine_flow(self.model.A1, self.b1, d)
            x_d = phi1 @ x + g1
            switches.append(x_d)
            phi2, g2 = affine_flow(self.model.A2, self.b2, self.T - d)
            x = phi2 @ x_d + g2
        return x, np.array(starts), np.array(switches)

    def residual(self, z: np.ndarray) -> np.ndarray:
        x0 = z[:self.n]
        duties = z[self.n:]
        x_end, _, switches = self.propagate(x0, duties)
        r_switch = [
            float(self.model.C_row @ x_d) + self.y_offset - (self.model.ramp.V_l + self.model.ramp.slope * d)
            for x_d, d in zip(switches, duties)
        ]
        r = np.concatenate([x_end - x0, r_switch])
        return r / self.r_scales

    def jacobian(self, z: np.ndarray, r0: np.ndarray) -> np.ndarray:
        jac = np.empty((len(r0), len(z)))
        for j in range(len(z)):
            step = FD_STEP_REL * max(abs(z[j]), self.z_scales[j])
            zj = z.copy()
            zj[j] += step
            jac[:, j] = (self.residual(zj) - r0) / step
        return jac


def _newton(problem: _ShootingProblem, z0: np.ndarray, tol: float, max_iter: int) -> Tuple[np.ndarray, float, int]:
    z = z0.copy()
    r = problem.residual(z)
    norm = float(np.max(np.abs(r)))

    for it in range(max_iter):
        logger.debug("newton iter=%s residual=%.3e", it, norm)
        if norm <= tol:
            return z, norm, it
        jac = problem.jacobian(z, r)
        try:
            dz = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as e:
            raise ConvergenceError(f"singular shooting Jacobian at iteration {it}: {e}", residual=norm)

        lam = 1.0
        best = (z + dz, problem.residual(z + dz))
        for _ in range(MAX_HALVINGS):
            z_try = z + lam * dz
            r_try = problem.residual(z_try)
            if np.all(np.isfinite(r_try)) and np.max(np.abs(r_try)) < norm:
                best = (z_try, r_try)
                break
            lam *= 0.5
        z, r = best
        norm = float(np.max(np.abs(r)))
        if not np.isfinite(norm):
            raise ConvergenceError(f"shooting residual became non-finite at iteration {it}", residual=norm)

    if norm <= tol:
        return z, norm, max_iter
    raise ConvergenceError(
        f"Newton shooting did not converge in {max_iter} iterations (residual={norm:.3e})",
        residual=norm,
    )


def _initial_guess(m: SwitchedModel, u: np.ndarray, period_multiple: int,
                   d_guess: float, split: float) -> np.ndarray:
    x0 = averaged_equilibrium(m, u, d_guess)
    x0 = _align_free_coordinates(m, u, x0, d_guess)
    T = m.ramp.T
    if period_multiple == 1:
        duties = [d_guess * T]
    else:
        duties = [d_guess * T * (1.0 + split), d_guess * T * (1.0 - split)]
    return np.concatenate([x0, duties])


def find_periodic_orbit(
        m: SwitchedModel,
        u,
        period_multiple: int = 1,
        init: Optional[Tuple[np.ndarray, Sequence[float]]] = None,
        d_guess: Optional[float] = None,
        tol: float = NEWTON_TOL,
        max_iter: int = NEWTON_MAX_ITER,
) -> PeriodicOrbit:
    """
    Newton shooting for the m_p*T-periodic orbit (m_p in {1, 2}).

    init is an optional (x_start, duties) pair; otherwise the averaged
    equilibrium at d_guess (model duty hint, else 0.5) seeds the solve.
    The orbit is returned whatever its stability.
    """
    if period_multiple not in (1, 2):
        raise DomainError(f"period_multiple must be 1 or 2, got {period_multiple!r}")
    u = np.asarray(u, dtype=float).reshape(2)
    T = m.ramp.T
    problem = _ShootingProblem(m, u, period_multiple)

    if d_guess is None:
        d_guess = m.duty_hint if m.duty_hint is not None else 0.5

    if init is not None:
        x_init, duties_init = init
        if len(duties_init) != period_multiple:
            raise DomainError(f"init has {len(duties_init)} duties, expected {period_multiple}")
        attempts = [np.concatenate([np.asarray(x_init, dtype=float).reshape(-1), duties_init])]
    elif period_multiple == 1:
        attempts = [_initial_guess(m, u, 1, d_guess, 0.0)]
    else:
        attempts = [_initial_guess(m, u, 2, d_guess, s) for s in COLLAPSE_SPLITS]

    last_error: Optional[AccError] = None
    for z0 in attempts:
        try:
            z, norm, iterations = _newton(problem, z0, tol, max_iter)
        except ConvergenceError as e:
            last_error = e
            logger.debug("find_periodic_orbit: attempt failed: %s", e)
            continue

        duties = z[m.n:]
        if period_multiple == 2 and abs(duties[0] - duties[1]) <= 1e-7 * T:
            logger.info("find_periodic_orbit: 2T solve collapsed onto the T-periodic orbit, trying next split")
            last_error = ConvergenceError("2T orbit collapsed onto the T-periodic orbit", residual=norm)
            continue

        outside = [d for d in duties if not 0.0 < d < T]
        if outside:
            last_error = SaturationError(
                f"converged switching instant d={outside[0]!r} outside (0, T={T!r}); saturated orbit"
            )
            logger.debug("find_periodic_orbit: attempt saturated: %s", last_error)
            continue

        orbit = _make_orbit(problem, z, norm, iterations)
        logger.info(
            "find_periodic_orbit: m_p=%s duties=%s residual=%.2e iterations=%s",
            period_multiple, [round(x, 6) for x in orbit.duty_cycles], norm, iterations,
        )
        return orbit

    assert last_error is not None
    raise last_error


def _make_orbit(problem: _ShootingProblem, z: np.ndarray, norm: float, iterations: int) -> PeriodicOrbit:
    m = problem.model
    x0 = z[:m.n].copy()
    duties = tuple(float(d) for d in z[m.n:])
    _, starts, switches = problem.propagate(x0, duties)
    minus = switches @ m.A1.T + problem.b1
    plus = switches @ m.A2.T + problem.b2
    return PeriodicOrbit(
        m=problem.p,
        x_start=x0,
        duties=duties,
        u=problem.u.copy(),
        residual=norm,
        deriv_minus=minus,
        deriv_plus=plus,
        x_switch=switches,
        x_cycle_start=starts,
        T=problem.T,
        iterations=iterations,
    )


def orbit_derivatives(m: SwitchedModel, orbit: PeriodicOrbit) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-sided time derivatives at each switching instant:
        x'(d^-) = A1 x(d) + B1 u,   x'(d^+) = A2 x(d) + B2 u
    """
    minus = orbit.x_switch @ m.A1.T + m.B1 @ orbit.u
    plus = orbit.x_switch @ m.A2.T + m.B2 @ orbit.u
    return minus, plus


def orbit_waveform(m: SwitchedModel, orbit: PeriodicOrbit, samples_per_cycle: int = 128) -> Trajectory:
    tr = simulate(m, orbit.x_start, orbit.u, orbit.m, samples_per_cycle=samples_per_cycle)
    for d_sim, d_orb in zip(tr.duties, orbit.duties):
        if abs(d_sim - d_orb) > 1e-6 * orbit.T:
            logger.warning(
                "orbit_waveform: simulated switching %r differs from orbit %r (crossing structure changed)",
                d_sim, d_orb,
            )
    return tr


def cycle_average(m: SwitchedModel, orbit: PeriodicOrbit, row) -> float:
    """
    Exact average of row @ x(t) over the m_p periods of the orbit.
    Each stage is integrated through the augmented affine generator.
    """
    row = np.asarray(row, dtype=float).reshape(-1)
    n = m.n

    def stage_integral(a: np.ndarray, b: np.ndarray, x0: np.ndarray, tau: float) -> np.ndarray:
        gen = np.zeros((n + 1, n + 1))
        gen[:n, :n] = a
        gen[:n, n] = b
        return (expm_integral(gen, tau) @ np.append(x0, 1.0))[:n]

    total = np.zeros(n)
    b1 = m.B1 @ orbit.u
    b2 = m.B2 @ orbit.u
    for x_start, x_d, d in zip(orbit.x_cycle_start, orbit.x_switch, orbit.duties):
        total += stage_integral(m.A1, b1, x_start, d)
        total += stage_integral(m.A2, b2, x_d, orbit.T - d)
    return float(row @ total) / (orbit.m * orbit.T)
