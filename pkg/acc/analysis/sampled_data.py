# acc/analysis/sampled_data.py
"""
Linearized sampled-data dynamics around a periodic orbit:

    x_{n+1} = Phi x_n + Gamma1 v_s,n + Gamma2 v_r,n

Phi carries the rank-one saltation correction from the sensitivity of the
switching instant. For a 2T orbit the per-cycle maps are composed.
"""
import logging
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from ..errors import DimensionError, GrazingError, PoleError, RangeError
from ..models import (
    Linearization,
    PeriodicOrbit,
    StabilityVerdict,
    SwitchedModel,
    TransferKind,
)
from ..utils.numerics import eigenvalues, expm, expm_integral, solve_linear
from .steady_state import orbit_derivatives

logger = logging.getLogger(__name__)

DEFAULT_EIG_TOL = 1e-6
GRAZING_TOL_REL = 1e-9
POLE_TOL = 1e-9


def _switching_denominator(m: SwitchedModel, minus: np.ndarray) -> float:
    slope = m.ramp.slope
    c_dot = float(m.C_row @ minus)
    denom = c_dot - slope
    if abs(denom) <= GRAZING_TOL_REL * max(abs(c_dot) + abs(slope), 1e-300):
        raise GrazingError(
            f"y crosses the ramp tangentially (C x'(d-) = {c_dot!r}, ramp slope = {slope!r})"
        )
    return denom


def _cycle_maps(m: SwitchedModel, orbit: PeriodicOrbit, i: int) -> Tuple[np.ndarray, np.ndarray]:
    d = orbit.duties[i]
    T = orbit.T
    minus, plus = orbit_derivatives(m, orbit)
    jump = minus[i] - plus[i]
    denom = _switching_denominator(m, minus[i])

    e1 = expm(m.A1, d)
    e2 = expm(m.A2, T - d)
    int1_b1 = expm_integral(m.A1, d) @ m.B1
    int2_b2 = expm_integral(m.A2, T - d) @ m.B2

    saltation = np.eye(m.n) - np.outer(jump, m.C_row) / denom
    phi = e2 @ saltation @ e1
    gamma = e2 @ (int1_b1 - np.outer(jump, m.C_row @ int1_b1 + m.D_row) / denom) + int2_b2
    return phi, gamma


def linearize(m: SwitchedModel, orbit: PeriodicOrbit) -> Linearization:
    """
    Phi and Gamma of the sampled-data map at orbit.x_start, using the
    derivative-jump form of the saltation term. Requires interior switching.
    """
    for d in orbit.duties:
        if not 0.0 < d < orbit.T:
            raise GrazingError(f"linearize needs an interior switching instant, got d={d!r}")

    phi = np.eye(m.n)
    gamma = np.zeros((m.n, 2))
    for i in range(orbit.m):
        phi_i, gamma_i = _cycle_maps(m, orbit, i)
        phi = phi_i @ phi
        gamma = phi_i @ gamma + gamma_i

    eigs = eigenvalues(phi)
    logger.debug("linearize: max|lambda|=%.6f", float(np.max(np.abs(eigs))))
    return Linearization(
        phi=phi,
        gamma1=gamma[:, 0].copy(),
        gamma2=gamma[:, 1].copy(),
        orbit_ref=orbit,
        eigs=eigs,
    )


def monodromy_matrix_form(m: SwitchedModel, orbit: PeriodicOrbit, cycle: int = 0) -> np.ndarray:
    """
    Phi for one cycle written with the stage matrices directly:
        e^{A2(T-d)} (I - ((A1-A2) x(d) + (B1-B2) u) C / (C (A1 x(d) + B1 u) - h'(d))) e^{A1 d}
    """
    d = orbit.duties[cycle]
    x_d = orbit.x_switch[cycle]
    u = orbit.u
    num = (m.A1 - m.A2) @ x_d + (m.B1 - m.B2) @ u
    denom = _switching_denominator(m, m.A1 @ x_d + m.B1 @ u)
    correction = np.eye(m.n) - np.outer(num, m.C_row) / denom
    return expm(m.A2, orbit.T - d) @ correction @ expm(m.A1, d)


def classify_eigenvalues(eigs: Iterable[complex], tol: float = DEFAULT_EIG_TOL) -> StabilityVerdict:
    vals = np.asarray(list(eigs), dtype=complex)
    mags = np.abs(vals)
    max_mag = float(np.max(mags)) if len(vals) else 0.0
    critical = vals[mags >= 1.0 - tol]

    if critical.size == 0:
        return StabilityVerdict(kind="stable", max_magnitude=max_mag,
                                critical_eigs=critical, tolerance=tol)

    # ties between a conjugate pair resolve to the same magnitude and |Im|
    dominant = complex(critical[np.argmax(np.abs(critical))])
    dominant = complex(dominant.real, abs(dominant.imag))
    if abs(dominant.imag) <= tol:
        kind = "period_doubling" if dominant.real < 0 else "real_unstable"
    else:
        kind = "neimark"

    marginal = abs(max_mag - 1.0) <= tol
    if marginal:
        logger.warning("classify_stability: marginal verdict %s (max|lambda|=%.9f)", kind, max_mag)
    return StabilityVerdict(
        kind=kind,
        max_magnitude=max_mag,
        critical_eigs=critical,
        tolerance=tol,
        marginal=marginal,
        dominant=dominant,
    )


def classify_stability(lin: Linearization, tol: float = DEFAULT_EIG_TOL) -> StabilityVerdict:
    return classify_eigenvalues(lin.eigs, tol)


def _output_row(m: SwitchedModel, which: TransferKind) -> np.ndarray:
    if which == "control_to_current":
        idx = next((i for i, s in enumerate(m.state_labels) if s.startswith("i_L")), 0)
        row = np.zeros(m.n)
        row[idx] = 1.0
        return row
    return m.E


def _input_column(lin: Linearization, which: TransferKind) -> np.ndarray:
    if which == "audio":
        return lin.gamma1
    if which in ("control_to_output", "control_to_current"):
        return lin.gamma2
    raise DimensionError(f"unknown transfer function {which!r}")


def transfer_response(lin: Linearization, m: SwitchedModel, which: TransferKind, z: complex) -> complex:
    """
    E (zI - Phi)^{-1} Gamma_k evaluated at one point z.
      control_to_output -> Gamma2 with E = (E1 + E2) / 2
      audio             -> Gamma1 with E
      control_to_current-> Gamma2 with the inductor-current selector
    """
    z = complex(z)
    col = _input_column(lin, which)
    row = _output_row(m, which)
    if len(lin.eigs) and float(np.min(np.abs(lin.eigs - z))) <= POLE_TOL:
        raise PoleError(f"z={z!r} is an eigenvalue of Phi")
    resolvent_col = solve_linear(z * np.eye(m.n) - lin.phi, col.astype(complex))
    return complex(row @ resolvent_col)


def frequency_response(
        lin: Linearization,
        m: SwitchedModel,
        which: TransferKind,
        omegas,
        period: Optional[float] = None,
) -> np.ndarray:
    """
    T(e^{j w T}) over angular frequencies w; only |w| < pi/T is meaningful.
    """
    period = period or lin.orbit_ref.m * lin.orbit_ref.T
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    limit = np.pi / period
    if np.any(np.abs(w) >= limit):
        raise RangeError(f"frequency response only valid for |omega| < pi/T = {limit!r} rad/s")
    return np.array([transfer_response(lin, m, which, np.exp(1j * wk * period)) for wk in w])


def bode_table(values) -> Tuple[np.ndarray, np.ndarray]:
    """Magnitude in dB and unwrapped phase in degrees."""
    vals = np.asarray(values, dtype=complex)
    mag_db = 20.0 * np.log10(np.maximum(np.abs(vals), 1e-300))
    phase = np.degrees(np.unwrap(np.angle(vals)))
    return mag_db, phase


def spectral_radius(lin_or_eigs: Union[Linearization, np.ndarray]) -> float:
    eigs = lin_or_eigs.eigs if isinstance(lin_or_eigs, Linearization) else np.asarray(lin_or_eigs)
    return float(np.max(np.abs(eigs)))
