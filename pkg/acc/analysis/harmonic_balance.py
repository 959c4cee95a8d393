# acc/analysis/harmonic_balance.py
"""
Harmonic-balance estimate of the period-doubling threshold of an ACC buck.

    V_s* ~ (V_h - V_l) / (2 Re[G(j w_s) - G(j w_s / 2)]),   G = R_s H_c G_1

and its high-frequency simplification (2 (V_h - V_l) L w_z w_s / (3 R_s K_c)) phi(k),
k = w_p / w_s, phi(k) = (1 + k^2)(0.25 + k^2) / k.
"""
import logging
import math
from typing import Optional, Tuple

from ..circuit.converter import compensator_response
from ..errors import DomainError, PoleError
from ..models import ConverterParams, HbPrediction, HbVerdict
from ..utils.numerics import find_root_scalar

logger = logging.getLogger(__name__)

# minimizer of phi: 3 k^4 + 1.25 k^2 - 0.25 = 0, a quadratic in k^2
K_STAR = math.sqrt((-1.25 + math.sqrt(1.25 ** 2 + 4.0 * 3.0 * 0.25)) / (2.0 * 3.0))


def phi(k: float) -> float:
    if not k > 0:
        raise DomainError(f"phi needs k > 0, got {k!r}")
    k2 = k * k
    return (1.0 + k2) * (0.25 + k2) / k


def duty_to_current(p: ConverterParams, s: complex) -> complex:
    """G_1(s) = (R C s + 1) / (R L C s^2 + L s + R)."""
    s = complex(s)
    den = p.R * p.L * p.C * s * s + p.L * s + p.R
    if den == 0:
        raise PoleError(f"G_1 pole at s={s!r}")
    return (p.R * p.C * s + 1.0) / den


def loop_gain(p: ConverterParams, s: complex) -> complex:
    return p.R_s * compensator_response(p, s) * duty_to_current(p, s)


def critical_voltage_exact(p: ConverterParams) -> Optional[float]:
    """
    None when Re[G(j w_s) - G(j w_s / 2)] <= 0: no finite threshold is predicted.
    """
    ws = p.omega_s
    re = (loop_gain(p, 1j * ws) - loop_gain(p, 0.5j * ws)).real
    if not re > 0:
        logger.info("critical_voltage_exact: Re[G(jws) - G(jws/2)] = %r <= 0, no threshold", re)
        return None
    return (p.V_h - p.V_l) / (2.0 * re)


def _simplified_coefficient(p: ConverterParams) -> float:
    return 2.0 * (p.V_h - p.V_l) * p.L * p.omega_z * p.omega_s / (3.0 * p.R_s * p.K_c)


def critical_voltage_simplified(p: ConverterParams, k: Optional[float] = None) -> float:
    return _simplified_coefficient(p) * phi(p.k if k is None else k)


def vs_min(p: ConverterParams) -> float:
    return critical_voltage_simplified(p, K_STAR)


def _unstable_interval(p: ConverterParams) -> Tuple[float, float]:
    """{k : V_s*(k) <= v_s}, bracketed on both sides of K_STAR."""
    def excess(k: float) -> float:
        return critical_voltage_simplified(p, k) - p.v_s

    if excess(K_STAR) >= 0.0:
        return K_STAR, K_STAR

    lo = K_STAR * 1e-3
    while excess(lo) <= 0.0:
        lo *= 1e-3
    hi = K_STAR * 2.0
    while excess(hi) <= 0.0:
        hi *= 2.0

    k_lo = find_root_scalar(excess, lo, K_STAR, tol=1e-12)
    k_hi = find_root_scalar(excess, K_STAR, hi, tol=1e-12)
    return k_lo, k_hi


def theorem1_predict(p: ConverterParams) -> Tuple[HbVerdict, Optional[Tuple[float, float]]]:
    """
    unstable_range_exists iff v_s >= V_s^min. The k-interval is approximate:
    it comes from the simplified threshold, not from the exact sampled-data model.
    """
    if p.v_s >= vs_min(p):
        return "unstable_range_exists", _unstable_interval(p)
    return "pole_insensitive", None


def predict(p: ConverterParams) -> HbPrediction:
    verdict, interval = theorem1_predict(p)
    pred = HbPrediction(
        vs_star_exact=critical_voltage_exact(p),
        vs_star_simplified=critical_voltage_simplified(p),
        vs_min=vs_min(p),
        k=p.k,
        phi_value=phi(p.k),
        verdict=verdict,
        unstable_k_interval=interval,
    )
    logger.info(
        "harmonic balance: vs_min=%.4f V, v_s=%.4f V -> %s", pred.vs_min, p.v_s, pred.verdict,
    )
    return pred
