# acc/circuit/converter.py
"""
Circuit, compensator and ramp parameters -> switched state-space model.

State ordering is fixed as (i_L, v_C, v_e1, v_e2); the compensator
realization feeds v_r into v_e2 with gain omega_p and y = C x + v_r.
"""
import logging
import math

import numpy as np

from ..errors import DomainError, PoleError
from ..models import ConverterParams, RampSignal, SwitchedModel

logger = logging.getLogger(__name__)

BUCK_STATE_LABELS = ("i_L_A", "v_C_V", "v_e1", "v_e2")


def build_buck_model(p: ConverterParams) -> SwitchedModel:
    rr = p.R + p.R_c

    a = np.array([
        [-p.R * p.R_c / (rr * p.L), -p.R / (rr * p.L), 0.0, 0.0],
        [p.R / (rr * p.C), -1.0 / (rr * p.C), 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-p.omega_p * p.R_s, 0.0, 0.0, -p.omega_p],
    ])

    b1 = np.zeros((4, 2))
    b1[0, 0] = 1.0 / p.L
    b1[3, 1] = p.omega_p
    b2 = b1.copy()
    b2[0, 0] = 0.0

    c_row = np.array([0.0, 0.0, p.K_c, p.K_c / p.omega_z])
    d_row = np.array([0.0, 1.0])
    e_row = np.array([p.R * p.R_c / rr, p.R / rr, 0.0, 0.0])

    ramp = RampSignal(V_l=p.V_l, V_h=p.V_h, T=p.T)
    amp = p.V_h - p.V_l
    scales = np.array([
        p.v_s / p.R,
        p.v_s,
        amp / p.K_c,
        amp * p.omega_z / p.K_c,
    ])

    duty_hint = None
    if p.v_set is not None and p.v_s > 0:
        duty_hint = min(max(p.v_set / p.v_s, 0.05), 0.95)

    return SwitchedModel(
        A1=a,
        A2=a.copy(),
        B1=b1,
        B2=b2,
        C_row=c_row,
        D_row=d_row,
        E1=e_row,
        E2=e_row.copy(),
        ramp=ramp,
        state_labels=BUCK_STATE_LABELS,
        state_scales=scales,
        duty_hint=duty_hint,
    )


def ramp_value(r: RampSignal, t: float) -> float:
    """
    Sawtooth h(t): V_l at every clock edge, rising linearly to V_h^- just
    before the next one.
    """
    if t < 0:
        raise DomainError(f"ramp_value needs t >= 0, got {t!r}")
    frac = math.fmod(t, r.T) / r.T
    if frac >= 1.0:
        frac = 0.0
    return r.V_l + (r.V_h - r.V_l) * frac


def compensator_response(p: ConverterParams, s: complex) -> complex:
    """
    H_c(s) = K_c (1 + s/omega_z) / (s (1 + s/omega_p)).
    """
    s = complex(s)
    den = s * (1.0 + s / p.omega_p)
    if s == 0 or abs(den) == 0.0:
        raise PoleError(f"compensator pole at s={s!r}")
    return p.K_c * (1.0 + s / p.omega_z) / den


def rescale_states(model: SwitchedModel, factors) -> SwitchedModel:
    """
    Similarity transform x' = S x with S = diag(factors). Stage dynamics,
    outputs and scales are carried into the new coordinates.
    """
    s = np.asarray(factors, dtype=float).reshape(-1)
    if s.shape != (model.n,) or np.any(s == 0):
        raise DomainError("rescale_states needs N nonzero factors")
    s_inv = 1.0 / s

    def sa(a: np.ndarray) -> np.ndarray:
        return (s[:, None] * a) * s_inv[None, :]

    return SwitchedModel(
        A1=sa(model.A1),
        A2=sa(model.A2),
        B1=s[:, None] * model.B1,
        B2=s[:, None] * model.B2,
        C_row=model.C_row * s_inv,
        D_row=model.D_row,
        E1=model.E1 * s_inv,
        E2=model.E2 * s_inv,
        ramp=model.ramp,
        state_labels=model.state_labels,
        state_scales=np.abs(model.state_scales * s),
        duty_hint=model.duty_hint,
    )
