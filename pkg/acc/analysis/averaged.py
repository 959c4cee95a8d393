# acc/analysis/averaged.py
"""
State-space averaged baseline. Only the Jacobian and its poles are built;
there is no averaged input matrix, so no averaged transfer functions.
"""
import logging

import numpy as np

from ..errors import UnsupportedTopologyError
from ..models import AveragedJacobian, SwitchedModel
from ..utils.numerics import eigenvalues

logger = logging.getLogger(__name__)


def averaged_jacobian(m: SwitchedModel, u) -> AveragedJacobian:
    """
    a_avg = A1 + (B1 - B2) u C / (V_h - V_l)

    The formula holds for the buck-type case A1 == A2 only.
    """
    if not np.array_equal(m.A1, m.A2):
        raise UnsupportedTopologyError("averaged_jacobian requires A1 == A2 (buck-type stage matrices)")
    u = np.asarray(u, dtype=float).reshape(2)
    correction = np.outer((m.B1 - m.B2) @ u, m.C_row) / m.ramp.amplitude
    a_avg = m.A1 + correction
    poles = eigenvalues(a_avg)
    logger.debug("averaged_jacobian: max Re(pole)=%.6g", float(np.max(poles.real)))
    return AveragedJacobian(a_avg=a_avg, poles=poles)
