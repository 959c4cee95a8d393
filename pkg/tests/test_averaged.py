from dataclasses import replace

import numpy as np
import pytest

from acc.analysis.averaged import averaged_jacobian
from acc.errors import UnsupportedTopologyError

from conftest import example1


def test_averaged_matrix_entries(ex1_params, ex1_model):
    avg = averaged_jacobian(ex1_model, ex1_params.u)
    p = ex1_params
    gain = p.v_s / (p.L * (p.V_h - p.V_l))
    assert avg.a_avg[0, 2] == pytest.approx(gain * p.K_c)
    assert avg.a_avg[0, 3] == pytest.approx(gain * p.K_c / p.omega_z)
    np.testing.assert_array_equal(avg.a_avg[1:], ex1_model.A1[1:])
    assert len(avg.poles) == 4


def test_example1_poles_stay_in_left_half_plane():
    for k in np.linspace(0.14, 0.81, 68):
        p, m = example1(float(k))
        assert averaged_jacobian(m, p.u).max_real_part < 0, f"k={k}"


def test_example6_right_half_plane_pair(ex6_params, ex6_model):
    poles = averaged_jacobian(ex6_model, ex6_params.u).poles
    rhp = poles[poles.real > 0]
    assert len(rhp) == 2
    assert np.all(np.abs(rhp.imag) > 0)
    assert rhp[0] == pytest.approx(np.conj(rhp[1]))


def test_requires_shared_stage_matrix(ex1_params, ex1_model):
    other = replace(ex1_model, A2=ex1_model.A1 * 1.01)
    with pytest.raises(UnsupportedTopologyError):
        averaged_jacobian(other, ex1_params.u)
