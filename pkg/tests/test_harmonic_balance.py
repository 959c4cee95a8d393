import math

import pytest

from acc.analysis.harmonic_balance import (
    K_STAR,
    critical_voltage_exact,
    critical_voltage_simplified,
    duty_to_current,
    loop_gain,
    phi,
    predict,
    theorem1_predict,
    vs_min,
)
from acc.errors import DomainError
from acc.presets import preset_params


def test_phi_minimizer():
    assert K_STAR == pytest.approx(0.384, abs=0.005)
    k2 = K_STAR * K_STAR
    assert 3 * k2 * k2 + 1.25 * k2 - 0.25 == pytest.approx(0.0, abs=1e-14)
    assert phi(K_STAR) < phi(K_STAR * 0.99)
    assert phi(K_STAR) < phi(K_STAR * 1.01)


def test_phi_structure():
    assert phi(1.0) / phi(0.5) == 2.0
    assert 2.0 / 3.0 * phi(K_STAR) == pytest.approx(0.79, abs=0.005)
    with pytest.raises(DomainError):
        phi(0.0)


def test_vs_min_examples():
    assert vs_min(preset_params("example1")) == pytest.approx(8.57, rel=0.01)
    assert vs_min(preset_params("example6")) == pytest.approx(35.86, rel=0.01)


def test_theorem1_verdicts():
    verdict, interval = theorem1_predict(preset_params("example1"))
    assert verdict == "unstable_range_exists"
    lo, hi = interval
    assert lo < K_STAR < hi

    p = preset_params("example1")
    assert critical_voltage_simplified(p, lo) == pytest.approx(p.v_s, rel=1e-9)
    assert critical_voltage_simplified(p, hi) == pytest.approx(p.v_s, rel=1e-9)

    verdict, interval = theorem1_predict(preset_params("example6"))
    assert verdict == "pole_insensitive"
    assert interval is None


@pytest.mark.parametrize("k", [0.3, 0.38, 0.5])
def test_exact_and_simplified_thresholds_agree(k):
    p = preset_params("example1", k=k)
    # high-frequency regime assumed by the simplification
    assert p.omega_s / max(1 / math.sqrt(p.L * p.C), 1 / (p.R * p.C)) > 40
    exact = critical_voltage_exact(p)
    assert exact is not None
    assert exact == pytest.approx(critical_voltage_simplified(p), rel=0.2)


def test_loop_gain_split_factors():
    p = preset_params("example1")
    s = 0.5j * p.omega_s
    hc = p.K_c * p.omega_p * (s + p.omega_z) / (p.omega_z * (s * s + p.omega_p * s))
    g1 = (p.R * p.C * s + 1) / (p.R * p.L * p.C * s * s + p.L * s + p.R)
    assert duty_to_current(p, s) == pytest.approx(g1, rel=1e-12)
    assert loop_gain(p, s) == pytest.approx(p.R_s * hc * g1, rel=1e-12)


def test_predict_bundle():
    pred = predict(preset_params("example1"))
    assert pred.k == pytest.approx(0.21)
    assert pred.phi_value == pytest.approx(phi(0.21))
    assert pred.vs_min == pytest.approx(8.585, abs=0.01)
    assert pred.verdict == "unstable_range_exists"
    assert pred.unstable_k_interval is not None
