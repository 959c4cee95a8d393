from dataclasses import replace

import numpy as np
import pytest

from acc.analysis.sampled_data import (
    bode_table,
    classify_eigenvalues,
    classify_stability,
    frequency_response,
    linearize,
    monodromy_matrix_form,
    spectral_radius,
    transfer_response,
)
from acc.analysis.steady_state import cycle_average, find_periodic_orbit
from acc.circuit.converter import build_buck_model
from acc.circuit.simulator import CycleStepper
from acc.errors import AccError, PoleError, RangeError
from acc.presets import preset_params

from conftest import example1

FD_REL_STEP = 1e-5


def cycle_map(model, x, u):
    result, _ = CycleStepper(model, u).advance(x)
    return result


def fd_jacobians(model, x0, u):
    """Central differences of x_n -> x_{n+1} in state-scaled coordinates."""
    s = model.state_scales
    n = model.n
    phi = np.empty((n, n))
    for j in range(n):
        h = FD_REL_STEP * s[j]
        e = np.zeros(n)
        e[j] = h
        plus = cycle_map(model, x0 + e, u).x_end
        minus = cycle_map(model, x0 - e, u).x_end
        phi[:, j] = (plus - minus) / (2.0 * h) * s[j] / s
    gammas = []
    for k in range(2):
        h = FD_REL_STEP * abs(u[k])
        e = np.zeros(2)
        e[k] = h
        plus = cycle_map(model, x0, u + e).x_end
        minus = cycle_map(model, x0, u - e).x_end
        gammas.append((plus - minus) / (2.0 * h) * abs(u[k]) / s)
    return phi, gammas


def assert_scaled_close(actual, expected):
    floor = 1e-5 * max(1.0, float(np.max(np.abs(expected))))
    np.testing.assert_allclose(actual, expected, rtol=1e-5, atol=floor)


def check_jacobian(p):
    model = build_buck_model(p)
    orbit = find_periodic_orbit(model, p.u)
    if cycle_map(model, orbit.x_start, p.u).crossing_count != 1:
        return False
    lin = linearize(model, orbit)
    s = model.state_scales
    phi_fd, (g1_fd, g2_fd) = fd_jacobians(model, orbit.x_start, p.u)
    assert_scaled_close(lin.phi * s[None, :] / s[:, None], phi_fd)
    assert_scaled_close(lin.gamma1 * abs(p.v_s) / s, g1_fd)
    assert_scaled_close(lin.gamma2 * abs(p.v_r) / s, g2_fd)
    return True


@pytest.mark.parametrize("k", [0.14, 0.21, 0.49, 0.81])
def test_jacobian_oracle_example1(k):
    p, _ = example1(k)
    assert check_jacobian(p)


def test_jacobian_oracle_randomized():
    rng = np.random.default_rng(2024)
    checked = 0
    for name in ("example1", "example6"):
        base = preset_params(name)
        for _ in range(8):
            f = rng.uniform(0.8, 1.2, size=7)
            p = replace(
                base,
                v_s=base.v_s * f[0], L=base.L * f[1], C=base.C * f[2], R=base.R * f[3],
                R_s=base.R_s * f[4], K_c=base.K_c * f[5], omega_z=base.omega_z * f[6],
            )
            p = replace(p, v_set=p.R * p.v_r / p.R_s)
            try:
                ok = check_jacobian(p)
            except AccError:
                continue
            checked += ok
    assert checked >= 10


def test_matrix_form_agrees(ex1_model, ex1_orbit):
    lin = linearize(ex1_model, ex1_orbit)
    np.testing.assert_allclose(monodromy_matrix_form(ex1_model, ex1_orbit), lin.phi, rtol=1e-10, atol=1e-12 * np.abs(lin.phi).max())


def test_two_period_linearization_composes(ex1_049):
    p, m = ex1_049
    orbit = find_periodic_orbit(m, p.u, 2)
    lin = linearize(m, orbit)
    composed = monodromy_matrix_form(m, orbit, 1) @ monodromy_matrix_form(m, orbit, 0)
    np.testing.assert_allclose(lin.phi, composed, rtol=1e-9, atol=1e-12 * np.abs(composed).max())


def test_pole_sweep_classes():
    p, m = example1(0.14)
    assert classify_stability(linearize(m, find_periodic_orbit(m, p.u))).kind == "stable"

    p, m = example1(0.21)
    verdict = classify_stability(linearize(m, find_periodic_orbit(m, p.u)))
    assert verdict.kind == "period_doubling"
    assert verdict.dominant.real < -1.0


def test_neimark_example6(ex6_model, ex6_orbit):
    lin = linearize(ex6_model, ex6_orbit)
    verdict = classify_stability(lin)
    assert verdict.kind == "neimark"
    outside = lin.eigs[np.abs(lin.eigs) > 1.0]
    assert np.all(np.abs(outside.imag) > 0)
    assert not np.any((lin.eigs.real < -1.0) & (np.abs(lin.eigs.imag) < 1e-9))


def test_classify_eigenvalues_synthetic():
    assert classify_eigenvalues([0.5, 0.2j, -0.2j]).kind == "stable"
    assert classify_eigenvalues([0.5, -1.2]).kind == "period_doubling"
    assert classify_eigenvalues([1.1, 0.3]).kind == "real_unstable"
    v = classify_eigenvalues([0.9 + 0.6j, 0.9 - 0.6j])
    assert v.kind == "neimark"
    assert v.dominant.imag > 0
    marginal = classify_eigenvalues([-1.0, 0.1])
    assert marginal.kind == "period_doubling"
    assert marginal.marginal


def test_spectral_radius(ex1_model, ex1_orbit):
    lin = linearize(ex1_model, ex1_orbit)
    assert spectral_radius(lin) == pytest.approx(classify_stability(lin).max_magnitude)


def test_dc_gains_match_steady_state_sensitivity():
    p, m = example1(0.14)
    lin = linearize(m, find_periodic_orbit(m, p.u))
    toc = transfer_response(lin, m, "control_to_output", 1.0)
    tos = transfer_response(lin, m, "audio", 1.0)
    assert abs(toc.imag) < 1e-9 * abs(toc)

    def mean_vo(v_s, v_r):
        q = replace(p, v_s=v_s, v_r=v_r)
        mq = build_buck_model(q)
        return cycle_average(mq, find_periodic_orbit(mq, q.u), mq.E)

    dv_r = 1e-4 * p.v_r
    fd_oc = (mean_vo(p.v_s, p.v_r + dv_r) - mean_vo(p.v_s, p.v_r - dv_r)) / (2 * dv_r)
    assert toc.real == pytest.approx(fd_oc, rel=0.02)
    assert toc.real == pytest.approx(p.R / p.R_s, rel=0.02)

    dv_s = 1e-4 * p.v_s
    fd_os = (mean_vo(p.v_s + dv_s, p.v_r) - mean_vo(p.v_s - dv_s, p.v_r)) / (2 * dv_s)
    # the integrator removes the DC audio gain, so compare on the T_oc scale
    assert abs(tos.real - fd_os) <= 0.02 * abs(toc.real)


def test_audio_dc_gain_matches_stroboscopic_sensitivity():
    p, m = example1(0.14)
    lin = linearize(m, find_periodic_orbit(m, p.u))
    tos = transfer_response(lin, m, "audio", 1.0)

    def strobe_vo(v_s):
        q = replace(p, v_s=v_s)
        mq = build_buck_model(q)
        return float(mq.E @ find_periodic_orbit(mq, q.u).x_start)

    dv_s = 1e-4 * p.v_s
    fd = (strobe_vo(p.v_s + dv_s) - strobe_vo(p.v_s - dv_s)) / (2 * dv_s)
    assert tos.real == pytest.approx(fd, rel=1e-3, abs=1e-5)


def test_frequency_response_range(ex1_params, ex1_model, ex1_orbit):
    lin = linearize(ex1_model, ex1_orbit)
    nyquist = np.pi / ex1_params.T
    values = frequency_response(lin, ex1_model, "control_to_output", [0.01 * nyquist, 0.5 * nyquist])
    assert values.shape == (2,)
    with pytest.raises(RangeError):
        frequency_response(lin, ex1_model, "control_to_output", [nyquist])
    # conjugate symmetry in omega
    pos = frequency_response(lin, ex1_model, "audio", [0.1 * nyquist])[0]
    neg = frequency_response(lin, ex1_model, "audio", [-0.1 * nyquist])[0]
    assert neg == pytest.approx(np.conj(pos), rel=1e-10)


def test_transfer_at_eigenvalue_raises(ex1_model, ex1_orbit):
    lin = linearize(ex1_model, ex1_orbit)
    with pytest.raises(PoleError):
        transfer_response(lin, ex1_model, "control_to_output", lin.eigs[0])


def test_control_to_current_dc_gain():
    p, m = example1(0.14)
    lin = linearize(m, find_periodic_orbit(m, p.u))
    tic = transfer_response(lin, m, "control_to_current", 1.0)

    def strobe_il(v_r):
        q = replace(p, v_r=v_r)
        mq = build_buck_model(q)
        return float(find_periodic_orbit(mq, q.u).x_start[0])

    dv_r = 1e-4 * p.v_r
    fd = (strobe_il(p.v_r + dv_r) - strobe_il(p.v_r - dv_r)) / (2 * dv_r)
    assert tic.real == pytest.approx(fd, rel=1e-3)
    # sampled at the current valley, so close to but below 1 / R_s
    assert 0.8 / p.R_s < tic.real < 1.0 / p.R_s


def test_bode_table():
    mag, phase = bode_table([10.0, 1j, -1.0])
    np.testing.assert_allclose(mag, [20.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(phase, [0.0, 90.0, 180.0], atol=1e-9)


@pytest.mark.parametrize("k", [0.14, 0.21])
def test_classification_invariant_under_conjugation(k):
    p, m = example1(k)
    eigs = linearize(m, find_periodic_orbit(m, p.u)).eigs
    a = classify_eigenvalues(eigs)
    b = classify_eigenvalues(np.conj(eigs))
    assert (a.kind, a.marginal) == (b.kind, b.marginal)
    assert a.max_magnitude == pytest.approx(b.max_magnitude)
    assert a.dominant == pytest.approx(b.dominant)


def test_neimark_classification_invariant_under_conjugation(ex6_model, ex6_orbit):
    eigs = linearize(ex6_model, ex6_orbit).eigs
    a = classify_eigenvalues(eigs)
    b = classify_eigenvalues(np.conj(eigs)[::-1])
    assert a.kind == b.kind == "neimark"
    assert a.dominant == pytest.approx(b.dominant)


@pytest.mark.parametrize("k, kind", [(0.17, "stable"), (0.18, "period_doubling"), (0.19, "period_doubling")])
def test_verdicts_around_loss_of_stability(k, kind):
    p, m = example1(k)
    assert classify_stability(linearize(m, find_periodic_orbit(m, p.u))).kind == kind
