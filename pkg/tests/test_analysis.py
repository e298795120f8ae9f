"""Experiment drivers: equilibria, rate fits, scans, waves, exponents."""

import itertools
import math

import numpy as np
import pytest

from displab import (Family, Frame, ModelSpec, SimConfig,
                     attractor_norm_scan, averaging_rate_experiment,
                     dissipative_envelope_constant, enumerate_equilibria,
                     find_ode3_equilibrium, gradient_convergence_experiment,
                     gronwall_envelope_constant, hd_invariance_check,
                     integrate, largest_lyapunov_exponent,
                     linearization_spectrum, lyapunov_value, norm_envelope,
                     ode3_jacobian, smooth_profile, traveling_wave,
                     wave_continuation, worker_count)
from displab.analysis import member_rng, residual_reduced
from displab.field import derivative, hs_norm_array, mode_numbers
from displab.models import rhs_ode3_array, rhs_rescaled_kdv


# -- equilibrium enumeration against a brute-force oracle ---------------


def _stationary_moduli(alpha: float, support: tuple[int, ...]) -> np.ndarray:
    """Solve the literal per-mode stationarity system for the squared
    moduli on a support: m_n - 2 sum_k m_k = n^2 - alpha."""
    k = len(support)
    mat = np.eye(k) - 2.0 * np.ones((k, k))
    rhs = np.array([n * n - alpha for n in support], dtype=float)
    return np.linalg.solve(mat, rhs)


@pytest.mark.parametrize("alpha,D", [(1.5, 2), (6.5, 3)])
def test_equilibria_match_subset_oracle(alpha, D):
    records = {rec.support: rec for rec in enumerate_equilibria(alpha, D)}
    modes = range(-D, D + 1)
    expected = {()}
    for size in range(1, 2 * D + 2):
        for support in itertools.combinations(modes, size):
            m = _stationary_moduli(alpha, support)
            if np.all(m > 1e-9):
                expected.add(support)
                rec = records.get(support)
                assert rec is not None, f"missing support {support}"
                got = np.array([rec.moduli_sq[n] for n in support])
                np.testing.assert_allclose(got, m, rtol=1e-12)
                assert rec.norm_sq == pytest.approx(float(np.sum(m)),
                                                    rel=1e-12)
    assert set(records) == expected


def test_equilibria_frozen_values_alpha_three_halves():
    records = enumerate_equilibria(1.5, 2)
    by_support = {rec.support: rec for rec in records}
    assert set(by_support) == {(), (0,), (-1,), (1,), (-1, 1)}
    assert by_support[(0,)].norm_sq == pytest.approx(1.5, abs=1e-14)
    assert by_support[(0,)].moduli_sq[0] == pytest.approx(1.5, abs=1e-14)
    assert by_support[(1,)].norm_sq == pytest.approx(0.5, abs=1e-14)
    assert by_support[(-1, 1)].norm_sq == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert by_support[(-1, 1)].moduli_sq[1] == pytest.approx(1.0 / 6.0,
                                                             abs=1e-14)
    # the single pure mode inside the instability range is the only sink
    assert by_support[(0,)].stable
    for support in ((), (-1,), (1,), (-1, 1)):
        assert not by_support[support].stable
    for rec in records:
        assert rec.hyperbolic
        assert residual_reduced(rec, 1.5) < 1e-12


def test_zero_state_cases():
    only = enumerate_equilibria(-1.0, 2)
    assert len(only) == 1
    assert only[0].support == ()
    assert only[0].stable and only[0].hyperbolic
    # alpha on a squared integer makes the zero state non-hyperbolic
    degenerate = enumerate_equilibria(4.0, 2)
    zero = [r for r in degenerate if r.support == ()][0]
    assert not zero.hyperbolic


def test_enumeration_refuses_huge_truncation():
    with pytest.raises(ValueError):
        enumerate_equilibria(1.0, 13)


def test_linearization_spectrum_frozen_and_fd_oracle():
    records = {r.support: r for r in enumerate_equilibria(1.5, 2)}
    # pure zeroth mode: one contracted amplitude direction, the rest diag
    eig = linearization_spectrum(records[(0,)], 1.5, 2)
    np.testing.assert_allclose(np.sort(eig), [-5.5, -5.5, -3.0, -2.5, -2.5],
                               atol=1e-12)

    def real_rhs(alpha, v):
        n = mode_numbers(2).astype(float)
        return (-n ** 2 + alpha) * v - 2.0 * v * np.sum(v ** 2) + v ** 3

    for support in ((0,), (1,), (-1, 1)):
        rec = records[support]
        v = rec.modulus_vector(2)
        dim = v.size
        jac = np.empty((dim, dim))
        delta = 1e-6
        for col in range(dim):
            e = np.zeros(dim)
            e[col] = delta
            jac[:, col] = (real_rhs(1.5, v + e) - real_rhs(1.5, v - e)) \
                / (2.0 * delta)
        fd_eig = np.linalg.eigvalsh(0.5 * (jac + jac.T))
        np.testing.assert_allclose(np.sort(linearization_spectrum(rec, 1.5, 2)),
                                   np.sort(fd_eig), atol=1e-7)


def test_stability_flag_agrees_with_spectrum():
    for alpha, D in ((1.5, 2), (6.5, 3)):
        for rec in enumerate_equilibria(alpha, D):
            top = float(np.max(linearization_spectrum(rec, alpha, D)))
            assert rec.stable == (top < -1e-9)


# -- deterministic smooth data -----------------------------------------


def test_smooth_profile_moduli_and_determinism():
    w = smooth_profile(4, amplitude=0.5, decay=0.35)
    again = smooth_profile(4, amplitude=0.5, decay=0.35)
    np.testing.assert_array_equal(w.coeffs, again.coeffs)
    n = mode_numbers(4)
    np.testing.assert_allclose(np.abs(w.coeffs),
                               0.5 * np.exp(-0.35 * np.abs(n)), rtol=1e-14)
    assert not np.array_equal(w.coeffs, smooth_profile(4, seed=8).coeffs)


def test_smooth_profile_symmetry_flags():
    u = smooth_profile(4, real=True, zero_mean=True)
    assert u.reality_flag and u.zero_mean_flag
    np.testing.assert_allclose(u.coeffs, np.conj(u.coeffs[::-1]), rtol=1e-15)
    assert u.coeffs[4] == 0.0


# -- averaging-rate experiment -----------------------------------------


def test_rate_experiment_linear_runs_coincide():
    # with the nonlinearity off, rotating and averaged models share the
    # symbol and the step sequence, so every distance is exactly zero
    w0 = smooth_profile(3, amplitude=0.5)
    out = averaging_rate_experiment(Family.GL2, 0.8 + 0.2j, 0.0, 0.6, w0,
                                    0.5, [20.0, 40.0], nonlin_scale=0.0)
    assert [r[2] for r in out.rows] == [0.0, 0.0]
    assert math.isnan(out.slope)


def test_rate_experiment_distance_shrinks_with_dispersion():
    w0 = smooth_profile(2, amplitude=0.4)
    out = averaging_rate_experiment(Family.GL2, 0.8 + 0.2j, 0.0, 0.6, w0,
                                    0.5, [20.0, 40.0, 80.0], resolve=2)
    errs = [r[2] for r in out.rows]
    assert errs[0] > errs[1] > errs[2] > 0.0
    assert errs[0] / errs[2] > 2.0
    assert out.rows[0][1] == pytest.approx(0.05)


def test_rate_experiment_advective_family():
    u0 = smooth_profile(3, amplitude=0.8, real=True, zero_mean=True)
    out = averaging_rate_experiment(Family.KS, 0.0, 0.0, 0.0, u0, 0.5,
                                    [20.0, 40.0, 80.0], a=2.0)
    errs = [r[2] for r in out.rows]
    assert errs[0] > errs[1] > errs[2] > 0.0


# -- attractor scan -----------------------------------------------------


def _gl2_averaged(L):
    return ModelSpec.gl2(Frame.AVERAGED, beta=1.0 + 0j, omega=0.3, L=L)


def test_attractor_scan_shapes_and_determinism():
    out = attractor_norm_scan(_gl2_averaged, [5.0, 10.0], ensemble_size=3,
                              T=4.0, burn_in=2.0, truncation=4,
                              h_for_l=lambda L: 0.05, seed=9)
    assert len(out.rows) == 6
    assert out.blowups == []
    assert set(out.per_l_max) == {5.0, 10.0}
    for stat in out.per_l_max.values():
        assert 0.0 < stat < 2.0
    times, norms = out.series[5.0]
    assert norms.shape[0] == 3 and norms.shape[1] == len(times)
    again = attractor_norm_scan(_gl2_averaged, [5.0, 10.0], ensemble_size=3,
                                T=4.0, burn_in=2.0, truncation=4,
                                h_for_l=lambda L: 0.05, seed=9)
    assert again.rows == out.rows
    other = attractor_norm_scan(_gl2_averaged, [5.0, 10.0], ensemble_size=3,
                                T=4.0, burn_in=2.0, truncation=4,
                                h_for_l=lambda L: 0.05, seed=10)
    assert other.rows != out.rows


def test_attractor_scan_records_blowups():
    def explosive(L):
        return ModelSpec.gl2(Frame.PHYSICAL, beta=80.0 + 0j, omega=0.0,
                             L=L, nonlin_scale=0.0)

    out = attractor_norm_scan(explosive, [5.0], ensemble_size=2, T=0.6,
                              burn_in=0.1, truncation=3,
                              h_for_l=lambda L: 0.01, seed=9)
    assert len(out.blowups) == 2
    assert all(math.isnan(row[2]) for row in out.rows)
    assert math.isnan(out.per_l_max[5.0])


# -- envelope fits ------------------------------------------------------


def test_envelope_constants_hand_values():
    times = np.array([0.0, 1.0, 2.0])
    h_norms = np.sqrt(np.array([4.0, 3.0, 5.0]))
    # excess above the decaying start: max(5 - 4 e^{-2}) over L^2 + 1 = 2
    want = (5.0 - 4.0 * math.exp(-2.0)) / 2.0
    assert dissipative_envelope_constant(times, h_norms, 1.0) \
        == pytest.approx(want, rel=1e-12)
    # np.gradient slopes: [-1, 0.5, 2]; max of slope + value is 7
    assert gronwall_envelope_constant(times, h_norms, 1.0) \
        == pytest.approx(3.5, rel=1e-12)


def test_gronwall_constant_dominates_envelope_on_a_run():
    # the differential fit implies the integrated envelope, so the same
    # trajectory can never need a larger envelope constant than its
    # differential one
    model = ModelSpec.ks(Frame.PHYSICAL, a=2.0, L=10.0)
    u0 = smooth_profile(16, amplitude=1.2, real=True, zero_mean=True)
    cfg = SimConfig(truncation=16, h=0.005, horizon=3.0, sample_every=4)
    log = integrate(model, cfg, u0)
    c_diff = gronwall_envelope_constant(log.times, log.h_norm, 10.0)
    c_env = dissipative_envelope_constant(log.times, log.h_norm, 10.0)
    assert c_env <= c_diff * 1.05
    sq = log.h_norm ** 2
    bound = sq[0] * np.exp(-log.times) + c_diff * 101.0
    assert np.all(sq <= bound * 1.05)


def test_norm_envelope_recovers_synthetic_decay():
    t = np.linspace(0.0, 10.0, 201)
    sq = 2.0 + 5.0 * np.exp(-1.3 * t)
    rate, plateau = norm_envelope(t, np.sqrt(sq))
    assert plateau == pytest.approx(2.0, rel=1e-2)
    assert rate == pytest.approx(1.3, rel=2e-2)
    flat_rate, flat_plateau = norm_envelope(t, np.full_like(t, 3.0))
    assert math.isnan(flat_rate)
    assert flat_plateau == pytest.approx(9.0, rel=1e-12)


# -- traveling waves ----------------------------------------------------


def test_traveling_wave_profile_and_dynamics():
    rec = traveling_wave(2.0, 0.25, truncation=24)
    assert rec.residual < 1e-10
    assert rec.profile.reality_flag and rec.profile.zero_mean_flag
    assert abs(rec.profile.mode(1).imag) < 1e-11
    # independent residual route through the full slow-time RHS:
    # a steady wave moving at speed c satisfies rhs = -c d/dx profile
    rhs = rhs_rescaled_kdv(2.0, 0.25, rec.profile)
    drift = derivative(rec.profile, 1).scaled(rec.c)
    mismatch = hs_norm_array(rhs.coeffs + drift.coeffs, 0.0)
    assert mismatch < 1e-9
    # and the evolution really translates it: after time T the modes
    # only pick up the phases e^{-i n c T}
    model = ModelSpec.kdv_rescaled(2.0, 0.25)
    cfg = SimConfig(truncation=24, h=0.001, horizon=0.1)
    log = integrate(model, cfg, rec.profile)
    n = mode_numbers(24)
    shifted = np.exp(-1j * n * rec.c * 0.1) * rec.profile.coeffs
    drift_err = hs_norm_array(log.final - shifted, 0.0)
    assert drift_err < 1e-6 * hs_norm_array(rec.profile.coeffs, 0.0)


def test_wave_continuation_warm_starts():
    records = wave_continuation(2.0, [0.25, 0.2], truncation=24)
    assert len(records) == 2
    assert all(r.residual < 1e-10 for r in records)
    assert records[0].eps == 0.25 and records[1].eps == 0.2
    # neighbouring waves stay close, confirming the warm start tracked
    # the same branch
    gap = hs_norm_array(records[0].profile.coeffs
                        - records[1].profile.coeffs, 0.0)
    assert gap < 0.5 * hs_norm_array(records[0].profile.coeffs, 0.0)


# -- separation-rate estimator -----------------------------------------


def test_lyapunov_estimate_on_linear_benchmark():
    decay = np.array([-1.0, -2.0, 0.5])
    rhs = lambda t, y: decay * y
    got = largest_lyapunov_exponent(rhs, np.array([1.0, 1.0, 1.0]),
                                    T=20.0, h=0.01)
    assert got == pytest.approx(0.5, abs=1e-3)


def test_lyapunov_estimate_needs_a_window():
    rhs = lambda t, y: -y
    with pytest.raises(ValueError):
        largest_lyapunov_exponent(rhs, np.array([1.0]), T=0.1, h=0.01,
                                  renorm_every=50)


def test_polar_equilibrium_solver_and_jacobian():
    eq, res = find_ode3_equilibrium(1.0, -0.5, 0.5,
                                    np.array([1.0, 0.05, 3.6]))
    assert res < 1e-12
    assert eq.r == pytest.approx(1.0, abs=1e-10)
    assert eq.rho == pytest.approx(0.0, abs=1e-10)
    eig = np.sort(np.linalg.eigvals(
        ode3_jacobian(1.0, -0.5, 0.5, eq.as_array())).real)
    np.testing.assert_allclose(eig, [-1.118034, -1.0, -0.881966], atol=1e-5)


def test_ode3_jacobian_matches_complex_step():
    rng = np.random.default_rng(77)
    for _ in range(2):
        y = rng.uniform(0.1, 1.0, size=3)
        got = ode3_jacobian(1.2, 0.4, -0.6, y)
        exact = np.empty((3, 3))
        for col in range(3):
            e = np.zeros(3, dtype=complex)
            e[col] = 1e-30j
            exact[:, col] = rhs_ode3_array(1.2, 0.4, -0.6, y + e).imag / 1e-30
        np.testing.assert_allclose(got, exact, atol=1e-8)


# -- invariant subspace and gradient convergence ------------------------


def test_invariant_subspace_leak_and_decay():
    report = hd_invariance_check(1.2 + 0j, 0.5, 1, 10.0)
    assert report.leak_max == 0.0
    assert report.decayed
    assert set(report.final_moduli) == {-2, -1, 0, 1, 2}


def test_gradient_runs_settle_on_the_sink():
    reports = gradient_convergence_experiment(1.2, 1, 3, 60.0)
    assert len(reports) == 3
    for rep in reports:
        assert rep.nearest_support == (0,)
        assert rep.distance < 1e-5
        assert rep.lyapunov_monotone
        assert rep.max_uptick <= 1e-8
        assert rep.fd_identity_ok


def test_lyapunov_value_matches_direct_formula():
    v = smooth_profile(2, amplitude=0.6)
    amp2 = np.abs(v.coeffs) ** 2
    nsq = float(np.sum(amp2))
    h1 = float(hs_norm_array(v.coeffs, 1.0) ** 2)
    want = h1 + nsq ** 2 - 0.5 * float(np.sum(amp2 ** 2)) - 2.3 * nsq
    assert lyapunov_value(1.3, v) == pytest.approx(want, rel=1e-14)


# -- pools and seeding --------------------------------------------------


def test_worker_count_precedence(monkeypatch):
    monkeypatch.setenv("DISPLAB_THREADS", "3")
    assert worker_count() == 3
    assert worker_count(2) == 2
    monkeypatch.delenv("DISPLAB_THREADS")
    assert worker_count() >= 1


def test_member_rng_streams():
    a = member_rng(5, 1, 2).standard_normal(4)
    b = member_rng(5, 1, 2).standard_normal(4)
    c = member_rng(5, 1, 3).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
