"""Cubic and advective nonlinearities, oscillatory conjugates, averages."""

import numpy as np
import pytest

from displab import (SpectralField, averaged_k, averaged_m, averaged_n,
                     burgers_term, gl_cubic, hs_norm, inner_product,
                     oscillatory_eval, pairing, quadrature_average,
                     random_field)
from displab.nonlinear import (OscillatoryKind, averaged_m_array,
                               averaged_n_array, oscillatory_eval_array,
                               quadrature_points_required)

from conftest import convolution_product, seeded_fields


def test_gl_cubic_on_plane_wave():
    # u = 2 cos x: u|u|^2 keeps 4 cos^3 x = 3 cos x + cos 3x; at N = 1
    # only the 3 cos x part survives truncation.
    u = SpectralField.from_modes(1, {1: 1.0, -1: 1.0}, reality=True)
    out = gl_cubic(u)
    assert out.mode(1) == pytest.approx(3.0, abs=1e-14)
    assert out.mode(-1) == pytest.approx(3.0, abs=1e-14)
    assert out.mode(0) == pytest.approx(0.0, abs=1e-14)


def test_gl_cubic_matches_convolution(rng):
    for w in seeded_fields(3, 4, seed=31):
        got = gl_cubic(w)
        want = convolution_product([w.coeffs] * 3, [False, False, True])
        np.testing.assert_allclose(got.coeffs, want, atol=1e-13)


def test_burgers_term_on_cosine():
    # u = 2 cos x: u u_x = -2 sin 2x, i.e. +i at mode 2 and -i at mode -2.
    u = SpectralField.from_modes(2, {1: 1.0, -1: 1.0}, reality=True,
                                 zero_mean=True)
    out = burgers_term(u)
    assert out.mode(2) == pytest.approx(1.0j, abs=1e-14)
    assert out.mode(-2) == pytest.approx(-1.0j, abs=1e-14)
    assert out.mode(0) == 0.0
    assert out.mode(1) == pytest.approx(0.0, abs=1e-14)


def test_burgers_term_matches_advective_convolution(rng):
    """(u^2)_x / 2 must agree mode for mode with the truncated u u_x."""
    for w in seeded_fields(3, 5, seed=32, reality=True, zero_mean=True):
        ux = w.coeffs * (1j * np.arange(-5, 6))
        want = convolution_product([w.coeffs, ux], [False, False])
        got = burgers_term(w)
        np.testing.assert_allclose(got.coeffs, want, atol=1e-13)
        assert got.coeffs[5] == 0.0  # exact, not just small
        assert got.zero_mean_flag and got.reality_flag


def test_oscillatory_at_tau_zero_is_plain_nonlinearity(rng):
    w = random_field(6, rng)
    cubic = gl_cubic(w)
    for kind in (OscillatoryKind.CUBIC_AIRY, OscillatoryKind.CUBIC_SCHRODINGER):
        out = oscillatory_eval(kind, 0.0, w)
        np.testing.assert_array_equal(out.coeffs, cubic.coeffs)
    wr = random_field(6, rng, reality=True, zero_mean=True)
    out = oscillatory_eval(OscillatoryKind.BURGERS_AIRY, 0.0, wr)
    np.testing.assert_array_equal(out.coeffs, burgers_term(wr).coeffs)


def test_oscillatory_is_group_conjugation(rng):
    """B(tau, w) = G(-tau) B(G(tau) w), spelled out with explicit phases."""
    from displab import GroupKind, apply_group
    w = random_field(5, rng)
    tau = 0.8125
    for kind, plain, group in [
            (OscillatoryKind.CUBIC_AIRY, gl_cubic, GroupKind.AIRY),
            (OscillatoryKind.CUBIC_SCHRODINGER, gl_cubic,
             GroupKind.SCHRODINGER)]:
        got = oscillatory_eval(kind, tau, w)
        want = apply_group(group, 1.0, -tau,
                           plain(apply_group(group, 1.0, tau, w)))
        np.testing.assert_allclose(got.coeffs, want.coeffs, atol=1e-13)


def test_oscillatory_eval_array_matches_field_route(rng):
    batch = np.stack([random_field(4, rng).coeffs for _ in range(3)])
    for kind in OscillatoryKind:
        got = oscillatory_eval_array(kind, 2.375, batch)
        for row in range(3):
            w = SpectralField(batch[row], 4)
            one = oscillatory_eval(kind, 2.375, w)
            np.testing.assert_allclose(got[row], one.coeffs, atol=1e-14)


def test_quadrature_refuses_too_few_points(rng):
    w = random_field(2, rng)
    req = quadrature_points_required(OscillatoryKind.CUBIC_AIRY, 2)
    with pytest.raises(ValueError, match="inexact quadrature"):
        quadrature_average(OscillatoryKind.CUBIC_AIRY, w, req)


@pytest.mark.parametrize("kind,closed", [
    (OscillatoryKind.CUBIC_AIRY, averaged_n),
    (OscillatoryKind.CUBIC_SCHRODINGER, averaged_m),
])
def test_closed_average_matches_quadrature(kind, closed, rng):
    for trunc in (2, 3):
        w = random_field(trunc, rng)
        req = quadrature_points_required(kind, trunc)
        quad = quadrature_average(kind, w, req + 13)
        np.testing.assert_allclose(closed(w).coeffs, quad.coeffs, atol=1e-13)


def test_burgers_average_matches_quadrature(rng):
    w = random_field(3, rng, reality=True, zero_mean=True)
    req = quadrature_points_required(OscillatoryKind.BURGERS_AIRY, 3)
    quad = quadrature_average(OscillatoryKind.BURGERS_AIRY, w, req + 13)
    np.testing.assert_allclose(averaged_k(w).coeffs, quad.coeffs, atol=1e-13)


def test_averaged_m_hand_formula(rng):
    w = random_field(4, rng)
    amp2 = np.abs(w.coeffs) ** 2
    total = float(np.sum(amp2))
    out = averaged_m(w)
    for idx, n in enumerate(range(-4, 5)):
        want = w.coeffs[idx] * (2.0 * total - amp2[idx])
        assert out.mode(n) == pytest.approx(want, rel=1e-13)


def test_averaged_n_two_printed_forms_agree(rng):
    """Mode n != 0 row written with |w|^2 sums versus written with the
    pairing; both appear in the derivation and must be identical."""
    w = random_field(5, rng)
    c = w.coeffs
    amp2 = np.abs(c) ** 2
    total = float(np.sum(amp2))
    pw = complex(np.sum(c * c[::-1]))
    out = averaged_n_array(c)
    for idx, n in enumerate(range(-5, 6)):
        if n == 0:
            want = 2.0 * c[idx] * (total - amp2[idx]) + np.conj(c[idx]) * pw
        else:
            want = c[idx] * (2.0 * total - amp2[idx] - 2.0 * amp2[-1 - idx]) \
                + np.conj(c[-1 - idx]) * pw
        assert out[idx] == pytest.approx(want, rel=1e-13)


def test_averaged_k_vanishes_on_real_zero_mean(rng):
    for w in seeded_fields(5, 6, seed=33, reality=True, zero_mean=True):
        out = averaged_k(w)
        assert np.max(np.abs(out.coeffs)) <= 1e-12


def test_averaged_k_nonzero_with_mean_mode():
    w = SpectralField.from_modes(2, {0: 2.0, 1: 1.0, -1: 1.0}, reality=True)
    out = averaged_k(w)
    # w_0 w_x contributes 2 * (i n) w_n on modes +-1
    assert out.mode(1) == pytest.approx(2.0j, abs=1e-14)
    assert out.mode(-1) == pytest.approx(-2.0j, abs=1e-14)


def test_cubic_average_dissipativity(rng):
    """Re (N(w), w) >= |w|^4 with an exactly nonnegative defect, and the
    imaginary part at rounding level; same for the second-family average."""
    for k, w in enumerate(seeded_fields(100, 6, seed=34)):
        nsq = hs_norm(w, 0.0) ** 2
        for closed in (averaged_n, averaged_m):
            ip = inner_product(closed(w), w)
            assert ip.real >= nsq * nsq - 1e-12 * max(1.0, nsq * nsq)
            assert abs(ip.imag) <= 1e-12 * max(1.0, nsq * nsq)


def test_averaged_n_reality_closure(rng):
    w = random_field(4, rng, reality=True)
    out = averaged_n(w)
    assert out.reality_flag
    np.testing.assert_allclose(out.coeffs[::-1], np.conj(out.coeffs),
                               atol=1e-13)
