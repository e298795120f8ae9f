"""Nonlinearities, their dispersion-conjugated forms, and the time averages.

The oscillatory forms conjugate a plain nonlinearity by a dispersion group,
B(tau, w) = G(-tau) B(G(tau) w), which is what a rotating frame sees.  Their
closed-form time averages over tau in [0, 2*pi] keep only the resonant
triads; the quadrature route integrates the oscillatory form directly and
exists so the closed forms never have to be trusted on their own.
"""

from __future__ import annotations

import enum

import numpy as np

from .field import (SpectralField, coeffs_to_grid, dealiased_product,
                    derivative, derivative_array, grid_to_coeffs,
                    mode_numbers, padded_grid_size, reflect)
from .groups import (GroupKind, _two_prod, phase_exponent,
                     reduce_mod_two_pi)

_TWO_PI = 2.0 * np.pi
_CHUNK = 2048


def gl_cubic(u: SpectralField) -> SpectralField:
    """Alias-free truncation of u |u|^2."""
    return dealiased_product([u, u, u], [False, False, True])


def burgers_term(u: SpectralField) -> SpectralField:
    """Alias-free truncation of u u_x, computed as (u^2)_x / 2.

    The derivative form gives the same truncated convolution mode for mode
    and makes the zero mode vanish exactly, not just to rounding.
    """
    sq = dealiased_product([u, u], [False, False])
    out = derivative(sq.scaled(0.5), 1)
    return SpectralField(out.coeffs, u.truncation, u.reality_flag,
                         zero_mean_flag=True)


class OscillatoryKind(enum.Enum):
    CUBIC_AIRY = "cubic-airy"
    CUBIC_SCHRODINGER = "cubic-schrodinger"
    BURGERS_AIRY = "burgers-airy"

    @property
    def group(self) -> GroupKind:
        if self is OscillatoryKind.CUBIC_SCHRODINGER:
            return GroupKind.SCHRODINGER
        return GroupKind.AIRY


def oscillatory_phases(kind: OscillatoryKind, taus: np.ndarray,
                       truncation: int) -> np.ndarray:
    """Forward group phases e^{-i phi(n) tau}, one row per tau.

    Same double-double reduction as the group module, so one-shot and
    batched evaluations agree bit for bit.
    """
    phi = phase_exponent(kind.group, truncation)
    p, e = _two_prod(np.asarray(taus, dtype=float)[:, None], phi[None, :])
    return np.exp(-1j * reduce_mod_two_pi(p, e))


def oscillatory_apply(kind: OscillatoryKind, fwd: np.ndarray,
                      coeffs: np.ndarray) -> np.ndarray:
    """Conjugated nonlinearity given precomputed forward phases.

    ``fwd`` must broadcast against ``coeffs`` along the mode axis, which
    covers both a batch of taus on one field and one tau on a batch of
    fields.
    """
    truncation = (coeffs.shape[-1] - 1) // 2
    v = fwd * coeffs
    u = coeffs_to_grid(v, padded_grid_size(truncation))
    if kind is OscillatoryKind.BURGERS_AIRY:
        prod = derivative_array(grid_to_coeffs(u * u, truncation), 1) * 0.5
    else:
        prod = grid_to_coeffs(u * u * np.conj(u), truncation)
    return np.conj(fwd) * prod


def oscillatory_eval_array(kind: OscillatoryKind, tau: float,
                           coeffs: np.ndarray) -> np.ndarray:
    """Single tau, arbitrary batch of coefficient rows."""
    truncation = (coeffs.shape[-1] - 1) // 2
    fwd = oscillatory_phases(kind, np.array([float(tau)]), truncation)[0]
    return oscillatory_apply(kind, fwd, coeffs)


def oscillatory_eval(kind: OscillatoryKind, tau: float,
                     w: SpectralField) -> SpectralField:
    """G(-tau) applied to the plain nonlinearity of G(tau) w."""
    out = oscillatory_eval_array(kind, tau, w.coeffs)
    real = w.reality_flag and kind.group is GroupKind.AIRY
    zero_mean = kind is OscillatoryKind.BURGERS_AIRY
    return SpectralField(out, w.truncation, real, zero_mean)


def quadrature_points_required(kind: OscillatoryKind, truncation: int) -> int:
    """Conservative bound on the integrand's tau-frequency content."""
    if kind is OscillatoryKind.CUBIC_SCHRODINGER:
        return 2 * (3 * truncation) ** 2
    return 2 * (3 * truncation) ** 3


def quadrature_average(kind: OscillatoryKind, w: SpectralField,
                       points: int) -> SpectralField:
    """Trapezoid average of the oscillatory form over one tau period.

    The integrand is a trigonometric polynomial in tau, so uniform sampling
    is exact once ``points`` exceeds its maximal frequency; below that the
    call refuses rather than return a silently degraded average.
    """
    required = quadrature_points_required(kind, w.truncation)
    if points <= required:
        raise ValueError(
            f"inexact quadrature: {points} points cannot resolve tau "
            f"frequencies up to {required} at truncation {w.truncation}")
    taus = _TWO_PI * np.arange(points) / points
    acc = np.zeros_like(w.coeffs)
    comp = np.zeros_like(w.coeffs)
    for start in range(0, points, _CHUNK):
        fwd = oscillatory_phases(kind, taus[start:start + _CHUNK], w.truncation)
        block = oscillatory_apply(kind, fwd, w.coeffs[None, :])
        term = block.sum(axis=0) - comp
        total = acc + term
        comp = (total - acc) - term
        acc = total
    out = acc / points
    real = w.reality_flag and kind.group is GroupKind.AIRY
    zero_mean = kind is OscillatoryKind.BURGERS_AIRY
    return SpectralField(out, w.truncation, real, zero_mean)


# -- closed-form averages ---------------------------------------------


def averaged_n_array(coeffs: np.ndarray) -> np.ndarray:
    truncation = (coeffs.shape[-1] - 1) // 2
    amp2 = np.abs(coeffs) ** 2
    nsq = np.sum(amp2, axis=-1, keepdims=True)
    pw = np.sum(coeffs * reflect(coeffs), axis=-1, keepdims=True)
    out = coeffs * (2.0 * nsq - amp2 - 2.0 * reflect(amp2)) \
        + np.conj(reflect(coeffs)) * pw
    w0 = coeffs[..., truncation]
    out[..., truncation] = 2.0 * w0 * (nsq[..., 0] - amp2[..., truncation]) \
        + np.conj(w0) * pw[..., 0]
    return out


def averaged_n(w: SpectralField) -> SpectralField:
    """Resonant average of the cubic under the Airy group.

    Mode-separated form: the zero mode gets 2 w_0 (|w|^2 - |w_0|^2)
    + conj(w_0) [w, w], every other mode
    w_n (2 |w|^2 - |w_n|^2 - 2 |w_{-n}|^2) + conj(w_{-n}) [w, w],
    with the pairing [w, w] = sum_n w_n w_{-n}.
    """
    return SpectralField(averaged_n_array(w.coeffs), w.truncation,
                         w.reality_flag, w.zero_mean_flag)


def averaged_m_array(coeffs: np.ndarray) -> np.ndarray:
    amp2 = np.abs(coeffs) ** 2
    nsq = np.sum(amp2, axis=-1, keepdims=True)
    return coeffs * (2.0 * nsq - amp2)


def averaged_m(w: SpectralField) -> SpectralField:
    """Resonant average of the cubic under the Schrodinger group:
    mode n maps to w_n (2 |w|^2 - |w_n|^2)."""
    return SpectralField(averaged_m_array(w.coeffs), w.truncation,
                         w.reality_flag, w.zero_mean_flag)


def averaged_k(w: SpectralField) -> SpectralField:
    """Resonant average of the advection term under the Airy group:
    w_0 w_x plus the (identically cancelling) resonant sum on the zero
    mode.  Vanishes for real zero-mean fields."""
    n = mode_numbers(w.truncation).astype(float)
    out = w.mode(0) * derivative_array(w.coeffs, 1)
    out[w.truncation] += np.sum(1j * n * w.coeffs * reflect(w.coeffs))
    return SpectralField(out, w.truncation)
