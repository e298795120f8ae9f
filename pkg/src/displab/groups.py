"""Diagonal dispersion groups: Airy e^{-iLn^3 t} and Schrodinger e^{-iLn^2 t}.

Both act mode-wise as unit-modulus phases, so they are isometries of every
H^s and are 2*pi/L-periodic in time.  The only numerical subtlety is the
phase argument: L can reach 1e4 and n^3 a few 1e5, so L*phi(n)*t overflows
the 53-bit mantissa long before the phase itself loses meaning.  Phases are
therefore assembled in double-double arithmetic and reduced modulo 2*pi
with fmod (which is exact) before any trig call.
"""

from __future__ import annotations

import enum

import numpy as np

from .field import SpectralField, mode_numbers

_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16  # 2*pi - _TWO_PI_HI, to double-double
_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


class GroupKind(enum.Enum):
    AIRY = "airy"
    SCHRODINGER = "schrodinger"


def _two_prod(a, b):
    """Exact product a*b = p + e in double-double (Dekker)."""
    p = a * b
    a_hi = a * _SPLIT
    a_hi = a_hi - (a_hi - a)
    a_lo = a - a_hi
    b_hi = b * _SPLIT
    b_hi = b_hi - (b_hi - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def reduce_mod_two_pi(hi, lo):
    """hi + lo reduced modulo the real 2*pi, to ~1e-15 absolute.

    fmod against the rounded 2*pi is exact but reduces modulo the wrong
    period; each subtracted multiple leaves the 2.45e-16 tail behind, which
    matters once ~1e9 periods are folded away.  So the multiple count is
    recovered and its accumulated tail subtracted back out.
    """
    r = np.fmod(hi, _TWO_PI_HI)
    m = np.round((hi - r) / _TWO_PI_HI)
    return r - m * _TWO_PI_LO + lo


def reduced_phase(scale: float, factors: np.ndarray) -> np.ndarray:
    """scale * factors reduced modulo 2*pi, with compensated products.

    ``factors`` are exact doubles (integer powers of wavenumbers).  The
    product is formed as a double-double so the reduced phase keeps full
    double accuracy even when the raw product is ~1e12.
    """
    p, e = _two_prod(scale, np.asarray(factors, dtype=float))
    return reduce_mod_two_pi(p, e)


def phase_exponent(kind: GroupKind, truncation: int) -> np.ndarray:
    """phi(n) per mode: n^3 for Airy, n^2 for Schrodinger."""
    n = mode_numbers(truncation).astype(float)
    if kind is GroupKind.AIRY:
        return n ** 3
    return n ** 2


def group_phases(kind: GroupKind, L: float, t: float, truncation: int) -> np.ndarray:
    """Unit phases e^{-i L phi(n) t} for all stored modes."""
    lt_hi, lt_lo = _two_prod(float(L), float(t))
    phi = phase_exponent(kind, truncation)
    p, e = _two_prod(lt_hi, phi)
    theta = reduce_mod_two_pi(p, e + lt_lo * phi)
    return np.exp(-1j * theta)


def apply_group_array(kind: GroupKind, L: float, t: float,
                      coeffs: np.ndarray) -> np.ndarray:
    truncation = (coeffs.shape[-1] - 1) // 2
    return coeffs * group_phases(kind, L, t, truncation)


def apply_group(kind: GroupKind, L: float, t: float,
                w: SpectralField) -> SpectralField:
    """Apply the group at time t.  Inverse is the same call with -t.

    The Airy phase is odd in n, so the Airy group preserves the reality
    flag; the Schrodinger phase is even and does not.
    """
    out = apply_group_array(kind, L, t, w.coeffs)
    real = w.reality_flag and kind is GroupKind.AIRY
    return SpectralField(out, w.truncation, real, w.zero_mean_flag)
