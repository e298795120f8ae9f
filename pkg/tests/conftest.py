"""Shared oracle helpers for the test suite.

The convolution oracles recompute truncated products by explicit mode
summation, independent of any FFT, and the phase oracle reduces group
phases in 60-digit decimal arithmetic.  Tests compare the fast paths
against these slow routes instead of trusting frozen outputs alone.
"""

import decimal

import numpy as np
import pytest

from displab import SpectralField, random_field

# 2*pi to 60 decimal digits, for exact-phase reduction in the oracle.
_TWO_PI_60 = decimal.Decimal(
    "6.28318530717958647692528676655900576839433879875021164194988918")


def convolution_product(factors, conjugation_mask):
    """Truncated product by direct summation over mode tuples.

    Same contract as dealiased_product_array for a single field each:
    conjugating a factor flips its mode sign and conjugates the value.
    """
    n = (factors[0].shape[0] - 1) // 2
    terms = []
    for coeffs, conj in zip(factors, conjugation_mask):
        if conj:
            terms.append(np.conj(coeffs[::-1]))
        else:
            terms.append(coeffs)
    out = np.zeros(2 * n + 1, dtype=np.complex128)
    if len(terms) == 2:
        for i, a in enumerate(terms[0]):
            for j, b in enumerate(terms[1]):
                k = (i - n) + (j - n)
                if abs(k) <= n:
                    out[k + n] += a * b
        return out
    for i, a in enumerate(terms[0]):
        for j, b in enumerate(terms[1]):
            for l, c in enumerate(terms[2]):
                k = (i - n) + (j - n) + (l - n)
                if abs(k) <= n:
                    out[k + n] += a * b * c
    return out


def oracle_group_phase(L, t, exponent):
    """e^{-i L t exponent} with the phase reduced in 60-digit decimal.

    L and t enter as exact binary doubles, so the decimal product is the
    exact real number the double-double path is trying to represent.
    """
    decimal.getcontext().prec = 60
    theta = decimal.Decimal(L) * decimal.Decimal(t) * decimal.Decimal(exponent)
    theta = theta % _TWO_PI_60
    th = float(theta)
    return complex(np.cos(th), -np.sin(th))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_field(rng):
    return random_field(4, rng)


def seeded_fields(count, truncation, seed=0, **kwargs):
    """Deterministic batch of random fields for property sweeps."""
    out = []
    for k in range(count):
        gen = np.random.default_rng([seed, k])
        out.append(random_field(truncation, gen, **kwargs))
    return out
