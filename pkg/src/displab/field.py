"""Truncated Fourier series on (-pi, pi) and the operations built on them.

A field is the dense coefficient vector (w_n)_{|n| <= N} of
w(x) = sum_n w_n e^{inx}, stored with mode n at index n + N.  All heavy
kernels act on raw arrays along the last axis so that ensembles can be
stepped in batch; ``SpectralField`` is the value-type wrapper used by the
public API.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

_FLAG_TOL = 1e-13


def mode_numbers(truncation: int) -> np.ndarray:
    """Integer wavenumbers -N..N in storage order."""
    return np.arange(-truncation, truncation + 1)


def padded_grid_size(truncation: int) -> int:
    """Smallest power of two >= 4N + 2.

    One padded grid serves both quadratic and cubic products: a cubic
    product of N-truncated factors carries modes up to 3N, and M > 4N
    keeps every aliased copy out of the retained band |n| <= N.
    """
    m = 1
    while m < 4 * truncation + 2:
        m *= 2
    return m


def _check_same_truncation(arrays: list[np.ndarray]) -> int:
    sizes = {a.shape[-1] for a in arrays}
    if len(sizes) != 1:
        raise ValueError(f"factor truncations differ: sizes {sorted(sizes)}")
    (size,) = sizes
    if size % 2 != 1:
        raise ValueError(f"coefficient array has even length {size}")
    return (size - 1) // 2


def coeffs_to_grid(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    """Evaluate on the uniform grid x_j = 2*pi*j/M (batched over leading axes)."""
    n = _check_same_truncation([coeffs])
    spec = np.zeros(coeffs.shape[:-1] + (grid_size,), dtype=np.complex128)
    spec[..., : n + 1] = coeffs[..., n:]
    if n > 0:
        spec[..., -n:] = coeffs[..., :n]
    return np.fft.ifft(spec, axis=-1) * grid_size


def grid_to_coeffs(values: np.ndarray, truncation: int) -> np.ndarray:
    """Forward transform, truncated to |n| <= N."""
    spec = np.fft.fft(values, axis=-1) / values.shape[-1]
    out = np.empty(values.shape[:-1] + (2 * truncation + 1,), dtype=np.complex128)
    out[..., truncation:] = spec[..., : truncation + 1]
    if truncation > 0:
        out[..., :truncation] = spec[..., -truncation:]
    return out


def dealiased_product_array(factors: list[np.ndarray],
                            conjugation_mask: list[bool]) -> np.ndarray:
    """Pointwise product of two or three factors, truncated alias-free.

    Factors are transformed to the common padded grid, conjugated where the
    mask says so, multiplied, and transformed back.  Because the padded grid
    resolves every mode of the full product up to the retained band, the
    result agrees with the exact truncated convolution to rounding.
    """
    if len(factors) not in (2, 3):
        raise ValueError("dealiased products take two or three factors")
    if len(conjugation_mask) != len(factors):
        raise ValueError("conjugation mask length does not match factor count")
    n = _check_same_truncation(list(factors))
    m = padded_grid_size(n)
    prod = None
    for coeffs, conj in zip(factors, conjugation_mask):
        u = coeffs_to_grid(coeffs, m)
        if conj:
            u = np.conj(u)
        prod = u if prod is None else prod * u
    return grid_to_coeffs(prod, n)


def hs_norm_array(coeffs: np.ndarray, s: float) -> np.ndarray:
    n = mode_numbers(_check_same_truncation([coeffs]))
    weights = (n.astype(float) ** 2 + 1.0) ** s
    return np.sqrt(np.sum(weights * np.abs(coeffs) ** 2, axis=-1))


def reflect(coeffs: np.ndarray) -> np.ndarray:
    """Index reversal n -> -n along the mode axis."""
    return coeffs[..., ::-1]


def derivative_array(coeffs: np.ndarray, order: int) -> np.ndarray:
    n = mode_numbers(_check_same_truncation([coeffs]))
    return coeffs * (1j * n) ** order


@dataclass
class SpectralField:
    """Fourier coefficients with truncation and structure flags.

    ``reality_flag`` asserts w_{-n} = conj(w_n), ``zero_mean_flag`` asserts
    w_0 = 0.  Flags are validated at construction (to 1e-13 after floating
    arithmetic; exactly for the zero mean) and propagated conservatively by
    the operations.
    """

    coeffs: np.ndarray
    truncation: int
    reality_flag: bool = False
    zero_mean_flag: bool = False

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.ndim != 1 or self.coeffs.shape[0] != 2 * self.truncation + 1:
            raise ValueError(
                f"expected {2 * self.truncation + 1} coefficients, "
                f"got shape {self.coeffs.shape}")
        if self.reality_flag:
            scale = max(1.0, float(np.max(np.abs(self.coeffs))))
            dev = np.max(np.abs(reflect(self.coeffs) - np.conj(self.coeffs)))
            if dev > _FLAG_TOL * scale:
                raise ValueError(f"reality flag violated by {dev:.3e}")
        if self.zero_mean_flag and self.coeffs[self.truncation] != 0:
            raise ValueError("zero-mean flag violated")

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, truncation: int, reality: bool = False,
              zero_mean: bool = False) -> "SpectralField":
        return cls(np.zeros(2 * truncation + 1, dtype=np.complex128),
                   truncation, reality, zero_mean)

    @classmethod
    def from_modes(cls, truncation: int, modes: dict[int, complex],
                   reality: bool = False, zero_mean: bool = False) -> "SpectralField":
        coeffs = np.zeros(2 * truncation + 1, dtype=np.complex128)
        for n, c in modes.items():
            if abs(n) > truncation:
                raise ValueError(f"mode {n} outside truncation {truncation}")
            coeffs[n + truncation] = c
        return cls(coeffs, truncation, reality, zero_mean)

    @classmethod
    def unit_mode(cls, truncation: int, n: int, amplitude: complex = 1.0) -> "SpectralField":
        return cls.from_modes(truncation, {n: amplitude})

    # -- accessors ----------------------------------------------------

    def mode(self, n: int) -> complex:
        if abs(n) > self.truncation:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + self.truncation])

    @property
    def modes(self) -> np.ndarray:
        return mode_numbers(self.truncation)

    def with_coeffs(self, coeffs: np.ndarray, reality: bool | None = None,
                    zero_mean: bool | None = None) -> "SpectralField":
        return SpectralField(
            coeffs, self.truncation,
            self.reality_flag if reality is None else reality,
            self.zero_mean_flag if zero_mean is None else zero_mean)

    def copy(self) -> "SpectralField":
        return self.with_coeffs(self.coeffs.copy())

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if other.truncation != self.truncation:
            raise ValueError("truncation mismatch in field addition")
        return SpectralField(self.coeffs + other.coeffs, self.truncation,
                             self.reality_flag and other.reality_flag,
                             self.zero_mean_flag and other.zero_mean_flag)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        if other.truncation != self.truncation:
            raise ValueError("truncation mismatch in field subtraction")
        return SpectralField(self.coeffs - other.coeffs, self.truncation,
                             self.reality_flag and other.reality_flag,
                             self.zero_mean_flag and other.zero_mean_flag)

    def scaled(self, factor: complex) -> "SpectralField":
        real = self.reality_flag and float(np.imag(factor)) == 0.0
        return SpectralField(self.coeffs * factor, self.truncation,
                             real, self.zero_mean_flag)


# -- public operations ------------------------------------------------


def hs_norm(w: SpectralField, s: float) -> float:
    """Sobolev norm (sum_n (n^2+1)^s |w_n|^2)^(1/2); s=0 is the H norm."""
    return float(hs_norm_array(w.coeffs, s))


def pairing(v: SpectralField, w: SpectralField) -> complex:
    """Bilinear pairing sum_n v_n w_{-n} (no conjugation, symmetric).

    Truncations may differ; the shorter field is implicitly zero-padded.
    """
    n = max(v.truncation, w.truncation)
    a = _embed(v, n)
    b = _embed(w, n)
    return complex(np.sum(a * reflect(b)))


def inner_product(v: SpectralField, w: SpectralField) -> complex:
    """Hermitian inner product sum_n v_n conj(w_n)."""
    if v.truncation != w.truncation:
        raise ValueError("truncation mismatch in inner product")
    return complex(np.sum(v.coeffs * np.conj(w.coeffs)))


def derivative(w: SpectralField, order: int) -> SpectralField:
    """Spectral derivative d^order/dx^order, i.e. multiplication by (in)^order."""
    if order < 1:
        raise ValueError("derivative order must be a positive integer")
    out = derivative_array(w.coeffs, order)
    return SpectralField(out, w.truncation, w.reality_flag, zero_mean_flag=True)


def dealiased_product(factors: list[SpectralField],
                      conjugation_mask: list[bool]) -> SpectralField:
    """Alias-free truncated product of two or three equal-truncation fields."""
    n = _check_same_truncation([f.coeffs for f in factors])
    out = dealiased_product_array([f.coeffs for f in factors], conjugation_mask)
    real = all(f.reality_flag for f in factors)
    return SpectralField(out, n, reality_flag=real)


def random_field(truncation: int, rng: np.random.Generator,
                 reality: bool = False, zero_mean: bool = False,
                 scale: float = 1.0) -> SpectralField:
    """Random smooth field: independent complex Gaussian modes.

    Mode n has variance (1+n^2)^{-2}.  With ``reality`` the negative modes
    mirror the positive ones and the mean mode is drawn real; with
    ``zero_mean`` the mean mode is dropped.
    """
    n = mode_numbers(truncation)
    sigma = scale / (1.0 + n.astype(float) ** 2)
    draws = rng.standard_normal((2, 2 * truncation + 1))
    coeffs = sigma * (draws[0] + 1j * draws[1]) / np.sqrt(2.0)
    if reality:
        upper = coeffs[truncation + 1:]
        coeffs[:truncation] = np.conj(upper[::-1])
        coeffs[truncation] = complex(np.real(coeffs[truncation]))
    if zero_mean:
        coeffs[truncation] = 0.0
    return SpectralField(coeffs, truncation, reality, zero_mean)


def _embed(w: SpectralField, truncation: int) -> np.ndarray:
    if w.truncation == truncation:
        return w.coeffs
    out = np.zeros(2 * truncation + 1, dtype=np.complex128)
    lo = truncation - w.truncation
    out[lo:lo + 2 * w.truncation + 1] = w.coeffs
    return out


def embed(w: SpectralField, truncation: int) -> SpectralField:
    """Zero-pad to a larger truncation."""
    if truncation < w.truncation:
        raise ValueError("cannot embed into a smaller truncation")
    return SpectralField(_embed(w, truncation), truncation,
                         w.reality_flag, w.zero_mean_flag)
