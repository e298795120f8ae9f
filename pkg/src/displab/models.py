"""Model catalogue: the three PDEs in three frames plus the reduced forms.

Every PDE right-hand side splits as a diagonal linear symbol plus a
nonlinear term, which is the contract the exponential stepper consumes.
The dispersive part sits in the physical-frame symbol (where the stepper
treats it exactly) and moves into the oscillatory nonlinearity's time
argument in the rotating frame; averaged frames replace the oscillatory
nonlinearity by its resonant average.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .field import (SpectralField, dealiased_product_array, derivative_array,
                    hs_norm_array, mode_numbers)
from .groups import GroupKind, apply_group_array
from .nonlinear import (OscillatoryKind, averaged_m_array, averaged_n_array,
                        burgers_term, gl_cubic, oscillatory_eval_array)
from .trajectory import TrajectoryLog


class Family(enum.Enum):
    GL1 = "gl1"
    GL2 = "gl2"
    KS = "ks"
    KDV_RESCALED = "kdv"
    GL2_REDUCED = "gl2-reduced"
    ODE3 = "ode3"


class Frame(enum.Enum):
    PHYSICAL = "physical"
    ROTATING = "rotating"
    AVERAGED = "averaged"


_PDE_FAMILIES = (Family.GL1, Family.GL2, Family.KS)


@dataclass
class ModelSpec:
    """Equation family, frame, and physical parameters.

    ``beta`` and ``omega`` are the cubic instability parameters, ``gamma``
    the linear dispersion-free phase diffusion, ``a`` the long-wave drive,
    ``L`` the dispersion strength (``eps`` is its inverse), ``alpha`` the
    real instability parameter of the reduced system.  ``nonlin_scale``
    multiplies the nonlinear term; 0 turns the model linear, which the
    exactness checks rely on.
    """

    family: Family
    frame: Frame = Frame.PHYSICAL
    beta: complex = 0.0 + 0.0j
    gamma: float = 0.0
    omega: float = 0.0
    a: float = 0.0
    L: float = 0.0
    alpha: float = 0.0
    D: int = 0
    nonlin_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family in _PDE_FAMILIES and self.frame is not Frame.PHYSICAL:
            if self.L == 0.0:
                raise ValueError("rotating/averaged frames need L > 0")

    @property
    def eps(self) -> float:
        if self.L == 0.0:
            raise ValueError("eps undefined at L = 0")
        return 1.0 / self.L

    # -- constructors --------------------------------------------------

    @classmethod
    def gl1(cls, frame: Frame, beta: complex, gamma: float, omega: float,
            L: float, nonlin_scale: float = 1.0) -> "ModelSpec":
        return cls(Family.GL1, frame, beta=beta, gamma=gamma, omega=omega,
                   L=L, nonlin_scale=nonlin_scale)

    @classmethod
    def gl2(cls, frame: Frame, beta: complex, omega: float, L: float,
            nonlin_scale: float = 1.0) -> "ModelSpec":
        return cls(Family.GL2, frame, beta=beta, omega=omega, L=L,
                   nonlin_scale=nonlin_scale)

    @classmethod
    def ks(cls, frame: Frame, a: float, L: float,
           nonlin_scale: float = 1.0) -> "ModelSpec":
        return cls(Family.KS, frame, a=a, L=L, nonlin_scale=nonlin_scale)

    @classmethod
    def kdv_rescaled(cls, a: float, eps: float) -> "ModelSpec":
        return cls(Family.KDV_RESCALED, a=a, L=np.inf if eps == 0 else 1.0 / eps)

    @classmethod
    def gl2_reduced(cls, alpha: float, D: int | None = None) -> "ModelSpec":
        if D is None:
            D = default_reduced_truncation(alpha)
        return cls(Family.GL2_REDUCED, alpha=alpha, D=D)

    @classmethod
    def ode3(cls, beta: float, gamma: float, omega: float) -> "ModelSpec":
        return cls(Family.ODE3, beta=beta, gamma=gamma, omega=omega)


def default_reduced_truncation(alpha: float) -> int:
    """Smallest invariant-subspace size guaranteed to hold the attractor."""
    return int(np.ceil(np.sqrt(max(alpha, 0.0)))) + 1


def linear_symbol(model: ModelSpec, truncation: int) -> np.ndarray:
    """Diagonal symbol lambda_n over stored modes -N..N."""
    n = mode_numbers(truncation).astype(float)
    n2 = n ** 2
    if model.family is Family.GL1:
        sym = -(1.0 + 1j * model.gamma) * n2 + model.beta
        if model.frame is Frame.PHYSICAL:
            sym = sym - 1j * model.L * n ** 3
        return sym
    if model.family is Family.GL2:
        if model.frame is Frame.PHYSICAL:
            return -(1.0 + 1j * model.L) * n2 + model.beta
        return -n2 + model.beta + 0j
    if model.family is Family.KS:
        sym = -n2 ** 2 + model.a * n2 + 0j
        if model.frame is Frame.PHYSICAL:
            sym = sym - 1j * model.L * n ** 3
        return sym
    if model.family is Family.KDV_RESCALED:
        return model.eps * (-n2 ** 2 + model.a * n2) - 1j * n ** 3
    if model.family is Family.GL2_REDUCED:
        return -n2 + model.alpha + 0j
    raise ValueError(f"no spectral symbol for {model.family}")


def _require_ks_domain(w: SpectralField) -> None:
    if not (w.reality_flag and w.zero_mean_flag):
        raise ValueError("KS-type models act on real zero-mean fields")


def nonlinear_rhs(model: ModelSpec, t: float, w: SpectralField) -> SpectralField:
    """Nonlinear part of the RHS at time t (identically the full RHS minus
    the diagonal symbol)."""
    s = model.nonlin_scale
    if model.family in (Family.GL1, Family.GL2):
        cubic_coeff = -(1.0 + 1j * model.omega) * s
        if model.frame is Frame.PHYSICAL:
            return gl_cubic(w).scaled(cubic_coeff)
        kind = (OscillatoryKind.CUBIC_AIRY if model.family is Family.GL1
                else OscillatoryKind.CUBIC_SCHRODINGER)
        if model.frame is Frame.ROTATING:
            out = _oscillatory_rhs(kind, t * model.L, w)
            return out.scaled(cubic_coeff)
        avg = averaged_n_array(w.coeffs) if model.family is Family.GL1 \
            else averaged_m_array(w.coeffs)
        return w.with_coeffs(avg * cubic_coeff,
                             reality=w.reality_flag and model.omega == 0.0)
    if model.family is Family.KS:
        _require_ks_domain(w)
        if model.frame is Frame.PHYSICAL:
            return burgers_term(w).scaled(s)
        if model.frame is Frame.ROTATING:
            return _oscillatory_rhs(OscillatoryKind.BURGERS_AIRY,
                                    t * model.L, w).scaled(s)
        return SpectralField.zeros(w.truncation, reality=True, zero_mean=True)
    if model.family is Family.KDV_RESCALED:
        _require_ks_domain(w)
        return burgers_term(w).scaled(s)
    if model.family is Family.GL2_REDUCED:
        out = _reduced_nonlinear_array(w.coeffs) * s
        return w.with_coeffs(out)
    raise ValueError(f"{model.family} has no field-valued nonlinearity")


def _oscillatory_rhs(kind: OscillatoryKind, tau: float,
                     w: SpectralField) -> SpectralField:
    out = oscillatory_eval_array(kind, tau, w.coeffs)
    real = w.reality_flag and kind.group is GroupKind.AIRY
    zero_mean = kind is OscillatoryKind.BURGERS_AIRY
    return SpectralField(out, w.truncation, real, zero_mean)


def nonlinear_rhs_array(model: ModelSpec, t: float,
                        coeffs: np.ndarray) -> np.ndarray:
    """Batched raw-array route used inside time loops (same math as
    ``nonlinear_rhs``, no flag plumbing)."""
    s = model.nonlin_scale
    if model.family in (Family.GL1, Family.GL2):
        coeff = -(1.0 + 1j * model.omega) * s
        if model.frame is Frame.PHYSICAL:
            return coeff * dealiased_product_array(
                [coeffs, coeffs, coeffs], [False, False, True])
        kind = (OscillatoryKind.CUBIC_AIRY if model.family is Family.GL1
                else OscillatoryKind.CUBIC_SCHRODINGER)
        if model.frame is Frame.ROTATING:
            return coeff * oscillatory_eval_array(kind, t * model.L, coeffs)
        avg = averaged_n_array(coeffs) if model.family is Family.GL1 \
            else averaged_m_array(coeffs)
        return coeff * avg
    if model.family is Family.KS:
        if model.frame is Frame.PHYSICAL:
            sq = dealiased_product_array([coeffs, coeffs], [False, False])
            return s * derivative_array(sq, 1) * 0.5
        if model.frame is Frame.ROTATING:
            return s * oscillatory_eval_array(OscillatoryKind.BURGERS_AIRY,
                                              t * model.L, coeffs)
        return np.zeros_like(coeffs)
    if model.family is Family.KDV_RESCALED:
        sq = dealiased_product_array([coeffs, coeffs], [False, False])
        return s * derivative_array(sq, 1) * 0.5
    if model.family is Family.GL2_REDUCED:
        return s * _reduced_nonlinear_array(coeffs)
    raise ValueError(f"{model.family} has no field-valued nonlinearity")


def _reduced_nonlinear_array(coeffs: np.ndarray) -> np.ndarray:
    amp2 = np.abs(coeffs) ** 2
    nsq = np.sum(amp2, axis=-1, keepdims=True)
    return -2.0 * coeffs * nsq + coeffs * amp2


def rhs_rescaled_kdv(a: float, eps: float, v: SpectralField) -> SpectralField:
    """Full slow-time RHS eps(-v_xxxx - a v_xx) + v v_x + v_xxx."""
    _require_ks_domain(v)
    n = mode_numbers(v.truncation).astype(float)
    sym = eps * (-n ** 4 + a * n ** 2) - 1j * n ** 3
    out = burgers_term(v)
    return SpectralField(sym * v.coeffs + out.coeffs, v.truncation,
                         reality_flag=True, zero_mean_flag=True)


def rhs_reduced_gl2(alpha: float, v: SpectralField) -> SpectralField:
    """Mode-wise gradient flow: -n^2 v_n + alpha v_n - 2 v_n |v|^2 + v_n |v_n|^2."""
    n = mode_numbers(v.truncation).astype(float)
    lin = (-n ** 2 + alpha) * v.coeffs
    return v.with_coeffs(lin + _reduced_nonlinear_array(v.coeffs))


def reduced_lyapunov(alpha: float, coeffs: np.ndarray) -> float:
    """Lyapunov functional of the reduced flow,
    |v|_{H1}^2 + |v|^4 - sum |v_n|^4 / 2 - (alpha + 1) |v|^2."""
    amp2 = np.abs(coeffs) ** 2
    nsq = float(np.sum(amp2))
    h1 = float(hs_norm_array(coeffs, 1.0) ** 2)
    return h1 + nsq ** 2 - 0.5 * float(np.sum(amp2 ** 2)) - (alpha + 1.0) * nsq


# -- 3d polar reduction -----------------------------------------------


@dataclass
class ODE3State:
    r: float
    rho: float
    eta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.rho, self.eta], dtype=float)

    @classmethod
    def from_array(cls, y: np.ndarray) -> "ODE3State":
        return cls(float(y[0]), float(y[1]), float(y[2]))


def rhs_ode3_array(beta: float, gamma: float, omega: float,
                   y: np.ndarray) -> np.ndarray:
    r, rho, eta = y[..., 0], y[..., 1], y[..., 2]
    ce, se = np.cos(eta), np.sin(eta)
    dr = r * (beta - r - 4.0 * rho - 2.0 * rho * (ce - omega * se))
    drho = rho * (beta - 1.0 - 2.0 * r - 3.0 * rho - r * (ce + omega * se))
    deta = (-gamma + omega * (rho - r) + r * (se - omega * ce)
            + 2.0 * rho * (se + omega * ce))
    return np.stack([dr, drho, deta], axis=-1)


def rhs_ode3(beta: float, gamma: float, omega: float,
             state: ODE3State) -> ODE3State:
    """Polar-coordinate flow on the (mean mode, symmetric first pair)
    invariant manifold of the averaged first-family equation.  ``beta`` is
    the real instability parameter and ``gamma`` the phase diffusion; the
    imaginary part of the complex instability parameter drops out of the
    reduction."""
    return ODE3State.from_array(
        rhs_ode3_array(beta, gamma, omega, state.as_array()))


# -- trajectory maps ---------------------------------------------------


def frame_transform(log: TrajectoryLog, kind: GroupKind, L: float,
                    inverse: bool = False) -> TrajectoryLog:
    """Conjugate snapshots by the dispersion group: physical data becomes
    rotating-frame data (``inverse`` undoes it).  Norm series are reused
    unchanged because the group is an isometry of every H^s."""
    sign = 1.0 if inverse else -1.0
    snaps = [apply_group_array(kind, L, sign * t, snap)
             for t, snap in zip(log.snapshot_times, log.snapshots)]
    final = log.final
    if final is not None and len(log.times):
        final = apply_group_array(kind, L, sign * float(log.times[-1]), final)
    return TrajectoryLog(log.times, log.h_norm, log.h1_norm, log.lyapunov,
                         list(log.snapshot_times), snaps, final)


def phase_reconstruction(log: TrajectoryLog, gamma: float,
                         omega: float) -> TrajectoryLog:
    """Dress a reduced-flow trajectory with its drifting phases.

    Each mode n picks up A_n(t) = int_0^t (gamma - 2 omega |v|^2
    + omega |v_n|^2) dt', accumulated by trapezoid over the stored
    snapshots; the reconstructed w_n = e^{i A_n} v_n solves the averaged
    complex-coefficient equation whenever v solves the reduced one.
    """
    if len(log.snapshots) != len(log.times):
        raise ValueError("phase reconstruction needs a snapshot per sample")
    snaps = np.asarray(log.snapshots)
    amp2 = np.abs(snaps) ** 2
    nsq = np.sum(amp2, axis=-1, keepdims=True)
    integrand = gamma - 2.0 * omega * nsq + omega * amp2
    t = np.asarray(log.times)
    dt = np.diff(t)[:, None]
    phases = np.zeros_like(integrand)
    phases[1:] = np.cumsum(0.5 * dt * (integrand[1:] + integrand[:-1]), axis=0)
    dressed = [np.exp(1j * phases[i]) * snaps[i] for i in range(len(t))]
    return TrajectoryLog(log.times, log.h_norm, log.h1_norm, log.lyapunov,
                         list(log.times), dressed, dressed[-1].copy())
