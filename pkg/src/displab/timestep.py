"""Exponential (ETDRK4) and classical (RK4) steppers plus the run driver.

The ETDRK4 coefficients are the phi functions phi_k(z) = sum_j z^j/(j+k)!
evaluated per diagonal symbol entry.  Near the origin the closed forms
lose digits to cancellation, so |z| < 1/2 switches to the truncated
series; the two branches agree to 1e-14 at the seam, which is pinned by a
test.  Stage combination follows the standard fourth-order tableau with
nonautonomous stage times t, t + h/2, t + h/2, t + h.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .field import SpectralField, hs_norm_array, reflect
from .models import (Family, Frame, ModelSpec, ODE3State, linear_symbol,
                     nonlinear_rhs_array, reduced_lyapunov, rhs_ode3_array)
from .trajectory import SimConfig, TrajectoryLog

BLOWUP_THRESHOLD = 1e12
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 18


class BlowUpError(RuntimeError):
    """Raised when a coefficient leaves the trusted range mid-run."""

    def __init__(self, t: float, log: TrajectoryLog | None = None):
        super().__init__(f"solution blew up at t = {t:.6g}")
        self.t = t
        self.log = log


def phi_series(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated Horner series for phi_1..3; accurate for |z| < 1/2."""
    z = np.asarray(z, dtype=np.complex128)
    out = []
    for k in range(1, 4):
        acc = np.full_like(z, 1.0 / math.factorial(_SERIES_TERMS - 1 + k))
        for j in range(_SERIES_TERMS - 2, -1, -1):
            acc = acc * z + 1.0 / math.factorial(j + k)
        out.append(acc)
    return out[0], out[1], out[2]


def phi_closed(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed forms (e^z - 1)/z cascade; well conditioned away from 0."""
    z = np.asarray(z, dtype=np.complex128)
    p1 = (np.exp(z) - 1.0) / z
    p2 = (p1 - 1.0) / z
    p3 = (p2 - 0.5) / z
    return p1, p2, p3


def phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """phi_1, phi_2, phi_3 elementwise, series/closed-form hybrid."""
    z = np.asarray(z, dtype=np.complex128)
    out = [np.empty_like(z) for _ in range(3)]
    small = np.abs(z) < _SERIES_RADIUS
    for branch, result in ((small, phi_series(z[small])),
                           (~small, phi_closed(z[~small]))):
        for k in range(3):
            out[k][branch] = result[k]
    return out[0], out[1], out[2]


class Etdrk4:
    """Coefficient cache and step map for one (model, h, truncation)."""

    def __init__(self, model: ModelSpec, h: float, truncation: int):
        self.model = model
        self.h = float(h)
        self.truncation = truncation
        lam = linear_symbol(model, truncation)
        z = self.h * lam
        self.E = np.exp(z)
        self.E2 = np.exp(0.5 * z)
        half1, _, _ = phi_functions(0.5 * z)
        p1, p2, p3 = phi_functions(z)
        self.Q = 0.5 * self.h * half1
        self.f1 = self.h * (p1 - 3.0 * p2 + 4.0 * p3)
        self.f2 = self.h * (p2 - 2.0 * p3)
        self.f3 = self.h * (4.0 * p3 - p2)
        # real zero-mean families stay on their invariant set exactly;
        # projecting each step stops rounding drift from accumulating
        self.project_real = model.family in (Family.KS, Family.KDV_RESCALED)

    def step(self, t: float, coeffs: np.ndarray) -> np.ndarray:
        m, h = self.model, self.h
        n0 = nonlinear_rhs_array(m, t, coeffs)
        a = self.E2 * coeffs + self.Q * n0
        na = nonlinear_rhs_array(m, t + 0.5 * h, a)
        b = self.E2 * coeffs + self.Q * na
        nb = nonlinear_rhs_array(m, t + 0.5 * h, b)
        c = self.E2 * a + self.Q * (2.0 * nb - n0)
        nc = nonlinear_rhs_array(m, t + h, c)
        out = self.E * coeffs + self.f1 * n0 + 2.0 * self.f2 * (na + nb) \
            + self.f3 * nc
        if self.project_real:
            out = 0.5 * (out + np.conj(reflect(out)))
        return out


_STEPPER_CACHE: dict = {}


def _model_key(model: ModelSpec) -> tuple:
    return (model.family, model.frame, complex(model.beta), model.gamma,
            model.omega, model.a, model.L, model.alpha, model.D,
            model.nonlin_scale)


def get_stepper(model: ModelSpec, h: float, truncation: int) -> Etdrk4:
    key = (_model_key(model), float(h), truncation)
    stepper = _STEPPER_CACHE.get(key)
    if stepper is None:
        stepper = Etdrk4(model, h, truncation)
        _STEPPER_CACHE[key] = stepper
    return stepper


def etdrk4_step(model: ModelSpec, t: float, h: float,
                w: SpectralField) -> SpectralField:
    """One exponential step; coefficients are cached per (model, h, N)."""
    stepper = get_stepper(model, h, w.truncation)
    return w.with_coeffs(stepper.step(t, w.coeffs))


def rk4_step(rhs, t: float, h: float, y: np.ndarray) -> np.ndarray:
    """Classical fourth-order step for the nonstiff ODE forms."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rotating_step_limit(L: float) -> float:
    return (2.0 * np.pi / L) / 16.0


def _check_rotating_step(model: ModelSpec, h: float) -> None:
    if model.frame is Frame.ROTATING and h > rotating_step_limit(model.L) * (1 + 1e-12):
        warnings.warn(
            f"step {h:.3g} exceeds the rotating-frame resolution limit "
            f"{rotating_step_limit(model.L):.3g} at L = {model.L:.3g}",
            RuntimeWarning)


def _full_ode_rhs(model: ModelSpec):
    if model.family is Family.ODE3:
        return lambda t, y: rhs_ode3_array(model.beta, model.gamma,
                                           model.omega, y)
    if model.family is Family.GL2_REDUCED:
        lam = linear_symbol(model, model.D)
        return lambda t, y: lam * y + nonlinear_rhs_array(model, t, y)
    raise ValueError(f"{model.family} is not an ODE form")


def integrate(model: ModelSpec, config: SimConfig, w0) -> TrajectoryLog:
    """Drive a model from t = 0 to the horizon, sampling norms.

    ``w0`` is a SpectralField for the PDE forms, an ODE3State (or length-3
    array) for the polar system.  The horizon is rounded to a whole number
    of steps.  Raises BlowUpError, carrying the partial log, if any
    coefficient exceeds 1e12 or turns nonfinite.
    """
    if model.family is Family.ODE3:
        y = w0.as_array() if isinstance(w0, ODE3State) else np.asarray(w0, float)
        return _integrate_ode(model, config, y)
    if model.family is Family.GL2_REDUCED:
        coeffs = w0.coeffs if isinstance(w0, SpectralField) else np.asarray(w0)
        if coeffs.shape[-1] != 2 * config.truncation + 1:
            raise ValueError("initial data truncation does not match config")
        return _integrate_ode(model, config, coeffs.astype(np.complex128))
    if not isinstance(w0, SpectralField):
        raise TypeError("PDE models need a SpectralField initial state")
    if w0.truncation != config.truncation:
        raise ValueError("initial data truncation does not match config")
    _check_rotating_step(model, config.h)
    stepper = get_stepper(model, config.h, config.truncation)
    return _run_loop(config, w0.coeffs.copy(),
                     lambda t, y: stepper.step(t, y), model)


def _integrate_ode(model: ModelSpec, config: SimConfig,
                   y0: np.ndarray) -> TrajectoryLog:
    rhs = _full_ode_rhs(model)
    return _run_loop(config, y0.copy(),
                     lambda t, y: rk4_step(rhs, t, config.h, y), model)


def _run_loop(config: SimConfig, y: np.ndarray, advance, model: ModelSpec) -> TrajectoryLog:
    n_steps = int(round(config.horizon / config.h)) if config.horizon > 0 else 0
    is_field = model.family is not Family.ODE3
    reduced = model.family is Family.GL2_REDUCED

    times, h_norms, h1_norms, lyap = [], [], [], []
    snap_times, snaps = [], []

    def sample(t: float, state: np.ndarray) -> None:
        times.append(t)
        if is_field:
            h_norms.append(float(hs_norm_array(state, 0.0)))
            h1_norms.append(float(hs_norm_array(state, 1.0)))
        else:
            nrm = float(np.linalg.norm(state))
            h_norms.append(nrm)
            h1_norms.append(nrm)
        lyap.append(reduced_lyapunov(model.alpha, state) if reduced else np.nan)

    def snapshot(t: float, state: np.ndarray) -> None:
        snap_times.append(t)
        snaps.append(state.copy())

    sample(0.0, y)
    if config.snapshot_every:
        snapshot(0.0, y)
    for k in range(1, n_steps + 1):
        t_prev = (k - 1) * config.h
        y = advance(t_prev, y)
        amax = np.max(np.abs(y))
        if not np.isfinite(amax) or amax > BLOWUP_THRESHOLD:
            partial = _build_log(times, h_norms, h1_norms, lyap,
                                 snap_times, snaps, y)
            raise BlowUpError(k * config.h, partial)
        t = k * config.h
        if k % config.sample_every == 0 or k == n_steps:
            sample(t, y)
        if config.snapshot_every and (k % config.snapshot_every == 0
                                      or k == n_steps):
            snapshot(t, y)
    return _build_log(times, h_norms, h1_norms, lyap, snap_times, snaps, y)


def _build_log(times, h_norms, h1_norms, lyap, snap_times, snaps,
               final) -> TrajectoryLog:
    return TrajectoryLog(np.asarray(times), np.asarray(h_norms),
                         np.asarray(h1_norms), np.asarray(lyap),
                         snap_times, snaps, np.asarray(final).copy())


def integrate_batch(model: ModelSpec, config: SimConfig,
                    states: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, list]:
    """Ensemble driver: step a (members, modes) block in lockstep.

    Returns (sample times, H-norm series with one row per member, final
    states, per-member blow-up time or None).  Members that blow up are
    frozen and masked NaN from their failure onward; the rest continue.
    """
    _check_rotating_step(model, config.h)
    stepper = get_stepper(model, config.h, config.truncation)
    y = np.array(states, dtype=np.complex128)
    n_steps = int(round(config.horizon / config.h)) if config.horizon > 0 else 0
    alive = np.ones(y.shape[0], dtype=bool)
    blowup: list = [None] * y.shape[0]

    times = [0.0]
    norms = [hs_norm_array(y, 0.0)]
    for k in range(1, n_steps + 1):
        t_prev = (k - 1) * config.h
        y_next = stepper.step(t_prev, y)
        amax = np.max(np.abs(y_next), axis=-1)
        bad = alive & (~np.isfinite(amax) | (amax > BLOWUP_THRESHOLD))
        for i in np.nonzero(bad)[0]:
            blowup[i] = k * config.h
            alive[i] = False
        y = np.where(alive[:, None], y_next, y)
        if k % config.sample_every == 0 or k == n_steps:
            times.append(k * config.h)
            row = hs_norm_array(y, 0.0)
            row = np.where(alive, row, np.nan)
            norms.append(row)
    return (np.asarray(times), np.stack(norms, axis=1), y, blowup)
