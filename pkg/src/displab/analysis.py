"""Experiment drivers: everything the acceptance checks and the CLI run.

These compose the model, stepper, and nonlinear layers into the repeatable
numerical experiments: averaging-rate fits, attractor-size scans across the
dispersion strength, equilibrium enumeration for the reduced gradient flow,
traveling-wave continuation for the rescaled long-wave system, and the
largest-Lyapunov-exponent probe for the polar three-dimensional reduction.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import (SpectralField, dealiased_product_array, derivative_array,
                    hs_norm_array, mode_numbers, random_field)
from .models import (Family, Frame, ModelSpec, ODE3State, linear_symbol,
                     nonlinear_rhs_array, reduced_lyapunov, rhs_ode3_array)
from .timestep import (BlowUpError, integrate, integrate_batch, rk4_step,
                       rotating_step_limit)
from .trajectory import SimConfig, TrajectoryLog

EQUILIBRIUM_TOL = 1e-9


def worker_count(explicit: int | None = None) -> int:
    """Worker pool size: explicit flag, else DISPLAB_THREADS, else all cores."""
    if explicit is not None and explicit > 0:
        return explicit
    env = os.environ.get("DISPLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def member_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([int(seed)] + [int(k) for k in keys])


def smooth_profile(truncation: int, amplitude: float = 1.0, decay: float = 0.35,
                   seed: int = 7, real: bool = False,
                   zero_mean: bool = False) -> SpectralField:
    """Deterministic smooth initial datum with exponentially decaying modes.

    The moduli are amplitude * exp(-decay * |n|) and the phases come from a
    seeded generator, so every run that asks for the same arguments gets the
    same bit pattern.
    """
    n = mode_numbers(truncation)
    rng = member_rng(seed, truncation)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2 * truncation + 1)
    coeffs = amplitude * np.exp(-decay * np.abs(n)) * np.exp(1j * phases)
    if real:
        half = coeffs[truncation + 1:]
        coeffs = np.concatenate([np.conj(half[::-1]),
                                 coeffs[truncation:truncation + 1].real + 0j,
                                 half])
    if zero_mean:
        coeffs[truncation] = 0.0
    return SpectralField(coeffs, truncation, reality_flag=real,
                         zero_mean_flag=zero_mean)


def lyapunov_value(alpha: float, v) -> float:
    """Lyapunov functional of the reduced gradient flow."""
    coeffs = v.coeffs if isinstance(v, SpectralField) else np.asarray(v)
    return reduced_lyapunov(alpha, coeffs)


# -- equilibria of the reduced flow -----------------------------------


@dataclass
class EquilibriumRecord:
    """One modulus pattern: which modes are excited and how strongly."""

    support: tuple[int, ...]
    n0: int
    n2: int
    norm_sq: float
    moduli_sq: dict[int, float]
    stable: bool
    hyperbolic: bool

    def modulus_vector(self, truncation: int) -> np.ndarray:
        out = np.zeros(2 * truncation + 1)
        for n, m2 in self.moduli_sq.items():
            out[n + truncation] = math.sqrt(m2)
        return out


def _is_square_mode(value: float) -> int | None:
    """Integer k >= 0 with k^2 == value (within tolerance), else None."""
    if value < -EQUILIBRIUM_TOL:
        return None
    k = int(round(math.sqrt(max(value, 0.0))))
    if abs(k * k - value) <= EQUILIBRIUM_TOL:
        return k
    return None


def enumerate_equilibria(alpha: float, D: int) -> list[EquilibriumRecord]:
    """All equilibrium modulus patterns supported in |n| <= D.

    A support S is feasible when both the shared norm
    (N0 alpha - N2) / (2 N0 - 1) and every modulus
    n^2 + (alpha - 2 N2) / (2 N0 - 1) come out positive.  Supports are
    enumerated recursively over modes ordered by n^2; once the running
    sum of (n^2 - alpha) is nonnegative and only modes with n^2 >= alpha
    remain, no extension can be feasible and the branch is cut.
    """
    if D > 12:
        raise ValueError("equilibrium enumeration is exponential; D > 12 refused")
    modes = sorted(range(-D, D + 1), key=lambda n: (n * n, n))
    records = [_zero_record(alpha)]

    def recurse(idx: int, chosen: list[int], excess: float) -> None:
        if idx == len(modes):
            if chosen:
                rec = _support_record(alpha, tuple(sorted(chosen)))
                if rec is not None:
                    records.append(rec)
            return
        n = modes[idx]
        if excess >= 0.0 and n * n >= alpha:
            # every unprocessed mode only raises N2 - N0 alpha further
            if chosen:
                rec = _support_record(alpha, tuple(sorted(chosen)))
                if rec is not None:
                    records.append(rec)
            return
        recurse(idx + 1, chosen, excess)
        chosen.append(n)
        recurse(idx + 1, chosen, excess + n * n - alpha)
        chosen.pop()

    recurse(0, [], 0.0)
    records.sort(key=lambda r: (r.n0, r.n2, r.support))
    return records


def _zero_record(alpha: float) -> EquilibriumRecord:
    k = _is_square_mode(alpha)
    return EquilibriumRecord(support=(), n0=0, n2=0, norm_sq=0.0,
                             moduli_sq={}, stable=alpha < 0.0,
                             hyperbolic=k is None)


def _support_record(alpha: float, support: tuple[int, ...]) -> EquilibriumRecord | None:
    n0 = len(support)
    n2 = sum(n * n for n in support)
    denom = 2 * n0 - 1
    norm_sq = (n0 * alpha - n2) / denom
    if norm_sq <= 0.0:
        return None
    shift = (alpha - 2 * n2) / denom
    moduli = {n: n * n + shift for n in support}
    if min(moduli.values()) <= 0.0:
        return None
    stable = n0 == 1 and support[0] ** 2 < alpha / 2.0
    k = _is_square_mode(-shift)
    hyperbolic = not (k is not None and (k not in support or -k not in support))
    return EquilibriumRecord(support, n0, n2, norm_sq, moduli, stable,
                             hyperbolic)


def linearization_spectrum(record: EquilibriumRecord, alpha: float,
                           truncation: int) -> np.ndarray:
    """Eigenvalues of the real-hyperplane linearization at the pattern.

    The operator is diag(-n^2 + alpha - 2|v|^2 + 3 v_n^2) - 4 v v^T with
    the real representative v_n = sqrt(moduli); it is symmetric, so the
    spectrum is real.
    """
    v = record.modulus_vector(truncation)
    n = mode_numbers(truncation).astype(float)
    nsq = record.norm_sq
    diag = -n ** 2 + alpha - 2.0 * nsq + 3.0 * v ** 2
    mat = np.diag(diag) - 4.0 * np.outer(v, v)
    return np.linalg.eigvalsh(mat)


def residual_reduced(record: EquilibriumRecord, alpha: float) -> float:
    """Max residual of the per-mode equilibrium relation on the support."""
    worst = 0.0
    for n, m2 in record.moduli_sq.items():
        worst = max(worst, abs(-n * n + alpha - 2.0 * record.norm_sq + m2))
    return worst


# -- averaging-rate experiment ----------------------------------------


@dataclass
class RateResult:
    rows: list[tuple[float, float, float]]  # (L, eps, error)
    slope: float
    intercept: float


def _rate_model(family: Family, frame: Frame, beta: complex, gamma: float,
                omega: float, L: float, nonlin_scale: float,
                a: float) -> ModelSpec:
    if family is Family.GL1:
        return ModelSpec.gl1(frame, beta, gamma, omega, L, nonlin_scale)
    if family is Family.GL2:
        return ModelSpec.gl2(frame, beta, omega, L, nonlin_scale)
    if family is Family.KS:
        return ModelSpec.ks(frame, a, L, nonlin_scale)
    raise ValueError(f"no rotating/averaged pair for {family}")


def averaging_rate_experiment(family: Family, beta: complex, gamma: float,
                              omega: float, w0: SpectralField, T: float,
                              L_list: list[float], nonlin_scale: float = 1.0,
                              error_order: float = 1.0, a: float = 0.0,
                              resolve: int = 1) -> RateResult:
    """H^s distance at time T between rotating and averaged runs, per L.

    Both runs share the step T / ceil(T / ((2 pi / L) / 16 / resolve^p)),
    where p is the degree of the dispersive clock (3 for the cubic-phase
    group, 2 for the quadratic one), so they end at exactly the same time
    and, in the linear-only case, take bit-identical steps.  ``resolve``
    is the highest mode index whose oscillation is tracked at sixteen
    points per period; leaving it at 1 reproduces the bare step bound but
    floors the measurable distance at the integration error of the
    unresolved modes.  The returned slope is the least-squares fit of
    log(error) against log(1/L).
    """
    degree = 2 if family is Family.GL2 else 3
    refine = max(1, int(resolve)) ** degree
    rows = []
    for L in L_list:
        h = T / math.ceil(T / (rotating_step_limit(L) / refine))
        cfg = SimConfig(truncation=w0.truncation, h=h, horizon=T,
                        sample_every=max(1, int(round(T / h))))
        rot = integrate(_rate_model(family, Frame.ROTATING, beta, gamma,
                                    omega, L, nonlin_scale, a), cfg, w0)
        avg = integrate(_rate_model(family, Frame.AVERAGED, beta, gamma,
                                    omega, L, nonlin_scale, a), cfg, w0)
        err = float(hs_norm_array(rot.final - avg.final, error_order))
        rows.append((float(L), 1.0 / float(L), err))
    slope, intercept = _loglog_fit([r[1] for r in rows], [r[2] for r in rows])
    return RateResult(rows, slope, intercept)


def _loglog_fit(x: list[float], y: list[float]) -> tuple[float, float]:
    if len(x) < 2 or any(not math.isfinite(v) or v <= 0.0 for v in x) \
            or any(not math.isfinite(v) or v <= 0.0 for v in y):
        return float("nan"), float("nan")
    coeff = np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)
    return float(coeff[0]), float(coeff[1])


# -- attractor-size scan ----------------------------------------------


@dataclass
class ScanResult:
    rows: list[tuple[float, int, float]]  # (L, member, statistic)
    per_l_max: dict[float, float]
    slope: float
    blowups: list[tuple[float, int, float]]
    series: dict[float, tuple[np.ndarray, np.ndarray]] = dc_field(default_factory=dict)


def attractor_norm_scan(model_for_l, L_list: list[float], ensemble_size: int,
                        T: float, burn_in: float, truncation: int,
                        h_for_l, seed: int = 0, real_fields: bool = False,
                        sample_target: int = 2000,
                        threads: int | None = None) -> ScanResult:
    """Time-averaged H norm across an ensemble, for each dispersion L.

    ``model_for_l`` and ``h_for_l`` map L to a ModelSpec and a step.  Each
    member starts from a seeded unit-norm random field; members blowing up
    are recorded and skipped in the statistics.  L values fan out over a
    thread pool and are merged back in list order.
    """

    def run_one(idx_l):
        idx, L = idx_l
        model = model_for_l(L)
        h = h_for_l(L)
        n_steps = max(1, int(round(T / h)))
        cfg = SimConfig(truncation=truncation, h=h, horizon=T,
                        sample_every=max(1, n_steps // sample_target))
        states = []
        for member in range(ensemble_size):
            rng = member_rng(seed, idx, member)
            w = random_field(truncation, rng, reality=real_fields,
                             zero_mean=real_fields)
            states.append(w.coeffs / max(hs_norm_array(w.coeffs, 0.0), 1e-30))
        times, norms, _, blow = integrate_batch(model, cfg, np.array(states))
        return idx, L, times, norms, blow

    results = {}
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        for idx, L, times, norms, blow in pool.map(run_one,
                                                   enumerate(L_list)):
            results[idx] = (L, times, norms, blow)

    rows, blowups, per_l_max, series = [], [], {}, {}
    for idx in range(len(L_list)):
        L, times, norms, blow = results[idx]
        mask = times >= burn_in
        stats = []
        for member in range(ensemble_size):
            if blow[member] is not None:
                blowups.append((float(L), member, float(blow[member])))
                rows.append((float(L), member, float("nan")))
                continue
            stat = float(np.mean(norms[member][mask]))
            stats.append(stat)
            rows.append((float(L), member, stat))
        per_l_max[float(L)] = max(stats) if stats else float("nan")
        series[float(L)] = (times, norms)
    slope, _ = _loglog_fit(list(per_l_max.keys()), list(per_l_max.values()))
    return ScanResult(rows, per_l_max, slope, blowups, series)


def dissipative_envelope_constant(times: np.ndarray, h_norms: np.ndarray,
                                  L: float) -> float:
    """Smallest C with |u(t)|^2 <= |u(0)|^2 e^{-t} + C (L^2 + 1) on the samples."""
    sq = np.asarray(h_norms) ** 2
    rhs = sq - sq[0] * np.exp(-np.asarray(times))
    return float(np.max(rhs) / (L * L + 1.0))


def gronwall_envelope_constant(times: np.ndarray, h_norms: np.ndarray,
                               L: float) -> float:
    """Smallest C with d/dt |u|^2 + |u|^2 <= C (L^2 + 1) along the samples.

    This is the differential inequality whose Gronwall integration yields
    the |u0|^2 e^{-t} + C (L^2 + 1) envelope, so a C fitted this way on one
    trajectory is the natural constant to test other trajectories against.
    The envelope form of the same fit would be exceeded by a few percent at
    smaller L, where the attractor norm per unit L is slightly larger.
    """
    t = np.asarray(times)
    sq = np.asarray(h_norms) ** 2
    dsq = np.gradient(sq, t)
    return float(np.max(dsq + sq) / (L * L + 1.0))


def norm_envelope(times: np.ndarray, h_norms: np.ndarray) -> tuple[float, float]:
    """(decay rate, plateau) fit of the squared-norm envelope.

    Plateau is the tail mean of |u|^2; the rate comes from the log-linear
    fit of the excess above the plateau while it stays resolvable.
    """
    t = np.asarray(times)
    sq = np.asarray(h_norms) ** 2
    tail = sq[t >= 0.5 * t[-1]]
    plateau = float(np.mean(tail)) if len(tail) else float(np.mean(sq))
    excess = sq - plateau
    usable = excess > max(0.05 * abs(plateau), 1e-12)
    if np.sum(usable[: max(2, len(t) // 2)]) < 2:
        return float("nan"), plateau
    cut = np.argmin(usable[: len(t)]) if not usable.all() else len(t)
    cut = max(int(cut), 2)
    coeff = np.polyfit(t[:cut], np.log(excess[:cut].clip(1e-300)), 1)
    return float(-coeff[0]), plateau


# -- traveling waves of the rescaled long-wave system ------------------


@dataclass
class WaveRecord:
    eps: float
    c: float
    profile: SpectralField
    residual: float


def wave_residual_array(a: float, eps: float, coeffs: np.ndarray,
                        c: float) -> np.ndarray:
    """Stationary moving-frame residual
    eps(-v'''' - a v'') + v v' + v''' + c v' per mode."""
    truncation = (coeffs.shape[-1] - 1) // 2
    n = mode_numbers(truncation).astype(float)
    lin = eps * (-n ** 4 + a * n ** 2) - 1j * n ** 3 + 1j * c * n
    sq = dealiased_product_array([coeffs, coeffs], [False, False])
    return lin * coeffs + derivative_array(sq, 1) * 0.5


def _wave_pack(coeffs: np.ndarray, c: float, truncation: int) -> np.ndarray:
    pos = coeffs[truncation + 1:]
    out = np.empty(2 * truncation + 1)
    out[0:-1:2] = pos.real
    out[1:-1:2] = pos.imag
    out[-1] = c
    return out


def _wave_unpack(x: np.ndarray, truncation: int) -> tuple[np.ndarray, float]:
    pos = x[0:-1:2] + 1j * x[1:-1:2]
    coeffs = np.zeros(2 * truncation + 1, dtype=np.complex128)
    coeffs[truncation + 1:] = pos
    coeffs[:truncation] = np.conj(pos[::-1])
    return coeffs, float(x[-1])


def _wave_system(a: float, eps: float, x: np.ndarray,
                 truncation: int) -> np.ndarray:
    coeffs, c = _wave_unpack(x, truncation)
    g = wave_residual_array(a, eps, coeffs, c)
    pos = g[truncation + 1:]
    out = np.empty(2 * truncation + 1)
    out[0:-1:2] = pos.real
    out[1:-1:2] = pos.imag
    out[-1] = x[1]  # pin Im v_1 = 0 to kill the translation family
    return out


def _wave_jacobian(a: float, eps: float, x: np.ndarray,
                   truncation: int) -> np.ndarray:
    coeffs, c = _wave_unpack(x, truncation)
    n = mode_numbers(truncation).astype(float)
    lin = eps * (-n ** 4 + a * n ** 2) - 1j * n ** 3 + 1j * c * n
    dim = 2 * truncation + 1
    jac = np.empty((dim, dim))
    for col in range(dim):
        e = np.zeros(dim)
        e[col] = 1.0
        dv, dc = _wave_unpack(e, truncation)
        prod = dealiased_product_array([coeffs, dv], [False, False])
        dg = lin * dv + derivative_array(prod, 1) + dc * 1j * n * coeffs
        pos = dg[truncation + 1:]
        jac[0:-1:2, col] = pos.real
        jac[1:-1:2, col] = pos.imag
        jac[-1, col] = e[1]
    return jac


def _newton_wave(a: float, eps: float, x0: np.ndarray, truncation: int,
                 tol: float = 1e-12, max_iter: int = 80) -> np.ndarray | None:
    x = x0.copy()
    fx = _wave_system(a, eps, x, truncation)
    for _ in range(max_iter):
        nrm = np.linalg.norm(fx)
        if nrm < tol:
            return x
        try:
            step = np.linalg.solve(_wave_jacobian(a, eps, x, truncation), fx)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(10):
            x_new = x - lam * step
            f_new = _wave_system(a, eps, x_new, truncation)
            if np.linalg.norm(f_new) < nrm:
                x, fx = x_new, f_new
                break
            lam *= 0.5
        else:
            return None
    return x if np.linalg.norm(fx) < tol else None


def _wave_attempt(a: float, eps: float, guess, truncation: int) -> WaveRecord | None:
    """One warm or cold Newton attempt; None if it misses or lands on zero."""
    starts = []
    if guess is not None:
        prof, c0 = guess
        coeffs = prof.coeffs if prof.truncation == truncation \
            else _reinterp(prof, truncation)
        starts.append(_wave_pack(coeffs, c0, truncation))
    for amp in (4.0, 2.0, 6.0, 1.0, 8.0, 3.0):
        x0 = np.zeros(2 * truncation + 1)
        x0[0] = 0.5 * amp  # Re v_1, speed near the first-mode linear speed
        x0[-1] = 1.0
        starts.append(x0)
    for x0 in starts:
        x = _newton_wave(a, eps, x0, truncation)
        if x is None:
            continue
        rec = _wave_record(a, eps, x, truncation)
        if rec.residual < 1e-10 and hs_norm_array(rec.profile.coeffs, 0.0) > 0.1:
            return rec
    return None


def traveling_wave(a: float, eps: float, guess: tuple[SpectralField, float] | None = None,
                   truncation: int = 48) -> WaveRecord:
    """Newton solve for a rotating-wave profile and its speed.

    Cold starts try single-harmonic profiles with speed near the linear
    wave speed; if none converges to a nontrivial wave the solver walks
    down in eps from a more dissipative regime where the amplitude
    selection is stiffer.
    """
    rec = _wave_attempt(a, eps, guess, truncation)
    if rec is not None:
        return rec
    eps_path = []
    e = max(eps, 0.25)
    while e > eps * 1.0001:
        eps_path.append(e)
        e /= 1.5
    eps_path.append(eps)
    for e in eps_path:
        g = None if rec is None else (rec.profile, rec.c)
        rec = _wave_attempt(a, e, g, truncation)
        if rec is None:
            raise RuntimeError(f"no traveling wave found at eps = {eps}")
    return rec


def _reinterp(prof: SpectralField, truncation: int) -> np.ndarray:
    out = np.zeros(2 * truncation + 1, dtype=np.complex128)
    m = min(prof.truncation, truncation)
    src = prof.coeffs[prof.truncation - m: prof.truncation + m + 1]
    out[truncation - m: truncation + m + 1] = src
    return out


def _wave_record(a: float, eps: float, x: np.ndarray,
                 truncation: int) -> WaveRecord:
    coeffs, c = _wave_unpack(x, truncation)
    profile = SpectralField(coeffs, truncation, reality_flag=True,
                            zero_mean_flag=True)
    res = float(hs_norm_array(wave_residual_array(a, eps, coeffs, c), 0.0))
    return WaveRecord(float(eps), c, profile, res)


def wave_continuation(a: float, eps_list: list[float],
                      truncation: int = 48) -> list[WaveRecord]:
    """Solve along decreasing eps, warm-starting from the previous wave."""
    records: list[WaveRecord] = []
    for eps in eps_list:
        guess = None if not records else (records[-1].profile, records[-1].c)
        records.append(traveling_wave(a, eps, guess, truncation))
    return records


# -- largest Lyapunov exponent ----------------------------------------


def largest_lyapunov_exponent(rhs, x0: np.ndarray, T: float, h: float,
                              renorm_every: int = 10, d0: float = 1e-7,
                              warmup_fraction: float = 0.25) -> float:
    """Two-trajectory separation-rate estimate.

    A companion trajectory offset by d0 is renormalized back to distance
    d0 every ``renorm_every`` steps; log growth factors accumulated after
    the warmup window average to the top exponent.
    """
    x = np.array(x0, dtype=float)
    direction = np.ones_like(x) / math.sqrt(x.size)
    v = x + d0 * direction
    n_steps = int(round(T / h))
    warmup_steps = int(warmup_fraction * n_steps)
    acc = 0.0
    t_acc = 0.0
    for k in range(n_steps):
        t = k * h
        x = rk4_step(rhs, t, h, x)
        v = rk4_step(rhs, t, h, v)
        if (k + 1) % renorm_every == 0:
            diff = v - x
            dist = float(np.linalg.norm(diff))
            if dist == 0.0:
                dist = 1e-300
                diff = d0 * direction
            if k + 1 > warmup_steps:
                acc += math.log(dist / d0)
                t_acc += renorm_every * h
            v = x + (d0 / dist) * diff
    if t_acc == 0.0:
        raise ValueError("no accumulation window; lengthen T or shrink warmup")
    return acc / t_acc


def ode3_exponent(beta: float, gamma: float, omega: float,
                  x0: np.ndarray | None = None, burn: float = 200.0,
                  T: float = 400.0, h: float = 0.01) -> float:
    """Top exponent of the polar reduction after a transient burn-in."""
    rhs = lambda t, y: rhs_ode3_array(beta, gamma, omega, y)
    y = np.array([0.4, 0.2, 1.0] if x0 is None else x0, dtype=float)
    n_burn = int(round(burn / h))
    for k in range(n_burn):
        y = rk4_step(rhs, k * h, h, y)
        if not np.all(np.isfinite(y)):
            raise BlowUpError((k + 1) * h)
    return largest_lyapunov_exponent(rhs, y, T, h)


def find_ode3_equilibrium(beta: float, gamma: float, omega: float,
                          guess: np.ndarray, tol: float = 1e-13,
                          max_iter: int = 100) -> tuple[ODE3State, float]:
    """Damped Newton with finite-difference Jacobian on the 3d vector field."""
    y = np.array(guess, dtype=float)
    for _ in range(max_iter):
        f = rhs_ode3_array(beta, gamma, omega, y)
        nrm = float(np.linalg.norm(f))
        if nrm < tol:
            break
        jac = ode3_jacobian(beta, gamma, omega, y)
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _ in range(12):
            y_new = y - lam * step
            if np.linalg.norm(rhs_ode3_array(beta, gamma, omega, y_new)) < nrm:
                y = y_new
                break
            lam *= 0.5
        else:
            y = y - step
    res = float(np.linalg.norm(rhs_ode3_array(beta, gamma, omega, y)))
    return ODE3State.from_array(y), res


def ode3_jacobian(beta: float, gamma: float, omega: float,
                  y: np.ndarray, delta: float = 1e-7) -> np.ndarray:
    jac = np.empty((3, 3))
    for col in range(3):
        e = np.zeros(3)
        e[col] = delta
        fp = rhs_ode3_array(beta, gamma, omega, y + e)
        fm = rhs_ode3_array(beta, gamma, omega, y - e)
        jac[:, col] = (fp - fm) / (2.0 * delta)
    return jac


# -- invariant-subspace checks ----------------------------------------


@dataclass
class HdReport:
    leak_max: float
    final_moduli: dict[int, float]
    decayed: bool


def hd_invariance_check(beta: complex, omega: float, D: int, T: float,
                        h: float = 0.01, seed: int = 0) -> HdReport:
    """Averaged second-family flow and the invariant subspace H_D.

    Static part: the full RHS of a field supported in |n| <= D, stored at
    truncation 2D, must have exactly zero coefficients beyond D.  Dynamic
    part: from random data with modes up to 2D, every mode with
    n^2 > Re(beta) must fall below 1e-8 by time T.
    """
    truncation = 2 * D
    model = ModelSpec.gl2(Frame.AVERAGED, beta, omega, L=1.0)
    rng = member_rng(seed, 0)
    inner = random_field(D, rng)
    coeffs = np.zeros(2 * truncation + 1, dtype=np.complex128)
    coeffs[truncation - D: truncation + D + 1] = inner.coeffs
    rhs = linear_symbol(model, truncation) * coeffs \
        + nonlinear_rhs_array(model, 0.0, coeffs)
    outside = np.concatenate([rhs[: truncation - D], rhs[truncation + D + 1:]])
    leak = float(np.max(np.abs(outside))) if outside.size else 0.0

    w0 = random_field(truncation, member_rng(seed, 1))
    cfg = SimConfig(truncation=truncation, h=h, horizon=T,
                    sample_every=max(1, int(round(T / h))))
    log = integrate(model, cfg, w0)
    n = mode_numbers(truncation)
    finals = {int(k): float(abs(log.final[i])) for i, k in enumerate(n)}
    decayed = all(finals[int(k)] <= 1e-8 for k in n
                  if k * k > np.real(beta))
    return HdReport(leak, finals, decayed)


# -- reduced-flow convergence -----------------------------------------


@dataclass
class GradientRunReport:
    member: int
    nearest_support: tuple[int, ...]
    distance: float
    lyapunov_monotone: bool
    max_uptick: float
    fd_identity_ok: bool
    fd_worst: float


def gradient_convergence_experiment(alpha: float, D: int, n_runs: int,
                                    T: float, h: float = 0.02,
                                    seed: int = 0) -> list[GradientRunReport]:
    """Random reduced-flow runs classified against the equilibrium list.

    Each run reports the nearest modulus pattern at the final time, whether
    the Lyapunov functional was nonincreasing (per-step uptick under 1e-8),
    and whether the centered-difference dL/dt matches -2 sum |v_dot|^2 to
    5 percent away from equilibria.
    """
    records = enumerate_equilibria(alpha, D)
    patterns = [(rec, rec.modulus_vector(D)) for rec in records]
    model = ModelSpec.gl2_reduced(alpha, D)
    reports = []
    for member in range(n_runs):
        rng = member_rng(seed, member)
        w0 = random_field(D, rng, scale=0.8)
        cfg = SimConfig(truncation=D, h=h, horizon=T, sample_every=1,
                        snapshot_every=1)
        log = integrate(model, cfg, w0)
        final_mod = np.abs(log.final)
        dists = [float(np.linalg.norm(final_mod - p)) for _, p in patterns]
        best = int(np.argmin(dists))
        upticks = np.diff(log.lyapunov)
        max_uptick = float(np.max(upticks)) if len(upticks) else 0.0
        fd_ok, fd_worst = _fd_gradient_identity(model, log)
        reports.append(GradientRunReport(
            member, patterns[best][0].support, dists[best],
            max_uptick <= 1e-8, max_uptick, fd_ok, fd_worst))
    return reports


def _fd_gradient_identity(model: ModelSpec, log: TrajectoryLog,
                          speed_floor: float = 0.05,
                          rel_tol: float = 0.05) -> tuple[bool, float]:
    lam = linear_symbol(model, model.D)
    worst = 0.0
    times = log.times
    for i in range(1, len(times) - 1):
        v = log.snapshots[i]
        vdot = lam * v + nonlinear_rhs_array(model, times[i], v)
        speed_sq = float(np.sum(np.abs(vdot) ** 2))
        if speed_sq < speed_floor ** 2:
            continue
        fd = (log.lyapunov[i + 1] - log.lyapunov[i - 1]) \
            / (times[i + 1] - times[i - 1])
        exact = -2.0 * speed_sq
        worst = max(worst, abs(fd - exact) / abs(exact))
    return worst <= rel_tol, worst
