"""Batch experiment front end.

Subcommands map one to one onto the experiment drivers; every run writes
CSV artifacts plus a manifest into the output directory.  All options can
come from a flat key=value config file, with command-line flags taking
precedence and built-in defaults filling the rest.  Numeric output uses 17
significant digits so the CSVs round-trip doubles exactly, and all
randomness flows from the seed option, which makes equal manifests produce
byte-identical artifacts.

Exit codes: 0 success, 2 tolerance/assertion failure, 3 blow-up,
64 usage error, 66 unreadable config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import (attractor_norm_scan, averaging_rate_experiment,
                       enumerate_equilibria, gradient_convergence_experiment,
                       hd_invariance_check, member_rng, ode3_exponent,
                       smooth_profile, wave_continuation)
from .field import (SpectralField, hs_norm, inner_product, mode_numbers,
                    random_field)
from .groups import GroupKind, apply_group
from .models import Family, Frame, ModelSpec
from .nonlinear import (OscillatoryKind, averaged_k, averaged_m, averaged_n,
                        burgers_term, gl_cubic, oscillatory_eval,
                        quadrature_average, quadrature_points_required)
from .timestep import BlowUpError, integrate
from .trajectory import SimConfig

EXIT_OK = 0
EXIT_ASSERT = 2
EXIT_BLOWUP = 3
EXIT_USAGE = 64
EXIT_CONFIG = 66

ORACLE_TOL = 1e-10


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with the sysexits-style usage status.

    The negative-number matcher is widened so values like ``-0.5,0.5`` or
    ``-1+0.5j`` parse as option arguments instead of unknown flags.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(
            r"^-(?:\d+\.?\d*|\.\d+)[\d.,+\-eEjJ]*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# -- option plumbing ----------------------------------------------------


def _f(raw: str) -> float:
    return float(raw)


def _i(raw: str) -> int:
    return int(raw)


def _s(raw: str) -> str:
    return raw


def _c(raw: str) -> complex:
    return complex(raw.replace(" ", ""))


def _b(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw}")


def _floats(raw: str) -> list[float]:
    return [float(p) for p in raw.split(",") if p.strip()]


@dataclass
class Opt:
    name: str
    parse: object
    default: object
    help: str = ""

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


_COMMON = [
    Opt("out", _s, ".", "output directory"),
    Opt("config", _s, "", "key=value config file"),
    Opt("seed", _i, 0, "master seed"),
    Opt("threads", _i, 0, "worker pool size (0: env or all cores)"),
]


def _register(sub, name: str, opts: list[Opt], help_text: str):
    p = sub.add_parser(name, help=help_text)
    for opt in _COMMON + opts:
        p.add_argument(f"--{opt.name}", dest=opt.dest, default=None,
                       help=opt.help)
    p.set_defaults(_opts=_COMMON + opts, _name=name)
    return p


def _read_config(path: str) -> dict[str, str]:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _ConfigError(f"cannot read config {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        if "=" not in body:
            raise _ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = body.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(args: argparse.Namespace) -> dict[str, object]:
    """flags > config file > defaults, with shared converters."""
    opts: list[Opt] = args._opts
    flag_config = getattr(args, "config", None)
    config = _read_config(flag_config if flag_config is not None else "")
    out: dict[str, object] = {}
    for opt in opts:
        raw = getattr(args, opt.dest)
        source = "flag"
        if raw is None and opt.name in config:
            raw = config[opt.name]
            source = "config"
        if raw is None:
            out[opt.dest] = opt.default
            continue
        try:
            out[opt.dest] = opt.parse(raw)
        except (TypeError, ValueError) as exc:
            if source == "config":
                raise _ConfigError(
                    f"config value {opt.name}={raw!r}: {exc}") from exc
            raise _UsageError(f"invalid --{opt.name} {raw!r}: {exc}") from exc
    return out


class _UsageError(Exception):
    pass


# -- output helpers -----------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, complex):
        return "%.17g%+.17gj" % (value.real, value.imag)
    if isinstance(value, (list, tuple)):
        return "|".join(_fmt(v) for v in value)
    return str(value)


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(outdir: str, name: str, resolved: dict,
                    extra: dict | None = None) -> None:
    options = {k: _fmt(v) for k, v in sorted(resolved.items())
               if k not in ("out", "config")}
    digest = hashlib.sha256()
    digest.update(name.encode())
    for key, value in sorted(options.items()):
        digest.update(f"{key}={value}\n".encode())
    manifest = {
        "subcommand": name,
        "config": resolved.get("config", ""),
        "out": resolved.get("out", "."),
        "seed": resolved.get("seed", 0),
        "run_id": digest.hexdigest()[:12],
        "options": options,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(outdir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(resolved: dict) -> str:
    path = str(resolved["out"])
    os.makedirs(path, exist_ok=True)
    return path


def _write_modes_csv(path: str, coeffs: np.ndarray) -> None:
    truncation = (len(coeffs) - 1) // 2
    rows = [(int(n), float(c.real), float(c.imag))
            for n, c in zip(mode_numbers(truncation), coeffs)]
    _write_csv(path, "n,re,im", rows)


# -- oracle suite -------------------------------------------------------


def _oracle_rows(seed: int) -> list[tuple[str, float]]:
    rows = []
    w3 = random_field(3, member_rng(seed, 0))
    # real with a mean mode, so the advective average is not trivially zero
    u3 = random_field(3, member_rng(seed, 1), reality=True)

    for label, kind, field, closed in (
            ("cubic-airy-average", OscillatoryKind.CUBIC_AIRY, w3,
             averaged_n(w3)),
            ("cubic-schrodinger-average", OscillatoryKind.CUBIC_SCHRODINGER,
             w3, averaged_m(w3)),
            ("advective-airy-average", OscillatoryKind.BURGERS_AIRY, u3,
             averaged_k(u3))):
        points = quadrature_points_required(kind, field.truncation) + 1
        quad = quadrature_average(kind, field, points)
        rows.append((label, float(np.max(np.abs(closed.coeffs
                                                - quad.coeffs)))))

    w16 = random_field(16, member_rng(seed, 2))
    comp_err = 0.0
    iso_err = 0.0
    t, s = 0.8125, 2.140625
    for kind in (GroupKind.AIRY, GroupKind.SCHRODINGER):
        two = apply_group(kind, 1.0, t, apply_group(kind, 1.0, s, w16))
        one = apply_group(kind, 1.0, t + s, w16)
        comp_err = max(comp_err,
                       float(np.max(np.abs(two.coeffs - one.coeffs))))
        moved = apply_group(kind, 1.0, t, w16)
        for order in (0.0, 1.0, 2.0):
            iso_err = max(iso_err, abs(hs_norm(moved, order)
                                       - hs_norm(w16, order)))
    rows.append(("group-composition", comp_err))
    rows.append(("group-isometry", iso_err))

    osc_err = 0.0
    for kind, field, plain in (
            (OscillatoryKind.CUBIC_AIRY, w3, gl_cubic(w3)),
            (OscillatoryKind.CUBIC_SCHRODINGER, w3, gl_cubic(w3)),
            (OscillatoryKind.BURGERS_AIRY, u3, burgers_term(u3))):
        out = oscillatory_eval(kind, 0.0, field)
        osc_err = max(osc_err,
                      float(np.max(np.abs(out.coeffs - plain.coeffs))))
    rows.append(("oscillatory-at-zero", osc_err))

    # Re (N(w), w) >= |w|^4 for both cubic averages; record the worst defect
    defect = 0.0
    for k in range(8):
        w = random_field(3, member_rng(seed, 3, k))
        nsq = hs_norm(w, 0.0) ** 2
        for closed in (averaged_n, averaged_m):
            ip = inner_product(closed(w), w)
            defect = max(defect, nsq * nsq - ip.real, abs(ip.imag))
    rows.append(("cubic-average-dissipativity", defect))
    return rows


def _cmd_oracle_check(resolved: dict) -> int:
    outdir = _outdir(resolved)
    rows = _oracle_rows(int(resolved["seed"]))
    _write_csv(os.path.join(outdir, "oracle.csv"), "operator,max_error", rows)
    _write_manifest(outdir, "oracle-check", resolved)
    bad = [(name, err) for name, err in rows if not err <= ORACLE_TOL]
    for name, err in bad:
        print(f"oracle-check: {name} error {err:.3e} exceeds {ORACLE_TOL:.1e}",
              file=sys.stderr)
    return EXIT_ASSERT if bad else EXIT_OK


# -- simulate -----------------------------------------------------------


_SIM_OPTS = [
    Opt("model", _s, "gl1", "gl1|gl2|ks|kdv|gl2-reduced|ode3"),
    Opt("frame", _s, "physical", "physical|rotating|averaged"),
    Opt("beta", _c, 1.0 + 0.0j, "cubic instability parameter"),
    Opt("gamma", _f, 0.0, "phase diffusion"),
    Opt("omega", _f, 0.0, "cubic phase parameter"),
    Opt("a", _f, 2.0, "long-wave drive"),
    Opt("L", _f, 0.0, "dispersion strength"),
    Opt("eps", _f, 0.05, "slow-time parameter (kdv only)"),
    Opt("alpha", _f, 1.5, "reduced instability parameter"),
    Opt("D", _i, 0, "reduced truncation (0: derived from alpha)"),
    Opt("nonlin-scale", _f, 1.0, "nonlinearity multiplier"),
    Opt("truncation", _i, 32, "spectral truncation"),
    Opt("amplitude", _f, 0.5, "initial profile amplitude"),
    Opt("h", _f, 0.01, "time step"),
    Opt("T", _f, 1.0, "horizon"),
    Opt("sample-every", _i, 1, "steps between norm samples"),
    Opt("snapshot-every", _i, 0, "steps between snapshots (0: never)"),
    Opt("r0", _f, 0.4, "initial r (ode3 only)"),
    Opt("rho0", _f, 0.2, "initial rho (ode3 only)"),
    Opt("eta0", _f, 1.0, "initial eta (ode3 only)"),
]


def _build_model(resolved: dict) -> ModelSpec:
    name = str(resolved["model"])
    frame = {"physical": Frame.PHYSICAL, "rotating": Frame.ROTATING,
             "averaged": Frame.AVERAGED}.get(str(resolved["frame"]))
    if frame is None:
        raise _UsageError(f"unknown frame {resolved['frame']!r}")
    beta = complex(resolved["beta"])
    if name == "gl1":
        return ModelSpec.gl1(frame, beta, float(resolved["gamma"]),
                             float(resolved["omega"]), float(resolved["L"]),
                             float(resolved["nonlin_scale"]))
    if name == "gl2":
        return ModelSpec.gl2(frame, beta, float(resolved["omega"]),
                             float(resolved["L"]),
                             float(resolved["nonlin_scale"]))
    if name == "ks":
        return ModelSpec.ks(frame, float(resolved["a"]),
                            float(resolved["L"]),
                            float(resolved["nonlin_scale"]))
    if name == "kdv":
        return ModelSpec.kdv_rescaled(float(resolved["a"]),
                                      float(resolved["eps"]))
    if name == "gl2-reduced":
        D = int(resolved["D"])
        return ModelSpec.gl2_reduced(float(resolved["alpha"]),
                                     D if D > 0 else None)
    if name == "ode3":
        return ModelSpec.ode3(beta.real, float(resolved["gamma"]),
                              float(resolved["omega"]))
    raise _UsageError(f"unknown model {name!r}")


def _initial_state(model: ModelSpec, resolved: dict):
    seed = int(resolved["seed"])
    amplitude = float(resolved["amplitude"])
    if model.family is Family.ODE3:
        return np.array([float(resolved["r0"]), float(resolved["rho0"]),
                         float(resolved["eta0"])])
    if model.family is Family.GL2_REDUCED:
        return smooth_profile(model.D, amplitude, seed=seed)
    real = model.family in (Family.KS, Family.KDV_RESCALED)
    return smooth_profile(int(resolved["truncation"]), amplitude, seed=seed,
                          real=real, zero_mean=real)


def _trajectory_rows(log) -> list:
    return list(zip(log.times, log.h_norm, log.h1_norm, log.lyapunov))


def _write_trajectory(outdir: str, log) -> None:
    _write_csv(os.path.join(outdir, "trajectory.csv"),
               "t,h_norm,h1_norm,lyapunov", _trajectory_rows(log))
    if log.snapshots:
        index = []
        for k, (t, snap) in enumerate(zip(log.snapshot_times, log.snapshots)):
            name = f"snapshot_{k:03d}.csv"
            _write_modes_csv(os.path.join(outdir, name), np.asarray(snap))
            index.append((k, float(t), name))
        _write_csv(os.path.join(outdir, "snapshots.csv"), "k,t,file", index)


def _cmd_simulate(resolved: dict) -> int:
    outdir = _outdir(resolved)
    model = _build_model(resolved)
    state = _initial_state(model, resolved)
    truncation = state.truncation if isinstance(state, SpectralField) \
        else int(resolved["truncation"])
    cfg = SimConfig(truncation=truncation, h=float(resolved["h"]),
                    horizon=float(resolved["T"]),
                    sample_every=int(resolved["sample_every"]),
                    snapshot_every=int(resolved["snapshot_every"]),
                    seed=int(resolved["seed"]))
    try:
        log = integrate(model, cfg, state)
    except BlowUpError as err:
        if err.log is not None:
            _write_trajectory(outdir, err.log)
        _write_manifest(outdir, "simulate", resolved,
                        {"status": "blowup", "blowup_t": _fmt(err.t)})
        print(f"simulate: {err}", file=sys.stderr)
        return EXIT_BLOWUP
    _write_trajectory(outdir, log)
    _write_manifest(outdir, "simulate", resolved, {"status": "ok"})
    return EXIT_OK


# -- averaging rate -----------------------------------------------------


_RATE_OPTS = [
    Opt("family", _s, "gl2", "gl1|gl2|ks"),
    Opt("beta", _c, 1.0 + 0.5j, "cubic instability parameter"),
    Opt("gamma", _f, 0.5, "phase diffusion (gl1)"),
    Opt("omega", _f, 1.0, "cubic phase parameter"),
    Opt("a", _f, 2.0, "long-wave drive (ks)"),
    Opt("truncation", _i, 32, "spectral truncation"),
    Opt("amplitude", _f, 0.5, "initial profile amplitude"),
    Opt("T", _f, 1.0, "comparison horizon"),
    Opt("l-values", _floats, [50.0, 100.0, 200.0, 400.0], "dispersion list"),
    Opt("resolve", _i, 4, "highest oscillating mode resolved"),
    Opt("nonlin-scale", _f, 1.0, "nonlinearity multiplier"),
]

_FAMILIES = {"gl1": Family.GL1, "gl2": Family.GL2, "ks": Family.KS}


def _cmd_averaging_rate(resolved: dict) -> int:
    outdir = _outdir(resolved)
    family = _FAMILIES.get(str(resolved["family"]))
    if family is None:
        raise _UsageError(f"unknown family {resolved['family']!r}")
    real = family is Family.KS
    w0 = smooth_profile(int(resolved["truncation"]),
                        float(resolved["amplitude"]),
                        seed=int(resolved["seed"]), real=real,
                        zero_mean=real)
    result = averaging_rate_experiment(
        family, complex(resolved["beta"]), float(resolved["gamma"]),
        float(resolved["omega"]), w0, float(resolved["T"]),
        list(resolved["l_values"]),
        nonlin_scale=float(resolved["nonlin_scale"]),
        a=float(resolved["a"]), resolve=int(resolved["resolve"]))
    _write_csv(os.path.join(outdir, "rate.csv"), "L,eps,err_h1", result.rows)
    summary = [("family", str(resolved["family"])),
               ("slope", result.slope),
               ("intercept", result.intercept),
               ("T", float(resolved["T"])),
               ("amplitude", float(resolved["amplitude"])),
               ("resolve", int(resolved["resolve"]))]
    _write_csv(os.path.join(outdir, "rate_summary.csv"), "key,value", summary)
    _write_manifest(outdir, "averaging-rate", resolved)
    return EXIT_OK


# -- attractor scan -----------------------------------------------------


_SCAN_OPTS = [
    Opt("family", _s, "ks", "gl1|gl2|ks"),
    Opt("beta", _c, 2.0 + 0.0j, "cubic instability parameter"),
    Opt("gamma", _f, 2.0, "phase diffusion (gl1)"),
    Opt("omega", _f, -2.0, "cubic phase parameter"),
    Opt("a", _f, 2.0, "long-wave drive (ks)"),
    Opt("l-values", _floats, [10.0, 20.0, 40.0, 80.0], "dispersion list"),
    Opt("ensemble", _i, 8, "members per dispersion value"),
    Opt("T", _f, 200.0, "horizon"),
    Opt("burn-in", _f, 100.0, "transient discarded from statistics"),
    Opt("truncation", _i, 64, "spectral truncation"),
    Opt("h-cap", _f, 0.002, "largest allowed step"),
    Opt("h-over-l", _f, 0.08, "step budget: h = min(cap, this / L)"),
]


def _cmd_attractor_scan(resolved: dict) -> int:
    outdir = _outdir(resolved)
    family = _FAMILIES.get(str(resolved["family"]))
    if family is None:
        raise _UsageError(f"unknown family {resolved['family']!r}")
    beta = complex(resolved["beta"])
    gamma = float(resolved["gamma"])
    omega = float(resolved["omega"])
    a = float(resolved["a"])

    def model_for_l(L: float) -> ModelSpec:
        if family is Family.GL1:
            return ModelSpec.gl1(Frame.PHYSICAL, beta, gamma, omega, L)
        if family is Family.GL2:
            return ModelSpec.gl2(Frame.PHYSICAL, beta, omega, L)
        return ModelSpec.ks(Frame.PHYSICAL, a, L)

    cap = float(resolved["h_cap"])
    budget = float(resolved["h_over_l"])

    def h_for_l(L: float) -> float:
        return min(cap, budget / L) if L > 0 else cap

    threads = int(resolved["threads"]) or None
    result = attractor_norm_scan(
        model_for_l, list(resolved["l_values"]), int(resolved["ensemble"]),
        float(resolved["T"]), float(resolved["burn_in"]),
        int(resolved["truncation"]), h_for_l, seed=int(resolved["seed"]),
        real_fields=family is Family.KS, threads=threads)
    _write_csv(os.path.join(outdir, "scan.csv"), "L,seed,stat",
               [(L, member, stat) for L, member, stat in result.rows])
    summary = [("family", str(resolved["family"])),
               ("slope", result.slope),
               ("ensemble", int(resolved["ensemble"])),
               ("T", float(resolved["T"])),
               ("burn_in", float(resolved["burn_in"])),
               ("blowups", len(result.blowups))]
    for L in result.per_l_max:
        summary.append((f"max_stat_L={_fmt(L)}", result.per_l_max[L]))
    _write_csv(os.path.join(outdir, "scan_summary.csv"), "key,value", summary)
    _write_manifest(outdir, "attractor-scan", resolved)
    if any(math.isnan(v) for v in result.per_l_max.values()):
        print("attractor-scan: some dispersion values lost every member "
              "to blow-up", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


# -- equilibria ---------------------------------------------------------


_EQ_OPTS = [
    Opt("alpha", _f, 1.5, "instability parameter"),
    Opt("D", _i, 2, "mode range |n| <= D"),
]


def _cmd_equilibria(resolved: dict) -> int:
    outdir = _outdir(resolved)
    records = enumerate_equilibria(float(resolved["alpha"]),
                                   int(resolved["D"]))
    rows = [(list(rec.support), rec.n0, rec.n2, rec.norm_sq, rec.stable,
             rec.hyperbolic) for rec in records]
    _write_csv(os.path.join(outdir, "equilibria.csv"),
               "support,n0,n2,norm_sq,stable,hyperbolic", rows)
    _write_manifest(outdir, "equilibria", resolved)
    return EXIT_OK


# -- gradient runs ------------------------------------------------------


_GRAD_OPTS = [
    Opt("alpha", _f, 1.5, "instability parameter"),
    Opt("D", _i, 2, "mode range |n| <= D"),
    Opt("runs", _i, 20, "ensemble size"),
    Opt("T", _f, 200.0, "horizon"),
    Opt("h", _f, 0.02, "time step"),
]


def _cmd_gradient_run(resolved: dict) -> int:
    outdir = _outdir(resolved)
    reports = gradient_convergence_experiment(
        float(resolved["alpha"]), int(resolved["D"]), int(resolved["runs"]),
        float(resolved["T"]), h=float(resolved["h"]),
        seed=int(resolved["seed"]))
    rows = [(rep.member, list(rep.nearest_support), rep.distance,
             rep.lyapunov_monotone, rep.max_uptick, rep.fd_identity_ok,
             rep.fd_worst) for rep in reports]
    _write_csv(os.path.join(outdir, "gradient.csv"),
               "member,support,distance,monotone,max_uptick,fd_ok,fd_worst",
               rows)
    _write_manifest(outdir, "gradient-run", resolved)
    bad = [rep for rep in reports
           if not (rep.lyapunov_monotone and rep.fd_identity_ok)]
    for rep in bad:
        print(f"gradient-run: member {rep.member} violated the descent "
              f"checks", file=sys.stderr)
    return EXIT_ASSERT if bad else EXIT_OK


# -- traveling waves ----------------------------------------------------


_WAVE_OPTS = [
    Opt("a", _f, 2.0, "long-wave drive"),
    Opt("eps-values", _floats, [0.05, 0.025, 0.0125], "continuation path"),
    Opt("truncation", _i, 48, "spectral truncation"),
    Opt("residual-tol", _f, 1e-10, "acceptable stationary residual"),
]


def _cmd_wave(resolved: dict) -> int:
    outdir = _outdir(resolved)
    records = wave_continuation(float(resolved["a"]),
                                list(resolved["eps_values"]),
                                truncation=int(resolved["truncation"]))
    rows = [(rec.eps, rec.c, rec.residual) for rec in records]
    _write_csv(os.path.join(outdir, "wave.csv"), "eps,c,residual", rows)
    for k, rec in enumerate(records):
        _write_modes_csv(os.path.join(outdir, f"wave_profile_{k:03d}.csv"),
                         rec.profile.coeffs)
    _write_manifest(outdir, "wave", resolved)
    tol = float(resolved["residual_tol"])
    bad = [rec for rec in records if not rec.residual <= tol]
    for rec in bad:
        print(f"wave: eps {rec.eps:g} residual {rec.residual:.3e} exceeds "
              f"{tol:.1e}", file=sys.stderr)
    return EXIT_ASSERT if bad else EXIT_OK


# -- polar exponent scan ------------------------------------------------


_ODE3_OPTS = [
    Opt("beta-values", _floats, [1.0], "instability grid"),
    Opt("gamma-values", _floats, [-0.5, 0.0, 0.5], "drift grid"),
    Opt("omega-values", _floats, [0.5], "phase grid"),
    Opt("burn", _f, 100.0, "transient before estimation"),
    Opt("T", _f, 200.0, "estimation window"),
    Opt("h", _f, 0.01, "time step"),
]


def _cmd_ode3_scan(resolved: dict) -> int:
    outdir = _outdir(resolved)
    rows = []
    for beta in resolved["beta_values"]:
        for gamma in resolved["gamma_values"]:
            for omega in resolved["omega_values"]:
                try:
                    lam = ode3_exponent(beta, gamma, omega,
                                        burn=float(resolved["burn"]),
                                        T=float(resolved["T"]),
                                        h=float(resolved["h"]))
                except BlowUpError:
                    lam = float("nan")
                rows.append((beta, gamma, omega, lam))
    _write_csv(os.path.join(outdir, "ode3.csv"), "beta,gamma,omega,lambda1",
               rows)
    _write_manifest(outdir, "ode3-scan", resolved)
    return EXIT_OK


# -- invariant subspace check -------------------------------------------


_HD_OPTS = [
    Opt("beta", _c, 1.5 + 0.0j, "cubic instability parameter"),
    Opt("omega", _f, 0.7, "cubic phase parameter"),
    Opt("D", _i, 2, "subspace mode bound"),
    Opt("T", _f, 50.0, "horizon for the decay check"),
    Opt("h", _f, 0.01, "time step"),
]


def _cmd_hd_check(resolved: dict) -> int:
    outdir = _outdir(resolved)
    report = hd_invariance_check(complex(resolved["beta"]),
                                 float(resolved["omega"]),
                                 int(resolved["D"]), float(resolved["T"]),
                                 h=float(resolved["h"]),
                                 seed=int(resolved["seed"]))
    mode_rows = sorted(report.final_moduli.items())
    _write_csv(os.path.join(outdir, "hd_modes.csv"), "n,final_modulus",
               mode_rows)
    summary = [("leak_max", report.leak_max),
               ("decayed", report.decayed),
               ("beta", complex(resolved["beta"])),
               ("omega", float(resolved["omega"])),
               ("D", int(resolved["D"])),
               ("T", float(resolved["T"]))]
    _write_csv(os.path.join(outdir, "hd_summary.csv"), "key,value", summary)
    _write_manifest(outdir, "hd-check", resolved)
    if report.leak_max > 0.0 or not report.decayed:
        print(f"hd-check: leak {report.leak_max:.3e}, "
              f"decayed={report.decayed}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


# -- dispatch -----------------------------------------------------------


_COMMANDS = {
    "oracle-check": (_cmd_oracle_check, [],
                     "closed forms against quadrature and group laws"),
    "simulate": (_cmd_simulate, _SIM_OPTS, "single trajectory of any model"),
    "averaging-rate": (_cmd_averaging_rate, _RATE_OPTS,
                       "rotating vs averaged distance across dispersion"),
    "attractor-scan": (_cmd_attractor_scan, _SCAN_OPTS,
                       "ensemble norm statistic across dispersion"),
    "equilibria": (_cmd_equilibria, _EQ_OPTS,
                   "modulus patterns of the reduced flow"),
    "gradient-run": (_cmd_gradient_run, _GRAD_OPTS,
                     "reduced-flow convergence classification"),
    "wave": (_cmd_wave, _WAVE_OPTS, "traveling-wave continuation"),
    "ode3-scan": (_cmd_ode3_scan, _ODE3_OPTS,
                  "top-exponent map of the polar reduction"),
    "hd-check": (_cmd_hd_check, _HD_OPTS,
                 "invariant-subspace leak and decay check"),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="displab",
                     description="dispersion-averaging simulation lab")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, opts, help_text) in _COMMANDS.items():
        _register(sub, name, opts, help_text)
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help; map everything else to usage
        code = exc.code if exc.code in (0, EXIT_USAGE) else EXIT_USAGE
        return int(code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        resolved = _resolve(args)
        return _COMMANDS[args.command][0](resolved)
    except _ConfigError as exc:
        print(f"displab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _UsageError as exc:
        print(f"displab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlowUpError as exc:
        print(f"displab: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
