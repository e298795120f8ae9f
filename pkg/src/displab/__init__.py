"""Spectral simulation lab for dissipative PDEs with large dispersion."""

from .field import (SpectralField, dealiased_product, derivative, embed,
                    hs_norm, inner_product, mode_numbers, padded_grid_size,
                    pairing, random_field)
from .groups import GroupKind, apply_group
from .nonlinear import (OscillatoryKind, averaged_k, averaged_m, averaged_n,
                        burgers_term, gl_cubic, oscillatory_eval,
                        quadrature_average, quadrature_points_required)
from .models import (Family, Frame, ModelSpec, ODE3State,
                     default_reduced_truncation, frame_transform,
                     linear_symbol, nonlinear_rhs, phase_reconstruction,
                     reduced_lyapunov, rhs_ode3, rhs_reduced_gl2,
                     rhs_rescaled_kdv)
from .timestep import (BlowUpError, Etdrk4, etdrk4_step, integrate,
                       phi_closed, phi_functions, phi_series, rk4_step,
                       rotating_step_limit)
from .trajectory import SimConfig, TrajectoryLog
from .analysis import (EquilibriumRecord, GradientRunReport, HdReport,
                       RateResult, ScanResult, WaveRecord,
                       attractor_norm_scan, averaging_rate_experiment,
                       dissipative_envelope_constant, enumerate_equilibria,
                       find_ode3_equilibrium, gradient_convergence_experiment,
                       gronwall_envelope_constant,
                       hd_invariance_check, largest_lyapunov_exponent,
                       linearization_spectrum, lyapunov_value, norm_envelope,
                       ode3_exponent, ode3_jacobian, smooth_profile,
                       traveling_wave, wave_continuation, worker_count)

__version__ = "0.1.0"
