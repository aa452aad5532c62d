"""Numerical tools for nonlocal-diffusion free-boundary problems on the half-line.

Submodules: ``model`` (kernels, reactions, model data), ``nonlocal_ops``
(quadrature and convolution), ``spectral`` (principal eigenvalues and
critical lengths), ``steady`` (steady states), ``semiwave`` (semi-wave
speeds), ``fbp_sim`` (time stepping) and ``classify`` (verdicts, thresholds
and sweeps).
"""

from .model import (InitialData, Kernel, ModelError, ModelSpec, Reaction, make_initial,
                    make_kernel, make_reaction, make_reaction_logistic, predprey_model,
                    scalar_model, validate_spec)
from .spectral import critical_length, lambda_p, model_critical_length
from .steady import steady_halfline_U, steady_interval, steady_Uk
from .semiwave import solve_semiwave, solve_speed_pair_LV
from .fbp_sim import SimConfig, acceleration_probe, front_speed, run
from .classify import Outcome, critical_mu

__version__ = "0.1.0"
