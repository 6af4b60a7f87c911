"""mzuq: spectral uncertainty quantification for the viscous Burgers
equation with Mori-Zwanzig reduced models and on-the-fly memory-length
estimation."""

from .chaos import (QuadratureRule, QuadTensor, TripleTensor,
                    gauss_legendre_rule, legendre_eval, quad_product_tensor,
                    triple_product_tensor)
from .config import ConfigError, RunConfig, parse_config
from .estimator import (AdaptiveResult, DegenerateEquation, EstimatorHistory,
                        NoRootInRange, SwitchReport, adaptive_run, epsilon,
                        memory_integral, record_sample, solve_y, t0_from_y)
from .reduction import (MemoryState, ReductionSpec, markovian_rhs,
                        memory_ode_rhs, petql_term, plql_kernel, project,
                        reduced_rhs)
from .spectral import (BurgersParams, PCField, build_initial_field, full_rhs,
                       truncated_convolution, wavenumbers)
from .stats import (StatSample, mean_energy, mean_gradient, var_energy,
                    var_gradient)
from .stepping import IntegrationFailure, StepperConfig, evolve, heun_step

__version__ = "0.1.0"
