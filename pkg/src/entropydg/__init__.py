"""Entropy-rate corrected discontinuous Galerkin solver for the 1D Euler equations.

The scheme corrects the nodal DG time derivative, cell by cell, with a
positive conservative filter direction sized so that analytically
derived bounds on the entropy dissipation rate of exact weak solutions
are honored at every interface.
"""

from .dg import (ConservedState, Mesh1D, RhsBundle, discrete_total_entropy,
                 llf_flux, numerical_entropy_flux, semidiscrete_rhs)
from .element import (ReferenceElement, build_reference_element,
                      modal_truncate, truncation_matrix)
from .errors import (BracketFailureError, DegenerateSpeedsError,
                     InadmissibleStateError)
from .euler import (EulerParams, entropy_pair, entropy_variables, flux,
                    pressure, wave_speed_bounds)
from .filters import (FilterOperator, build_generator, find_positive_time,
                      heat_semigroup, mollifier_alpha, assemble_Q)
from .limiter import CorrectionReport, corrected_rhs, stable_ratio
from .predictor import (InterfacePrediction, dissipation_rate_bound,
                        hll_state, interface_prediction)
from .problems import ProblemConfig, make_config
from .reference import FvState, classical_lf_flux, fv_step, run_reference
from .runner import (RunOutput, convergence_study, entropy_comparison,
                     max_timestep_search, run_problem)
from .stepping import compute_dt, default_cfl, rk8_step, ssprk43_step

__version__ = "0.1.0"
