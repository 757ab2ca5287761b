"""Random diffraction measures: simulation and bound verification.

Library layout:

* pointset     -- finite point configurations with certified minimal distance
* scatterers   -- per-site disorder (amplitudes, dislocations) and sampling
* observables  -- counter functions and their x-space transforms
* norms        -- discrete, oscillation and Sobolev-type norms + dominations
* correlation  -- autocorrelation functionals with exact disorder moments
* rates        -- universal constants and the tail rate functions
* experiments  -- enumeration / Monte Carlo verification harness
* cli          -- command-line front end writing reports, CSVs and figures
"""

from .pointset import PointSet, fibonacci_chain, hardcore_random, lattice, verify_min_distance
from .scatterers import (
    AmplitudeBounds,
    AmplitudeSpec,
    DislocationSpec,
    Sample,
    SiteDistribution,
    bounds_of,
    delta_of,
    sample,
)
from .observables import Observable, custom_observable, gaussian, intensity, numeric_derivative_norm
from .norms import (
    NormValue,
    check_norm_domination,
    check_seminorm_domination,
    gamma_delta_seminorm,
    gamma_norm,
    sobolev_d_norm,
    sobolev_norm,
)
from .correlation import (
    CenteredStats,
    CorrelationValue,
    autocorr_A,
    autocorr_B,
    centered_value,
    debye_waller_density,
    exact_mean_A,
    exact_mean_B,
    exact_variance,
    mean_density_B,
)
from .rates import (
    BoundForm,
    BoundInputs,
    OutOfRegimeError,
    RateParams,
    exp_tail_series,
    expansion_error_bound,
    laplace_gap_bound,
    ld_bound,
    log_remainder,
    recompute_constants,
    tail_rate,
    worst_case_rate,
)
from .experiments import (
    ExactDistribution,
    ExperimentReport,
    clt_experiment,
    enumerate_exact,
    mc_tail,
    verify_laplace_gap,
    verify_ld_bound,
    verify_variance_growth,
)

__version__ = "0.1.0"
