"""(lambda, alpha)-generalized importance weighting for covariate shift."""
from .data import Dataset, load_libsvm, parse_libsvm, serialize_libsvm
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    IgiwermError,
    ParseError,
    SeparationError,
    ShiftError,
    SingularMatrixError,
    SupportError,
)
from .geometry import alpha_divergence, alpha_geodesic_point, f_alpha, f_alpha_inv, f_interpolate
from .learners import LearnerConfig, fit
from .selection import SearchBox, SelectionResult, bayes_opt, grid_search, ic_gw_linear, iwcv_loss
from .shift import induce_shift, synth_regression, zscore_standardize
from .weights import ERM, IWERM, DensityPair, WeightParams, aiwerm, batch_weights, generalized_weight, riwerm

__version__ = "0.1.0"
