"""Choosing ``(lam, alpha)``: validation loss, information criterion,
Bayesian optimization and grid search."""
from .base import SearchBox, SelectionResult
from .bayesopt import (
    GpState,
    bayes_opt,
    expected_improvement,
    gp_posterior,
    gp_posterior_batch,
    gp_update,
)
from .criterion import (
    GAUSSIAN_LINEAR,
    LOGISTIC,
    LikelihoodModel,
    fit_gaussian_linear,
    ic_gw_general,
    ic_gw_linear,
)
from .grid import grid_search
from .iwcv import iwcv_loss

__all__ = [
    "SearchBox",
    "SelectionResult",
    "GpState",
    "bayes_opt",
    "expected_improvement",
    "gp_posterior",
    "gp_posterior_batch",
    "gp_update",
    "GAUSSIAN_LINEAR",
    "LOGISTIC",
    "LikelihoodModel",
    "fit_gaussian_linear",
    "ic_gw_general",
    "ic_gw_linear",
    "grid_search",
    "iwcv_loss",
]
