import logging

import numpy as np

from ..errors import IgiwermError
from .base import SearchBox, SelectionResult
from ..weights import WeightParams

log = logging.getLogger(__name__)


def grid_search(objective, box=None, n_lambda=11, n_alpha=11, executor=None):
    """Evaluate ``objective`` on every node of an evenly spaced grid.

    Returns the :class:`SelectionResult` and the ``(n_lambda, n_alpha)``
    loss surface (rows follow lambda).  Failed evaluations become ``+inf``
    cells.  Ties go to the smallest lambda, then the smallest alpha.
    ``executor`` (anything with a ``map`` method) may evaluate nodes
    concurrently; results are collected in grid order.
    """
    if n_lambda < 2 or n_alpha < 2:
        raise ValueError("grid needs at least 2 points per axis")
    box = box or SearchBox()
    nodes = [
        WeightParams(lam, alpha)
        for lam in box.lambdas(n_lambda)
        for alpha in box.alphas(n_alpha)
    ]

    def safe(wp):
        try:
            v = float(objective(wp))
        except (IgiwermError, np.linalg.LinAlgError, ValueError) as exc:
            log.debug("objective failed at %s: %s", wp, exc)
            return np.inf
        return v if np.isfinite(v) else np.inf

    mapper = executor.map if executor is not None else map
    losses = list(mapper(safe, nodes))
    history = list(zip(nodes, losses))
    surface = np.array(losses).reshape(n_lambda, n_alpha)
    best = int(np.argmin(surface.ravel()))  # first occurrence = smallest (lambda, alpha)
    return SelectionResult(nodes[best], losses[best], history), surface
