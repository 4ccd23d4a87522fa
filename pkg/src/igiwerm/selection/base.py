from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..weights import WeightParams


@dataclass(frozen=True)
class SearchBox:
    """Rectangle of admissible ``(lam, alpha)``; the default alpha span runs
    from the mixture mean (-1) to the harmonic mean (3)."""

    lambda_range: tuple = (0.0, 1.0)
    alpha_range: tuple = (-1.0, 3.0)

    def __post_init__(self):
        lo, hi = map(float, self.lambda_range)
        alo, ahi = map(float, self.alpha_range)
        if not (0.0 <= lo < hi <= 1.0):
            raise DomainError(f"lambda range must be a nondegenerate subset of [0, 1], got {self.lambda_range}")
        if not (np.isfinite(alo) and np.isfinite(ahi) and alo < ahi):
            raise DomainError(f"alpha range must be finite and nondegenerate, got {self.alpha_range}")
        object.__setattr__(self, "lambda_range", (lo, hi))
        object.__setattr__(self, "alpha_range", (alo, ahi))

    def to_unit(self, lam, alpha):
        lo, hi = self.lambda_range
        alo, ahi = self.alpha_range
        return np.array([(lam - lo) / (hi - lo), (alpha - alo) / (ahi - alo)])

    def from_unit(self, u):
        lo, hi = self.lambda_range
        alo, ahi = self.alpha_range
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        return WeightParams(lo + u[0] * (hi - lo), alo + u[1] * (ahi - alo))

    def lambdas(self, n):
        return np.linspace(*self.lambda_range, n)

    def alphas(self, n):
        return np.linspace(*self.alpha_range, n)

    def to_dict(self):
        return {"lambda": list(self.lambda_range), "alpha": list(self.alpha_range)}


@dataclass
class SelectionResult:
    best_params: WeightParams
    best_loss: float
    history: list = field(default_factory=list)

    @property
    def evaluations(self):
        return len(self.history)

    def to_dict(self):
        return {
            "best": self.best_params.as_dict(),
            "best_loss": _json_float(self.best_loss),
            "evaluations": self.evaluations,
            "history": [
                dict(wp.as_dict(), loss=_json_float(loss)) for wp, loss in self.history
            ],
        }


def _json_float(v):
    v = float(v)
    return v if np.isfinite(v) else None


def best_of(history):
    """First minimizer over a history of ``(WeightParams, loss)``; +inf
    entries never win unless everything failed."""
    best_i = None
    for i, (_, loss) in enumerate(history):
        if best_i is None or loss < history[best_i][1]:
            best_i = i
    return history[best_i]
