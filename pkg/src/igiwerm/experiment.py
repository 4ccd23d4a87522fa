"""Trial orchestration: build a shifted train/test pair, run every weighting
method on it, score each on the test split.

Methods
-------
erm           unit weights
iwerm         full density ratio
aiwerm        ``r ** lam``; lam picked by linear search on *test* loss
riwerm        relative ratio; lam picked by linear search on *test* loss
igiwerm-bopt  (lam, alpha) by Bayesian optimization of the IWCV loss
igiwerm-grid  (lam, alpha) by grid search of the IWCV loss
igiwerm-ic    (lam, alpha) minimizing the information criterion on a grid

The aiwerm/riwerm searches deliberately read test labels (they are the
"optimal" reference baselines); the igiwerm selectors only ever see the
training split and the density pair.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import Dataset, load_libsvm
from .errors import ConfigError, FitError, IgiwermError
from .learners import LearnerConfig, fit, fit_weighted_logistic, metric
from .selection import (
    LOGISTIC,
    SearchBox,
    bayes_opt,
    grid_search,
    ic_gw_general,
    ic_gw_linear,
    iwcv_loss,
)
from .shift import (
    DEFAULT_GAIN,
    density_pair_from_spec,
    induce_shift,
    random_projection,
    synth_regression,
    zscore_standardize,
)
from .weights import ERM, IWERM, WeightParams, batch_weights

log = logging.getLogger(__name__)

METHODS = ("erm", "iwerm", "aiwerm", "riwerm", "igiwerm-bopt", "igiwerm-ic", "igiwerm-grid")
USES_TEST_LABELS = frozenset({"aiwerm", "riwerm"})


@dataclass
class ExperimentConfig:
    source: str = "synth"
    methods: tuple = ("erm", "iwerm", "aiwerm", "riwerm", "igiwerm-bopt", "igiwerm-ic")
    trials: int = 10
    seed: int = 0
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    box: SearchBox = field(default_factory=SearchBox)
    folds: int = 5
    n_init: int = 5
    n_iter: int = 20
    grid: tuple = (11, 11)
    baseline_points: int = 21
    n_tr: int = 1000
    n_te: int = 300
    gain: float = DEFAULT_GAIN
    task: str = "auto"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.methods, str):
            self.methods = tuple(m.strip() for m in self.methods.split(",") if m.strip())
        self.methods = tuple(self.methods)
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.n_init < 2 or self.n_iter < 0:
            raise ConfigError("need n_init >= 2 and n_iter >= 0")
        if len(self.grid) != 2 or min(self.grid) < 2:
            raise ConfigError("grid must be two counts >= 2")
        self.grid = tuple(int(g) for g in self.grid)
        if self.baseline_points < 2:
            raise ConfigError("baseline_points must be at least 2")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            if "learner" in d and not isinstance(d["learner"], LearnerConfig):
                d["learner"] = LearnerConfig(**d["learner"])
            if "box" in d and not isinstance(d["box"], SearchBox):
                b = d["box"]
                d["box"] = SearchBox(tuple(b.get("lambda", (0.0, 1.0))), tuple(b.get("alpha", (-1.0, 3.0))))
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self):
        d = asdict(self)
        d["methods"] = list(self.methods)
        d["box"] = self.box.to_dict()
        d["grid"] = list(self.grid)
        return d


@dataclass
class TrialReport:
    method: str
    trial: int
    seed: int
    lam: float = float("nan")
    alpha: float = float("nan")
    metric: float = float("nan")
    seconds: float = 0.0
    status: str = "ok"
    error: str = ""
    selection_loss: float = float("nan")
    uses_test_labels: bool = False

    @property
    def ok(self):
        return self.status == "ok"


@dataclass
class TrialData:
    """One realization of the shifted problem."""

    train: Dataset
    test: Dataset
    dp: object
    seed: int


def load_source(config):
    """The standardized pool for a file source (``None`` for ``synth``)."""
    if config.source == "synth":
        return None
    try:
        data = load_libsvm(config.source, task=config.task)
    except OSError as exc:
        raise ConfigError(f"cannot read {config.source}: {exc}") from None
    Z, mean, std = zscore_standardize(data.X)
    meta = dict(data.meta, standardize_mean=mean.tolist(), standardize_std=std.tolist())
    return Dataset(Z, data.y, data.task, meta)


def make_trial(config, trial, pool=None):
    seed = config.seed + trial
    if config.source == "synth":
        train, test, dp = synth_regression(config.n_tr, config.n_te, seed)
        return TrialData(train, test, dp, seed)
    if pool is None:
        pool = load_source(config)
    rng = np.random.default_rng(seed)
    w = random_projection(pool.d, rng)
    split = induce_shift(pool, w, int(rng.integers(2**63)), gain=config.gain)
    return TrialData(split.train, split.test, density_pair_from_spec(split.spec), seed)


def holdout_metric(learner, train, test, dp, wp):
    """Test metric of the model trained with ``wp`` weights (reads test labels)."""
    model = fit(learner, train, batch_weights(dp, train.X, wp))
    return metric(test.task, model.decision_function(test.X), test.y)


def iwcv_objective(config, td):
    def objective(wp):
        return iwcv_loss(td.train, td.dp, wp, config.learner, config.folds, td.seed)

    return objective


def ic_objective(config, td):
    """Information criterion as a function of ``WeightParams``."""
    kind = config.learner.kind
    if kind == "linear":
        return lambda wp: ic_gw_linear(td.train, td.dp, wp)
    if kind == "logistic":

        def objective(wp):
            w = batch_weights(td.dp, td.train.X, wp)
            model = fit_weighted_logistic(td.train, w / w.mean(), tol=1e-10, max_iter=config.learner.max_iter)
            theta = np.concatenate([[model.intercept], model.coefficients])
            return ic_gw_general(LOGISTIC, theta, td.train, td.dp, wp)

        return objective
    raise FitError(f"the information criterion needs a parametric likelihood; {kind!r} has none")


def _select(method, config, td):
    """Return ``(WeightParams, selection_loss)`` for one method."""
    if method == "erm":
        return ERM, float("nan")
    if method == "iwerm":
        return IWERM, float("nan")
    if method in ("aiwerm", "riwerm"):
        alpha = 1.0 if method == "aiwerm" else 3.0
        best = None
        for lam in np.linspace(0.0, 1.0, config.baseline_points):
            wp = WeightParams(lam, alpha)
            try:
                v = holdout_metric(config.learner, td.train, td.test, td.dp, wp)
            except IgiwermError:
                continue
            if best is None or v < best[1]:
                best = (wp, v)
        if best is None:
            raise FitError("every lambda on the linear search failed")
        return best
    if method == "igiwerm-bopt":
        res = bayes_opt(iwcv_objective(config, td), config.box, config.n_init, config.n_iter, td.seed)
    elif method == "igiwerm-grid":
        res, _ = grid_search(iwcv_objective(config, td), config.box, *config.grid)
    elif method == "igiwerm-ic":
        res, _ = grid_search(ic_objective(config, td), config.box, *config.grid)
    else:
        raise ConfigError(f"unknown method {method!r}")
    if not np.isfinite(res.best_loss):
        raise FitError("every candidate (lambda, alpha) failed")
    return res.best_params, res.best_loss


def run_method(method, config, td, trial):
    rep = TrialReport(method, trial, td.seed, uses_test_labels=method in USES_TEST_LABELS)
    t0 = time.perf_counter()
    try:
        wp, sel = _select(method, config, td)
        rep.lam, rep.alpha, rep.selection_loss = wp.lam, wp.alpha, float(sel)
        rep.metric = holdout_metric(config.learner, td.train, td.test, td.dp, wp)
        if not np.isfinite(rep.metric):
            raise FitError("non-finite test metric")
    except (IgiwermError, np.linalg.LinAlgError, ValueError) as exc:
        rep.status, rep.error = "failed", f"{type(exc).__name__}: {exc}"
        rep.metric = float("nan")
        log.warning("trial %d %s failed: %s", trial, method, exc)
    rep.seconds = time.perf_counter() - t0
    return rep


def run_trial(config, trial, pool=None):
    try:
        td = make_trial(config, trial, pool)
    except (IgiwermError, ValueError) as exc:
        log.warning("trial %d could not be built: %s", trial, exc)
        return [
            TrialReport(m, trial, config.seed + trial, status="failed", error=f"{type(exc).__name__}: {exc}",
                        uses_test_labels=m in USES_TEST_LABELS)
            for m in config.methods
        ]
    return [run_method(m, config, td, trial) for m in config.methods]


def _run_trial_star(args):
    return run_trial(*args)


def run_experiment(config, pool=None):
    """Run every trial; reports are ordered by trial, then method order.

    Trial ``k`` uses seed ``config.seed + k``.  With ``config.workers > 1``
    trials run in separate processes; the result order is unchanged.
    """
    if pool is None and config.source != "synth":
        pool = load_source(config)
    jobs = [(config, k, pool) for k in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            chunks = list(ex.map(_run_trial_star, jobs))
    else:
        chunks = [_run_trial_star(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]
