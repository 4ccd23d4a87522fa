"""Importance-weighted cross-validation.

The candidate model is trained with the ``(lam, alpha)`` weights on the
training folds, and scored on the held-out fold with the *full* density
ratio ``p_te / p_tr``, which makes the validation loss an unbiased estimate
of the test risk.
"""
import numpy as np

from ..errors import FitError
from ..learners import fit, pointwise_loss
from ..weights import batch_weights


def fold_indices(n, folds, seed):
    """Shuffled, near-equal partition of ``range(n)`` into ``folds`` parts."""
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def iwcv_loss(train, dp, wp, learner, folds=5, seed=0):
    """Mean over folds of the density-ratio-weighted validation loss.

    Parameters
    ----------
    train : Dataset
        Labelled training split only.
    dp : DensityPair
    wp : WeightParams
        Weights used to *fit* each fold's model.
    learner : LearnerConfig
    folds : int
        At least 2 and at most ``train.n``.
    seed : int
        Fixes the fold assignment.
    """
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if train.n < folds:
        raise ValueError(f"{train.n} examples cannot fill {folds} folds")
    ratio = dp.ratio(train.X)
    weights = batch_weights(dp, train.X, wp)
    parts = fold_indices(train.n, folds, seed)
    losses = []
    for k, val in enumerate(parts):
        rest = np.concatenate([p for j, p in enumerate(parts) if j != k])
        fit_set = train.subset(rest)
        if train.task == "classification" and np.unique(fit_set.y).size < 2:
            raise FitError(f"fold {k}: training part contains a single class")
        model = fit(learner, fit_set, weights[rest])
        pred = model.decision_function(train.X[val])
        ell = pointwise_loss(train.task, pred, train.y[val])
        losses.append(float(np.mean(ratio[val] * ell)))
    return float(np.mean(losses))
