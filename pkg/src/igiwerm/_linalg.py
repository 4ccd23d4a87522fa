import numpy as np
from scipy import linalg

from .errors import SingularMatrixError

JITTER_START = 1e-12
JITTER_STOP = 1e-6


def cholesky_jitter(A):
    """Lower Cholesky factor of a symmetric PSD matrix.

    Tries the bare matrix first, then adds ``c * trace(A)/n`` to the diagonal
    with ``c`` escalating by factors of 10 from 1e-12 to 1e-6.

    Returns
    -------
    L : ndarray
        Lower-triangular factor of ``A + jitter * I``.
    jitter : float
        The diagonal shift actually used (0.0 if none was needed).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    scale = np.trace(A) / n if n else 0.0
    if not np.isfinite(scale):
        raise SingularMatrixError("matrix has non-finite entries")
    if scale <= 0:
        scale = 1.0
    jitter = 0.0
    c = JITTER_START
    while True:
        try:
            L = linalg.cholesky(A + jitter * np.eye(n), lower=True)
            return L, jitter
        except linalg.LinAlgError:
            if c > JITTER_STOP * (1 + 1e-9):
                break
            jitter = c * scale
            c *= 10.0
    raise SingularMatrixError(
        f"matrix not positive definite even with jitter {JITTER_STOP:g}*trace/n"
    )


def cho_solve_lower(L, b):
    return linalg.cho_solve((L, True), b)


def spd_solve(A, b):
    L, _ = cholesky_jitter(A)
    return cho_solve_lower(L, b)
