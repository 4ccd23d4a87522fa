"""CSV / text / JSON emitters for trial reports and search surfaces."""
import csv
import io
import json
import math

import numpy as np

REPORT_HEADER = ("method", "mean", "std", "trials")
SURFACE_HEADER = ("lambda", "alpha", "loss")
TRIAL_HEADER = (
    "method", "trial", "seed", "lambda", "alpha", "metric",
    "selection_loss", "status", "uses_test_labels", "seconds", "error",
)


def _num(v):
    """Shortest repr that round-trips exactly."""
    return repr(float(v))


def summarize(reports):
    """Per-method ``(method, mean, std, trials)`` over successful trials.

    Methods appear in first-seen order.  ``std`` is the population (ddof=0)
    standard deviation; ``trials`` counts successful trials only.
    """
    order, values = [], {}
    for r in reports:
        if r.method not in values:
            order.append(r.method)
            values[r.method] = []
        if r.ok:
            values[r.method].append(r.metric)
    rows = []
    for m in order:
        v = np.asarray(values[m], dtype=float)
        if v.size:
            rows.append((m, float(v.mean()), float(v.std()), int(v.size)))
        else:
            rows.append((m, math.nan, math.nan, 0))
    return rows


def report_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for m, mean, std, n in summarize(reports):
        w.writerow((m, _num(mean), _num(std), n))
    return buf.getvalue()


def report_table(reports, metric_name="metric"):
    rows = summarize(reports)
    leaky = {r.method for r in reports if r.uses_test_labels}
    width = max(len(m) + (1 if m in leaky else 0) for m, *_ in rows)
    lines = [f"{'method':<{width}}  {metric_name:>12}  {'std':>10}  trials"]
    for m, mean, std, n in rows:
        label = m + ("*" if m in leaky else "")
        lines.append(f"{label:<{width}}  {mean:>12.4f}  {std:>10.4f}  {n:>6d}")
    if leaky:
        lines.append("")
        lines.append("* lambda chosen by linear search on TEST labels (reference baseline)")
    return "\n".join(lines) + "\n"


def emit_report(reports, path, fmt="csv", metric_name="metric"):
    """Write the per-method summary; ``fmt`` is ``"csv"`` or ``"table"``."""
    if not reports:
        raise ValueError("no reports to emit")
    text = report_csv(reports) if fmt == "csv" else report_table(reports, metric_name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def emit_trials(reports, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_HEADER)
        for r in reports:
            w.writerow((
                r.method, r.trial, r.seed, _num(r.lam), _num(r.alpha), _num(r.metric),
                _num(r.selection_loss), r.status, int(r.uses_test_labels),
                f"{r.seconds:.6f}", r.error,
            ))
    return path


def emit_surface(surface, lambdas, alphas, path):
    """Rows ``lambda,alpha,loss``, lambda-major; exact float round trip."""
    surface = np.asarray(surface, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if surface.shape != (lambdas.size, alphas.size):
        raise ValueError(
            f"surface shape {surface.shape} does not match a {lambdas.size}x{alphas.size} grid"
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SURFACE_HEADER)
        for i, lam in enumerate(lambdas):
            for j, alpha in enumerate(alphas):
                w.writerow((_num(lam), _num(alpha), _num(surface[i, j])))
    return path


def read_surface(path):
    """Inverse of :func:`emit_surface`: ``(lambdas, alphas, surface)``."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != SURFACE_HEADER:
        raise ValueError(f"{path}: missing header {','.join(SURFACE_HEADER)}")
    vals = np.array([[float(c) for c in row] for row in rows[1:]])
    lambdas = list(dict.fromkeys(vals[:, 0]))
    alphas = list(dict.fromkeys(vals[:, 1]))
    surface = vals[:, 2].reshape(len(lambdas), len(alphas))
    return np.array(lambdas), np.array(alphas), surface


def emit_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return path
