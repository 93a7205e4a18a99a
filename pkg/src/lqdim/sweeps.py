"""Dimension estimators along the matched-level subsequence, and the
direction / scaling sweeps built on them.

The moment sums of a construction are sampled at the dyadic levels L_n
matched to the step-n cylinder scale; the dimension is the regression slope
of log2 C^q against L_n over a window of steps, divided by -(q-1).  Sweeps
evaluate every direction (or scaling) on a grid, reusing one measure per
grid point and step for all q values.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .cocycle import unit_vector
from .dynamics import normalization_level
from .errors import InvalidInputError
from .ifs import TWO_PI
from .measures import build_measure, project_measure
from .spectrum import SpectrumCurve, correlation_sum


def _fit(levels, logs, q):
    levels = np.asarray(levels, dtype=float)
    logs = np.asarray(logs, dtype=float)
    slope, intercept = np.polyfit(levels, logs, 1)
    residual = float(np.max(np.abs(slope * levels + intercept - logs)))
    return SpectrumCurve(
        q=float(q),
        levels=tuple(int(L) for L in levels),
        log_cq=tuple(float(x) for x in logs),
        slope=float(slope),
        dimension=float(-slope / (q - 1.0)),
        residual=residual,
    )


def _window_steps(depth_window):
    lo, hi = int(depth_window[0]), int(depth_window[1])
    if hi - lo + 1 < 3:
        raise InvalidInputError("depth window must span at least 3 steps")
    return range(lo, hi + 1)


def matched_measures(rs, omega, depth_window, direction=None):
    """Measures at the matched level for every step in the window."""
    out = []
    for n in _window_steps(depth_window):
        level = normalization_level(rs, omega, n)
        if direction is None:
            out.append((level, build_measure(rs, omega, n, level)))
        else:
            out.append((level, project_measure(rs, omega, direction, n, level)))
    return out


def planar_dimension(rs, omega, q_values, depth_window):
    """Matched-level dimension curves of the planar measure, one per q."""
    pairs = matched_measures(rs, omega, depth_window)
    return [
        _fit([L for L, _ in pairs], [math.log2(correlation_sum(m, q)) for _, m in pairs], q)
        for q in np.atleast_1d(q_values)
    ]


def projected_dimension(rs, omega, angle, q_values, depth_window):
    """Matched-level dimension curves of one projection, one per q."""
    pairs = matched_measures(rs, omega, depth_window, direction=unit_vector(angle))
    return [
        _fit([L for L, _ in pairs], [math.log2(correlation_sum(m, q)) for _, m in pairs], q)
        for q in np.atleast_1d(q_values)
    ]


def direction_grid(count):
    return TWO_PI * np.arange(count) / count


def direction_sweep(rs, omega, q_values, depth_window, count, threads=None):
    """Projected dimension estimates over a uniform grid of directions.

    Returns (rows, summary) where rows are (angle, curve) pairs in grid
    order (all q values per angle) and the summary reports the spread and
    extremes per q.
    """
    angles = direction_grid(count)

    def one(angle):
        return projected_dimension(rs, omega, float(angle), q_values, depth_window)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_angle = list(pool.map(one, angles))
    else:
        per_angle = [one(a) for a in angles]

    rows = []
    for angle, curves in zip(angles, per_angle):
        for curve in curves:
            rows.append((float(angle), curve))
    summary = {}
    for j, q in enumerate(np.atleast_1d(q_values)):
        dims = np.array([curves[j].dimension for curves in per_angle])
        summary[float(q)] = {
            "dim_min": float(dims.min()),
            "dim_max": float(dims.max()),
            "spread": float(dims.max() - dims.min()),
        }
    return rows, summary


