"""Dyadic moment sums, L^q dimension estimates, and box-count bounds.

All logarithms of moment sums are base 2: the dimension of a measure is the
least-squares slope of log2 sum(mass^q) against the dyadic level, divided by
-(q-1).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import required_depth
from .errors import InvalidInputError
from .measures import build_measure, project_measure, rebin


def correlation_sum(measure, q):
    """Moment sum over occupied cells: sum of mass^q, q > 1."""
    if q <= 1.0:
        raise InvalidInputError("correlation sums need q > 1")
    return float(np.sum(measure.masses**q))


def box_count(measure):
    """Number of occupied cells."""
    return measure.n_cells


def holder_box_lower_bound(measure, q):
    """Box-count lower bound C^(-1/(q-1)) implied by Hoelder's inequality.

    Requires a probability measure; the returned bound never exceeds the
    actual occupied-cell count.
    """
    if q <= 1.0:
        raise InvalidInputError("the bound needs q > 1")
    if abs(measure.total_mass - 1.0) > 1e-9:
        raise InvalidInputError("the bound applies to probability measures")
    c = correlation_sum(measure, q)
    bound = c ** (-1.0 / (q - 1.0))
    assert box_count(measure) >= bound
    return bound


@dataclass(frozen=True)
class SpectrumCurve:
    """Per-level moment-sum logs with the fitted dimension."""

    q: float
    levels: tuple
    log_cq: tuple
    slope: float
    dimension: float
    residual: float

    def rows(self):
        for level, log_cq in zip(self.levels, self.log_cq):
            yield (self.q, level, log_cq, self.slope, self.dimension, self.residual)


def estimate_dimension(builder, q, level_window):
    """Fit log2 C^q against the level over an inclusive window.

    ``builder(level)`` must return the measure discretized at that level.
    The dimension is slope / -(q-1); the residual is the largest absolute
    regression misfit.
    """
    lo, hi = int(level_window[0]), int(level_window[1])
    if hi - lo + 1 < 3:
        raise InvalidInputError("level window must span at least 3 levels")
    levels = np.arange(lo, hi + 1)
    logs = np.array([math.log2(correlation_sum(builder(L), q)) for L in levels])
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


def rebin_builder(rs, omega, level_max, depth_margin=3, direction=None):
    """Level-indexed builder backed by one deep traversal.

    Builds once at ``level_max`` with cylinders ``depth_margin`` levels finer
    than the cells, then answers coarser levels by exact reaggregation, so
    moment sums are monotone along the window.
    """
    depth = required_depth(rs, omega, level_max + depth_margin)
    if direction is None:
        deep = build_measure(rs, omega, depth, level_max)
    else:
        deep = project_measure(rs, omega, direction, depth, level_max)

    def builder(level):
        if level > level_max:
            raise InvalidInputError(f"builder capped at level {level_max}")
        return rebin(deep, level)

    return builder


# ---------------------------------------------------------------------------
# M-equivalent families


class FamilyUnionMismatch(ValueError):
    """The two families cover different parts of the window."""

    def __init__(self, witness):
        super().__init__(f"families cover different sets near {witness}")
        self.witness = witness


def _to_boxes(family):
    arr = np.asarray(family, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:  # intervals
        return arr[:, None, :]  # (n, 1 axis, lo/hi)
    if arr.ndim == 3 and arr.shape[1] in (1, 2) and arr.shape[2] == 2:
        return arr
    raise InvalidInputError("families must be lists of intervals or boxes")


def check_m_equivalence(family_a, family_b, window):
    """Smallest M for which the families are M-equivalent on the window.

    Families are lists of half-open intervals ``(lo, hi)`` or axis-aligned
    boxes ``((xlo, xhi), (ylo, yhi))``.  Both must cover the same subset of
    the window; otherwise ``FamilyUnionMismatch`` reports a witness cell.
    """
    a = _to_boxes(family_a)
    b = _to_boxes(family_b)
    if a.shape[1] != b.shape[1]:
        raise InvalidInputError("families must share one ambient dimension")
    window = np.asarray(window, dtype=float)
    if window.ndim == 1:
        window = window[None, :]

    # coordinate compression: elementary grid from all breakpoints per axis
    axes = []
    for ax in range(a.shape[1]):
        pts = np.concatenate(
            [a[:, ax, :].ravel(), b[:, ax, :].ravel(), window[ax]]
        )
        axes.append(np.unique(pts))

    def coverage(boxes):
        shape = tuple(len(ax) - 1 for ax in axes)
        cov = np.zeros(shape, dtype=bool)
        for box in boxes:
            sl = []
            for ax in range(len(axes)):
                i0 = np.searchsorted(axes[ax], box[ax, 0])
                i1 = np.searchsorted(axes[ax], box[ax, 1])
                sl.append(slice(i0, i1))
            cov[tuple(sl)] = True
        return cov

    def window_mask():
        shape = tuple(len(ax) - 1 for ax in axes)
        mask = np.ones(shape, dtype=bool)
        for ax in range(len(axes)):
            i0 = np.searchsorted(axes[ax], window[ax, 0])
            i1 = np.searchsorted(axes[ax], window[ax, 1])
            idx = np.zeros(len(axes[ax]) - 1, dtype=bool)
            idx[i0:i1] = True
            mask = mask & idx.reshape([-1 if k == ax else 1 for k in range(len(axes))])
        return mask

    cov_a = coverage(a)
    cov_b = coverage(b)
    inside = window_mask()
    diff = (cov_a ^ cov_b) & inside
    if np.any(diff):
        idx = np.argwhere(diff)[0]
        witness = tuple(
            (float(axes[ax][i]), float(axes[ax][i + 1])) for ax, i in enumerate(idx)
        )
        raise FamilyUnionMismatch(witness if len(witness) > 1 else witness[0])

    def max_overlap(xs, ys):
        worst = 0
        for box in xs:
            hit = np.ones(len(ys), dtype=bool)
            for ax in range(box.shape[0]):
                hit &= (ys[:, ax, 0] < box[ax, 1]) & (ys[:, ax, 1] > box[ax, 0])
            worst = max(worst, int(hit.sum()))
        return worst

    return max(max_overlap(a, b), max_overlap(b, a))


def m_equivalence_moment_bracket(m_const, family_a, family_b, cell_masses_a, cell_masses_b, q):
    """The moment-sum bracket implied by M-equivalence:
    M^(1-q) * sum_b <= sum_a <= M^(q-1) * sum_b."""
    sum_a = float(np.sum(np.asarray(cell_masses_a, dtype=float) ** q))
    sum_b = float(np.sum(np.asarray(cell_masses_b, dtype=float) ** q))
    lo = m_const ** (1.0 - q) * sum_b
    hi = m_const ** (q - 1.0) * sum_b
    return lo <= sum_a <= hi


# ---------------------------------------------------------------------------
# energy diagnostic


def energy_correlation_dimension(measure, s_grid):
    """Largest exponent on the grid with non-divergent discrete Riesz energy.

    The discrete double sum is always finite; an energy is declared divergent
    once it exceeds 1000 times the energy at the smallest grid exponent.
    Degenerate measures (fewer than two cells) return the grid minimum.
    Diagnostic cross-check of the correlation dimension only.
    """
    s_grid = np.sort(np.asarray(s_grid, dtype=float))
    if s_grid.size == 0:
        raise InvalidInputError("exponent grid is empty")
    if measure.n_cells < 2:
        warnings.warn("degenerate measure: no off-diagonal pairs")
        return float(s_grid[0])
    centers = measure.centers()
    if measure.ndim == 1:
        energies = _kernels.riesz_energy_1d(centers, measure.masses, s_grid)
    else:
        energies = _kernels.riesz_energy_2d(
            np.ascontiguousarray(centers), measure.masses, s_grid
        )
    finite = energies <= 1e3 * energies[0]
    if not np.any(finite):
        return float(s_grid[0])
    return float(s_grid[np.nonzero(finite)[0][-1]])


# ---------------------------------------------------------------------------
# CSV serialization


def spectrum_to_csv(curves):
    """Rows q,level,log2_cq,slope,dimension,residual for one or more curves."""
    if isinstance(curves, SpectrumCurve):
        curves = [curves]
    lines = ["q,level,log2_cq,slope,dimension,residual"]
    for curve in curves:
        for q, level, log_cq, slope, dim, res in curve.rows():
            lines.append(
                f"{q:.17g},{level},{log_cq:.17g},{slope:.17g},{dim:.17g},{res:.17g}"
            )
    return "\n".join(lines) + "\n"
