"""Scaling bookkeeping for convolutions of a random and a fixed Cantor measure.

Given random contraction ratios a_i and a deterministic ratio b, blocks of r
random steps are matched against single deterministic steps so that every
block increment ln(b / (a_{i1} ... a_{ir})) is strictly between 0 and
beta = ln(b^-l).  The induced dynamics is a skew product over the circle
[-beta, beta); crossing counts track how often the construction resynchronizes
the deterministic side by 2l extra steps.
"""

import math
import warnings
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .dynamics import rational_approximation, wrap_beta
from .errors import InvalidInputError, ResourceLimitError
from .measures import convolve_measures, rebin
from .spectrum import estimate_dimension


@dataclass(frozen=True)
class ConvolutionScheme:
    """The (a_i, b, r, l, beta, alpha) bookkeeping of one convolution pair."""

    random_scales: tuple
    deterministic_scale: float
    r: int
    l: int
    beta: float
    alphas: dict

    def __post_init__(self):
        a = tuple(float(x) for x in self.random_scales)
        b = self.deterministic_scale
        ratios = [b / x**self.r for x in a]
        if min(ratios) <= 1.0:
            raise InvalidInputError("r fails the lower scaling control")
        if max(ratios) >= b**-self.l:
            raise InvalidInputError("l fails the upper scaling control")
        for key, val in self.alphas.items():
            if not 0.0 < val < self.beta:
                raise InvalidInputError(
                    f"block increment for {key} outside (0, beta)"
                )
        object.__setattr__(self, "random_scales", a)

    def alpha(self, block):
        """Increment for one block of r random symbols (1-based)."""
        return self.alphas[tuple(int(s) for s in block)]

    def block_increments(self, omega, n):
        """Increments of the first n blocks of the driving sequence."""
        if self.r * n > len(omega.symbols):
            raise InvalidInputError("rule prefix exhausted by block dynamics")
        syms = omega.symbols
        return np.array(
            [self.alpha(syms[k * self.r : (k + 1) * self.r]) for k in range(n)]
        )


def select_scheme(random_scales, deterministic_scale, max_tuples=10**6):
    """Minimal r, then minimal l, satisfying both scaling controls."""
    a = tuple(float(x) for x in random_scales)
    b = float(deterministic_scale)
    if not all(0.0 < x < 1.0 for x in a) or not 0.0 < b < 1.0:
        raise InvalidInputError("all contraction ratios must lie in (0,1)")
    r = 1
    while min(b / x**r for x in a) <= 1.0:
        r += 1
    l = 1
    while max(b / x**r for x in a) >= b**-l:
        l += 1
    beta = -l * math.log(b)
    if len(a) ** r > max_tuples:
        raise ResourceLimitError(f"{len(a)}^{r} block increments exceed the cap")
    alphas = {}
    for block in iproduct(*[range(1, len(a) + 1) for _ in range(r)]):
        prod = math.prod(a[i - 1] for i in block)
        alphas[block] = math.log(b / prod)
    return ConvolutionScheme(a, b, r, l, beta, alphas)


def crossing_count(scheme, omega, n):
    """Number of steps k <= n whose rotation orbit from 0 wraps past beta."""
    incs = scheme.block_increments(omega, n)
    fiber = 0.0
    count = 0
    for inc in incs:
        if fiber + inc >= scheme.beta:
            count += 1
        fiber = wrap_beta(fiber + inc, scheme.beta)
    return count


def crossing_counts(scheme, omega, n):
    """Vectorized xi_1..xi_n (nondecreasing, steps in {0, 1})."""
    incs = scheme.block_increments(omega, n)
    unwrapped = np.cumsum(incs)
    wrapped = wrap_beta(unwrapped, scheme.beta)
    xi = np.rint((unwrapped - wrapped) / (2.0 * scheme.beta)).astype(np.int64)
    return xi


def fiber_orbit(scheme, omega, start, n):
    """Fiber coordinates after blocks 1..n, starting from ``start``."""
    incs = scheme.block_increments(omega, n)
    return wrap_beta(start + np.cumsum(incs), scheme.beta)


@dataclass(frozen=True)
class FamilyShape:
    """Word-pair bookkeeping for the W/Y/Z rectangle families."""

    which: str
    n: int
    random_word_len: int
    deterministic_word_len: int
    crossing_count: int
    width: float
    height: float

    @property
    def eccentricity(self):
        return self.height / self.width


_FAMILY_OFFSETS = {"W": 0, "Y": 1, "Z": -1}


def family_rectangles(scheme, omega, n, which):
    """Shape of the rectangles in family W, Y or Z at step n.

    Width is the product of the first r*n random ratios; the height advances
    the deterministic construction by n + 2l*(xi_n + shift) steps, keeping
    the eccentricity within one (W), or one shifted (Y/Z), beta-period.
    """
    which = which.upper()
    if which not in _FAMILY_OFFSETS:
        raise InvalidInputError("family must be one of W, Y, Z")
    if which == "Z" and n < 3 * scheme.l:
        raise InvalidInputError("family Z needs n >= 3l")
    xi = crossing_count(scheme, omega, n)
    shift = _FAMILY_OFFSETS[which]
    det_len = n + 2 * scheme.l * (xi + shift)
    syms = omega.symbols[: scheme.r * n]
    width = math.prod(scheme.random_scales[s - 1] for s in syms)
    height = width * math.exp(
        float(fiber_orbit(scheme, omega, 0.0, n)[-1]) - 2.0 * scheme.beta * shift
    )
    return FamilyShape(
        which=which,
        n=n,
        random_word_len=scheme.r * n,
        deterministic_word_len=det_len,
        crossing_count=xi,
        width=width,
        height=height,
    )


def log_ratio_rational(a, b):
    """Rational witness (p, q) for log a / log b, or None if it looks
    irrational (continued fractions to depth 40, |x - p/q| < 1e-12, q <= 1e6)."""
    return rational_approximation(math.log(a) / math.log(b))


def additivity_formula(nu_dim, theta_dim, a=None, b=None):
    """Closed-form dimension of the convolution: min of the sum and 1.

    Theorem-backed only when log a / log b is irrational; a rational-looking
    ratio triggers a warning.
    """
    if a is not None and b is not None:
        witness = log_ratio_rational(a, b)
        if witness is not None:
            warnings.warn(
                f"log a / log b looks rational ({witness[0]}/{witness[1]}); "
                "the additivity formula is not theorem-backed here"
            )
    return min(nu_dim + theta_dim, 1.0)


def scaling_grid(scheme, count):
    """Log-uniform grid of scalings covering one beta-period [e^-beta, e^beta)."""
    s = -scheme.beta + 2.0 * scheme.beta * np.arange(count) / count
    return np.exp(s)


def convolution_dimension_sweep(
    scheme,
    nu_builder,
    theta_builder,
    q,
    t_grid,
    level_window,
    closed_form=None,
    threads=None,
    factor_margin=6,
):
    """Estimate the convolution dimension for every scaling on the grid.

    ``nu_builder``/``theta_builder`` map a level to the discretized factor
    measure.  The factors are built ``factor_margin`` levels below the
    window top (so their granularity never saturates the window), each
    scaling is convolved at the window top and reaggregated downward, and
    the dimension is fitted across the window.  Returns (curves, summary).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < math.exp(-scheme.beta) - 1e-12) or np.any(
        t_grid >= math.exp(scheme.beta)
    ):
        raise InvalidInputError("t grid must lie within one beta-period")
    lo, hi = int(level_window[0]), int(level_window[1])
    nu = nu_builder(hi + factor_margin)
    theta = theta_builder(hi + factor_margin)

    def one(t):
        conv = convolve_measures(nu, theta, float(t), hi)
        return estimate_dimension(lambda L: rebin(conv, L), q, (lo, hi))

    if threads is not None and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            curves = list(pool.map(one, t_grid))
    else:
        curves = [one(t) for t in t_grid]

    dims = np.array([c.dimension for c in curves])
    summary = {
        "q": float(q),
        "dim_min": float(dims.min()),
        "dim_max": float(dims.max()),
        "spread": float(dims.max() - dims.min()),
    }
    if closed_form is not None:
        summary["closed_form"] = float(closed_form)
        summary["max_abs_err"] = float(np.max(np.abs(dims - closed_form)))
    return list(zip(t_grid.tolist(), curves)), summary


def sweep_to_csv(sweep, closed_form=None):
    """Rows t,q,dimension,residual,closed_form,abs_err."""
    lines = ["t,q,dimension,residual,closed_form,abs_err"]
    for t, curve in sweep:
        if closed_form is None:
            lines.append(f"{t:.17g},{curve.q:.17g},{curve.dimension:.17g},{curve.residual:.17g},,")
        else:
            err = abs(curve.dimension - closed_form)
            lines.append(
                f"{t:.17g},{curve.q:.17g},{curve.dimension:.17g},{curve.residual:.17g},"
                f"{closed_form:.17g},{err:.17g}"
            )
    return "\n".join(lines) + "\n"
