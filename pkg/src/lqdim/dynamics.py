"""Shift and skew-product dynamics driving the construction.

The base is the left shift on rule sequences.  The fiber is either the unit
circle (projection dynamics: each step multiplies by e^{-i*alpha}, i.e. the
angle decreases by the rule's rotation) or a beta-circle [-beta, beta) with
endpoint identification (convolution dynamics: each step consumes r symbols
and adds a positive increment, wrapping at beta).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .ifs import TWO_PI


@dataclass(frozen=True)
class SkewState:
    """Position in the base sequence plus a fiber coordinate.

    ``beta=None`` selects the unit circle (fiber is an angle in [0, 2*pi));
    otherwise the fiber lives in [-beta, beta).
    """

    base_position: int
    fiber: float
    beta: float = None

    def __post_init__(self):
        if self.beta is None:
            object.__setattr__(self, "fiber", self.fiber % TWO_PI)
        else:
            object.__setattr__(self, "fiber", wrap_beta(self.fiber, self.beta))


def wrap_beta(x, beta):
    """Reduce into [-beta, beta) with the endpoints identified."""
    return (x + beta) % (2.0 * beta) - beta


def skew_step(rs, omega, state, steps, scheme=None):
    """Advance the skew product ``steps`` times from the given state.

    On the circle each step consumes one symbol and rotates the fiber by
    minus the rule's angle.  In beta mode (``state.beta`` set) each step
    consumes ``scheme.r`` symbols and adds the block increment
    ln(b / (a_{i1} ... a_{ir})).
    """
    pos = state.base_position
    if state.beta is None:
        if pos + steps > len(omega.symbols):
            raise InvalidInputError("rule prefix exhausted by skew orbit")
        total = sum(rs.rule(s).rotation for s in omega.symbols[pos : pos + steps])
        return SkewState(pos + steps, (state.fiber - total) % TWO_PI)
    if scheme is None:
        raise InvalidInputError("beta-mode stepping needs a convolution scheme")
    r = scheme.r
    if pos + steps * r > len(omega.symbols):
        raise InvalidInputError("rule prefix exhausted by skew orbit")
    fiber = state.fiber
    for k in range(steps):
        block = omega.symbols[pos + k * r : pos + (k + 1) * r]
        fiber = wrap_beta(fiber + scheme.alpha(block), state.beta)
    return SkewState(pos + steps * r, fiber, state.beta)


def circle_orbit(rs, omega, start_fiber, n):
    """Fibers after steps 1..n of the circle skew product (vectorized)."""
    if n > len(omega.symbols):
        raise InvalidInputError("rule prefix exhausted by skew orbit")
    alphas = np.array([rs.rule(s).rotation for s in omega.symbols[:n]])
    return (start_fiber - np.cumsum(alphas)) % TWO_PI


def rotation_total(rs, omega, n):
    """Summed rotation angle of the first n rules (not reduced mod 2*pi)."""
    return float(sum(rs.rule(s).rotation for s in omega.symbols[:n]))


def normalization_level(rs, omega, n):
    """The unique L with 2^-L <= product of the first n scales < 2^(1-L)."""
    if n > len(omega.symbols):
        raise InvalidInputError("n exceeds the available prefix")
    s = sum(math.log2(rs.rule(sym).scale) for sym in omega.symbols[:n])
    return max(0, math.ceil(-s))


def normalization_levels(rs, omega, n_max):
    """Vector of L_n for n = 1..n_max."""
    if n_max > len(omega.symbols):
        raise InvalidInputError("n exceeds the available prefix")
    logs = np.array([math.log2(rs.rule(s).scale) for s in omega.symbols[:n_max]])
    return np.maximum(0, np.ceil(-np.cumsum(logs)).astype(np.int64))


def required_depth(rs, omega, level):
    """Smallest depth whose matched level reaches the requested level."""
    s = 0.0
    for n, sym in enumerate(omega.symbols, start=1):
        s += math.log2(rs.rule(sym).scale)
        if math.ceil(-s) >= level:
            return n
    raise InvalidInputError(
        f"prefix of length {len(omega.symbols)} too short to reach level {level}"
    )


def lyapunov_constant(rs, weights):
    """Expected log2 contraction per step: sum r_i log2(scale_i); negative."""
    w = np.asarray(weights, dtype=float)
    scales = np.array([r.scale for r in rs.rules])
    return float(np.sum(w * np.log2(scales)))


def genericity_test(omega, weights, cylinder_depth=1):
    """Max deviation of empirical cylinder frequencies from the product law.

    Small values indicate the prefix looks generic for the Bernoulli measure
    with the given weights.
    """
    w = np.asarray(weights, dtype=float)
    n_sym = len(w)
    d = cylinder_depth
    seq = np.asarray(omega.symbols, dtype=np.int64) - 1
    if d < 1 or d > len(seq):
        raise InvalidInputError("cylinder depth must be in 1..len(prefix)")
    windows = np.lib.stride_tricks.sliding_window_view(seq, d)
    codes = windows @ (n_sym ** np.arange(d - 1, -1, -1)).astype(np.int64)
    counts = np.bincount(codes, minlength=n_sym**d)
    emp = counts / windows.shape[0]
    masses = np.ones(1)
    for _ in range(d):
        masses = (masses[:, None] * w[None, :]).ravel()
    return float(np.max(np.abs(emp - masses)))


def birkhoff_average(rs, omega, f, start_fiber, n, beta=None, scheme=None):
    """Average of f over the first n skew-orbit states.

    ``f(symbols, fibers)`` must accept aligned numpy arrays: the first symbol
    of the shifted base sequence and the fiber coordinate at each visited
    state.  Needs a prefix of length n+1 (base symbol of the last state).
    """
    if len(omega.symbols) < n + 1:
        raise InvalidInputError("prefix must exceed the orbit length by one")
    if beta is None:
        fibers = circle_orbit(rs, omega, start_fiber, n)
    else:
        if scheme is None:
            raise InvalidInputError("beta-mode averages need a convolution scheme")
        incs = scheme.block_increments(omega, n)
        fibers = wrap_beta(start_fiber + np.cumsum(incs), beta)
    base_syms = np.asarray(omega.symbols[1 : n + 1], dtype=np.int64)
    values = np.asarray(f(base_syms, fibers), dtype=float)
    return float(values.mean())


def fiber_equidistribution(rs, omega, n, starts):
    """Heuristic ergodicity diagnostic: sup-distance of fiber orbits from
    the uniform law on the circle, maximized over starting fibers.

    This is evidence, not proof; ergodicity of the skew product is a model
    hypothesis.
    """
    worst = 0.0
    for g in starts:
        orbit = np.sort(circle_orbit(rs, omega, float(g), n)) / TWO_PI
        k = orbit.size
        grid = np.arange(1, k + 1) / k
        dev = float(np.max(np.abs(orbit - grid + 0.5 / k)) + 0.5 / k)
        worst = max(worst, dev)
    return worst


def rational_approximation(x, max_q=10**6, depth=40, tol=1e-12):
    """Best small-denominator rational near x via continued fractions.

    Returns (p, q) with |x - p/q| < tol and q <= max_q, or None when x looks
    irrational at this resolution.
    """
    frac = Fraction(x).limit_denominator(max_q)
    # continued-fraction convergents of the float, capped in depth
    a = x
    num0, den0, num1, den1 = 0, 1, 1, 0
    for _ in range(depth):
        ai = math.floor(a)
        num0, num1 = num1, ai * num1 + num0
        den0, den1 = den1, ai * den1 + den0
        if den1 > max_q:
            break
        if abs(x - num1 / den1) < tol:
            return (num1, den1)
        rem = a - ai
        if rem == 0:
            break
        a = 1.0 / rem
    if abs(x - float(frac)) < tol and frac.denominator <= max_q:
        return (frac.numerator, frac.denominator)
    return None


def ergodicity_sufficient(rs, weights):
    """Hard-coded sufficient condition for Bernoulli driving on the circle:
    some rotation alpha_i with positive weight has alpha_i/pi irrational."""
    w = np.asarray(weights, dtype=float)
    for wi, rule in zip(w, rs.rules):
        if wi > 0.0 and rule.rotation != 0.0:
            if rational_approximation(rule.rotation / math.pi) is None:
                return True
    return False
