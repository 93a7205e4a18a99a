"""Stock rule sets used in tests, benchmarks, and CLI examples."""

import math

import numpy as np

from .ifs import Rule, RuleSet


def lebesgue_rule():
    """Two half-scale maps tiling [0,1]; generates Lebesgue measure."""
    rule = Rule(0.5, 0.0, np.array([0.0, 0.5]), np.array([0.5, 0.5]))
    return RuleSet((rule,), ambient_dim=1)


def middle_thirds(probs=(0.5, 0.5)):
    """The classical middle-thirds construction on [0,1]."""
    rule = Rule(1.0 / 3.0, 0.0, np.array([0.0, 2.0 / 3.0]), np.asarray(probs, float))
    return RuleSet((rule,), ambient_dim=1)


def cantor(scale, probs=None):
    """Two-map Cantor rule on [0,1] with maps anchored at 0 and 1 - scale."""
    if probs is None:
        probs = (0.5, 0.5)
    rule = Rule(scale, 0.0, np.array([0.0, 1.0 - scale]), np.asarray(probs, float))
    return RuleSet((rule,), ambient_dim=1)


def four_corner(scale=0.2, rotation=1.0):
    """Four corner maps of a square of side 0.8, rotated by ``rotation``.

    Strongly separated for the default parameters; the attractor supports
    the uniform self-similar measure of dimension log 4 / -log(scale).
    """
    corners = np.array([[0.0, 0.0], [0.0, 0.8], [0.8, 0.0], [0.8, 0.8]])
    rule = Rule(scale, rotation, corners, np.full(4, 0.25))
    return RuleSet((rule,), ambient_dim=2, ball_radius=math.sqrt(2.0))


def two_rule_random():
    """Two planar rules (scales 1/4 and 1/3, one irrational rotation) with
    separated translations; driven fairly this has L^q dimension
    log 6 / log 12 for every q > 1."""
    rule1 = Rule(
        0.25,
        1.0,
        np.array([[-1.0, 0.0], [1.0, 0.0]]),
        np.array([0.5, 0.5]),
    )
    s = math.sqrt(3.0) / 2.0
    rule2 = Rule(
        1.0 / 3.0,
        0.0,
        np.array([[0.0, 1.0], [-s, -0.5], [s, -0.5]]),
        np.full(3, 1.0 / 3.0),
    )
    return RuleSet((rule1, rule2), ambient_dim=2, ball_radius=1.5)


PRESETS = {
    "lebesgue": lebesgue_rule,
    "middle-thirds": middle_thirds,
    "four-corner": four_corner,
    "two-rule-random": two_rule_random,
    "cantor-1-4": lambda: cantor(0.25),
    "cantor-1-3": lambda: cantor(1.0 / 3.0),
    "cantor-1-5-biased": lambda: cantor(0.2, probs=(0.9, 0.1)),
}
