"""Homogeneous similarity rules, words, and cylinder geometry.

A rule is a finite family of contracting similarities sharing one scale and
one rotation; only the translations differ.  A rule set holds N rules plus
the ambient dimension and a reference set that the maps nest into: a closed
ball B[0, R] in the plane, or, for one-dimensional rule sets whose maps all
fix [0, 1], the unit interval itself.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidWordError

TWO_PI = 2.0 * math.pi
_PROB_TOL = 1e-12


def _as_points(translations, ambient_dim):
    arr = np.asarray(translations, dtype=float)
    if ambient_dim == 1:
        arr = arr.reshape(-1)
    else:
        arr = arr.reshape(-1, 2)
    return arr


@dataclass(frozen=True)
class Similarity:
    """One contracting map x -> scale * R(rotation) x + translation."""

    scale: float
    rotation: float
    translation: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise InvalidInputError(f"scale must lie in (0,1), got {self.scale}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.ndim(self.translation) == 0 or np.size(self.translation) == 1:
            return self.scale * x + float(np.ravel(self.translation)[0])
        return self.scale * (rotation_matrix(self.rotation) @ x) + self.translation


@dataclass(frozen=True)
class Rule:
    """A homogeneous IFS: k maps sharing scale and rotation, plus weights."""

    scale: float
    rotation: float
    translations: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise InvalidInputError(f"scale must lie in (0,1), got {self.scale}")
        object.__setattr__(
            self, "translations", np.atleast_1d(np.asarray(self.translations, float))
        )
        probs = np.asarray(self.probs, dtype=float)
        if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > _PROB_TOL:
            raise InvalidInputError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.k:
            raise InvalidInputError("probs length must match translations")

    @property
    def k(self):
        return self.translations.shape[0]

    def maps(self):
        return [
            Similarity(self.scale, self.rotation, self.translations[j])
            for j in range(self.k)
        ]


@dataclass(frozen=True)
class RuleSet:
    """N rules over a common reference set, in ambient dimension 1 or 2."""

    rules: tuple
    ambient_dim: int
    ball_radius: float = field(default=None)

    def __post_init__(self):
        if self.ambient_dim not in (1, 2):
            raise InvalidInputError("ambient_dim must be 1 or 2")
        rules = tuple(self.rules)
        for r in rules:
            want = 1 if self.ambient_dim == 1 else 2
            if r.translations.ndim != want or (
                want == 2 and r.translations.shape[1] != 2
            ):
                raise InvalidInputError(
                    f"translations shaped {r.translations.shape} do not match "
                    f"ambient dimension {self.ambient_dim}"
                )
            if self.ambient_dim == 1 and r.rotation != 0.0:
                raise InvalidInputError("rotation must be 0 in 1-D mode")
        object.__setattr__(self, "rules", rules)
        if self.ball_radius is None:
            object.__setattr__(self, "ball_radius", min_ball_radius(self))
        else:
            r_star = min_ball_radius(self)
            if self.ball_radius < r_star - 1e-12:
                raise InvalidInputError(
                    f"ball_radius {self.ball_radius} below minimum {r_star}"
                )

    @property
    def n_rules(self):
        return len(self.rules)

    @property
    def k_max(self):
        return max(r.k for r in self.rules)

    @property
    def uses_unit_interval(self):
        """True when 1-D and every map sends [0,1] into itself."""
        if self.ambient_dim != 1:
            return False
        for r in self.rules:
            t = r.translations
            if np.any(t < 0.0) or np.any(t + r.scale > 1.0 + 1e-12):
                return False
        return True

    @property
    def reference_center(self):
        if self.uses_unit_interval:
            return 0.5
        return 0.0 if self.ambient_dim == 1 else np.zeros(2)

    @property
    def reference_radius(self):
        """Half-width of the reference set (interval or ball)."""
        return 0.5 if self.uses_unit_interval else self.ball_radius

    def rule(self, symbol):
        """Rule for a 1-based driving symbol."""
        if not 1 <= symbol <= self.n_rules:
            raise InvalidWordError(f"rule symbol {symbol} outside 1..{self.n_rules}")
        return self.rules[symbol - 1]


@dataclass(frozen=True)
class Word:
    """Finite symbolic word, valid against the rule sequence it starts at."""

    symbols: tuple
    rule_sequence_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class CylinderFrame:
    """Composed similarity f_u: scale product, rotation mod 2*pi, f_u(0)."""

    scale_product: float
    rotation_sum: float
    translation: np.ndarray

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if np.size(np.atleast_1d(self.translation)) == 1:
            return self.scale_product * x + float(np.ravel(self.translation)[0])
        rot = rotation_matrix(self.rotation_sum)
        return self.scale_product * (rot @ x) + self.translation


def rotation_matrix(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def min_ball_radius(rs):
    """Smallest R with f(B[0,R]) inside B[0,R] for every map in the set.

    Closed form: R* = max |t| / (1 - max scale).
    """
    max_t = 0.0
    max_scale = 0.0
    for r in rs.rules:
        t = r.translations
        norms = np.abs(t) if rs.ambient_dim == 1 else np.linalg.norm(t, axis=1)
        max_t = max(max_t, float(norms.max()))
        max_scale = max(max_scale, r.scale)
    return max_t / (1.0 - max_scale)


def validate_word(rs, omega_prefix, word):
    if len(word) != len(omega_prefix):
        raise InvalidInputError(
            f"word length {len(word)} != rule prefix length {len(omega_prefix)}"
        )
    for m, (i, j) in enumerate(zip(omega_prefix, word)):
        k = rs.rule(i).k
        if not 1 <= j <= k:
            raise InvalidWordError(
                f"symbol {j} at position {m} outside 1..{k} for rule {i}"
            )


def compose_cylinder(rs, omega_prefix, word):
    """Frame of f_u = f^(w1)_{u1} o ... o f^(wn)_{un} along the given prefix.

    Symbols are 1-based.  Returns the identity frame for the empty word.
    """
    symbols = word.symbols if isinstance(word, Word) else tuple(word)
    omega_prefix = tuple(omega_prefix)
    validate_word(rs, omega_prefix, symbols)
    scale = 1.0
    angle = 0.0
    if rs.ambient_dim == 1:
        trans = 0.0
        for i, j in zip(omega_prefix, symbols):
            rule = rs.rule(i)
            trans = trans + scale * float(rule.translations[j - 1])
            scale *= rule.scale
        return CylinderFrame(scale, 0.0, np.float64(trans))
    trans = np.zeros(2)
    for i, j in zip(omega_prefix, symbols):
        rule = rs.rule(i)
        trans = trans + scale * (rotation_matrix(angle) @ rule.translations[j - 1])
        scale *= rule.scale
        angle = (angle + rule.rotation) % TWO_PI
    return CylinderFrame(scale, angle, trans)


def compose_frames(outer, inner):
    """Frame of outer o inner (outer applied last in evaluation order)."""
    scale = outer.scale_product * inner.scale_product
    angle = (outer.rotation_sum + inner.rotation_sum) % TWO_PI
    trans = outer.apply(inner.translation)
    return CylinderFrame(scale, angle, np.asarray(trans, dtype=float))


def cylinder_center_and_diameter(frame, radius, center=None):
    """Center and diameter of the frame's image of the reference set.

    ``center``/``radius`` describe the reference set (origin-centered ball by
    default; pass center=0.5, radius=0.5 for the unit-interval convention).
    """
    if center is None:
        center = 0.0 if np.size(np.atleast_1d(frame.translation)) == 1 else np.zeros(2)
    return frame.apply(center), 2.0 * radius * frame.scale_product


def check_strong_separation(rs):
    """Per rule: are the images of the reference set pairwise disjoint?

    Disjointness is strict; touching images count as failure.
    """
    c0 = rs.reference_center
    r0 = rs.reference_radius
    out = []
    for rule in rs.rules:
        sep = True
        centers = [
            Similarity(rule.scale, rule.rotation, rule.translations[j])(c0)
            for j in range(rule.k)
        ]
        rad = rule.scale * r0
        for a in range(rule.k):
            for b in range(a + 1, rule.k):
                gap = (
                    abs(centers[a] - centers[b])
                    if rs.ambient_dim == 1
                    else float(np.linalg.norm(centers[a] - centers[b]))
                )
                if gap <= 2.0 * rad:
                    sep = False
        out.append(sep)
    return out


# ---------------------------------------------------------------------------
# JSON serialization


def ruleset_to_json(rs):
    rules = []
    for r in rs.rules:
        t = r.translations.tolist()
        rules.append(
            {
                "scale": r.scale,
                "rotation": r.rotation,
                "translations": t,
                "probs": r.probs.tolist(),
            }
        )
    return {
        "ambient_dim": rs.ambient_dim,
        "ball_radius": rs.ball_radius,
        "rules": rules,
    }


def ruleset_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dim = int(obj["ambient_dim"])
        rules = tuple(
            Rule(
                scale=float(r["scale"]),
                rotation=float(r.get("rotation", 0.0)),
                translations=_as_points(r["translations"], dim),
                probs=np.asarray(r["probs"], dtype=float),
            )
            for r in obj["rules"]
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed rule set object: {exc}") from exc
    radius = obj.get("ball_radius")
    return RuleSet(rules, dim, None if radius is None else float(radius))
