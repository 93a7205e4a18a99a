"""Closed-form dimension values and the block disintegration of a
self-similar measure.

A self-similar measure with weights pbar decomposes, after cutting words
into blocks of length l and sorting blocks by their symbol-count type, into
an average of homogeneous-rule random measures: the type sequence is drawn
i.i.d. with weights r_sigma, and within each type the block is conditionally
uniform over the words realizing it.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .errors import InvalidInputError, ResourceLimitError


def _xlogx(p):
    return 0.0 if p == 0 else p * math.log2(p)


def dq_formula_random(probs_per_rule, scales, weights, q):
    """Closed-form L^q dimension of the random self-similar measure:
    sum_i r_i log(sum_j p_ij^q) over (q-1) sum_i r_i log(scale_i).

    Valid under strong separation (caller's responsibility).
    """
    if q <= 1.0:
        raise InvalidInputError("the formula needs q > 1")
    w = np.asarray(weights, dtype=float)
    num = 0.0
    den = 0.0
    for r_i, probs, lam in zip(w, probs_per_rule, scales):
        lam = float(lam)
        if not 0.0 < lam < 1.0:
            raise InvalidInputError(f"scale {lam} outside (0,1)")
        p = np.asarray(probs, dtype=float)
        num += r_i * math.log2(float(np.sum(p**q)))
        den += r_i * math.log2(lam)
    return num / ((q - 1.0) * den)


def dq_limit_entropy(probs_per_rule, scales, weights):
    """The q -> 1+ limit of the closed form: entropy over log-contraction."""
    w = np.asarray(weights, dtype=float)
    num = 0.0
    den = 0.0
    for r_i, probs, lam in zip(w, probs_per_rule, scales):
        lam = float(lam)
        if not 0.0 < lam < 1.0:
            raise InvalidInputError(f"scale {lam} outside (0,1)")
        num += r_i * sum(_xlogx(float(p)) for p in np.asarray(probs, dtype=float))
        den += r_i * math.log2(lam)
    return num / den


def hausdorff_formula(pbar, scales):
    """dim_H of a separated self-similar measure:
    sum p log p over sum p log scale."""
    num = sum(_xlogx(float(p)) for p in pbar)
    den = sum(
        float(p) * math.log2(float(lam)) for p, lam in zip(pbar, scales) if p != 0
    )
    return num / den


def projection_hausdorff_lower_bound(pbar, scales, block_len):
    """Lower bound for projected Hausdorff dimension at finite block length:
    min(dim_H, 1) + k log(l+1) / (l sum p log scale).

    The correction term is negative and vanishes as the block length grows.
    """
    if block_len < 1:
        raise InvalidInputError("block length must be >= 1")
    k = len(pbar)
    den = sum(float(p) * math.log2(float(lam)) for p, lam in zip(pbar, scales))
    correction = k * math.log2(block_len + 1) / (block_len * den)
    return min(hausdorff_formula(pbar, scales), 1.0) + correction


# ---------------------------------------------------------------------------
# block disintegration


def _compositions(total, parts):
    """Compositions of ``total`` into ``parts`` nonnegative parts,
    lexicographically."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _count_type(word, k):
    counts = [0] * k
    for s in word:
        counts[s - 1] += 1
    return tuple(counts)


@dataclass(frozen=True)
class BlockDecomposition:
    """Type classes of length-l blocks with their weights and fiber laws."""

    block_len: int
    pbar: tuple
    type_classes: tuple  # type vectors sigma with positive weight
    class_weights: tuple  # r_sigma, aligned with type_classes
    fibers: dict  # sigma -> dict word -> conditional probability

    @property
    def k(self):
        return len(self.pbar)

    def weight(self, sigma):
        try:
            return self.class_weights[self.type_classes.index(tuple(sigma))]
        except ValueError:
            return 0 * self.class_weights[0]

    def conditional(self, word):
        sigma = _count_type(word, self.k)
        fiber = self.fibers.get(sigma)
        if fiber is None:
            return 0.0
        return fiber.get(tuple(word), 0.0)

    def entropy(self):
        """Base-2 entropy of the type-class weights."""
        return -sum(_xlogx(float(r)) for r in self.class_weights)


def decompose_self_similar(pbar, block_len, cap=10**6):
    """Enumerate block types sigma with weights r_sigma and fiber conditionals.

    Exact when the weights are Fractions; classes of weight zero are omitted.
    Raises once the type count or the word enumeration exceeds the cap.
    """
    if block_len < 1:
        raise InvalidInputError("block length must be >= 1")
    k = len(pbar)
    if k < 2:
        raise InvalidInputError("need at least two symbols")
    exact = all(isinstance(p, Fraction) for p in pbar)
    pvec = tuple(pbar) if exact else tuple(float(p) for p in pbar)
    n_types = math.comb(block_len + k - 1, k - 1)
    if n_types > cap or k**block_len > cap:
        raise ResourceLimitError(
            f"{n_types} types / {k}^{block_len} words exceed the cap {cap}"
        )
    weights = {}
    fibers = {}
    for word in iproduct(*[range(1, k + 1) for _ in range(block_len)]):
        mass = math.prod(pvec[s - 1] for s in word)
        if mass == 0:
            continue
        sigma = _count_type(word, k)
        weights[sigma] = weights.get(sigma, 0) + mass
        fibers.setdefault(sigma, {})[word] = mass
    sigmas = [s for s in _compositions(block_len, k) if s in weights]
    for sigma in sigmas:
        r = weights[sigma]
        fibers[sigma] = {w: m / r for w, m in fibers[sigma].items()}
    return BlockDecomposition(
        block_len=block_len,
        pbar=pvec,
        type_classes=tuple(sigmas),
        class_weights=tuple(weights[s] for s in sigmas),
        fibers=fibers,
    )


def reconstruct_cylinder(decomposition, word):
    """Product over blocks of r_type * conditional; equals the plain product
    of pbar over the word (exactly for Fraction inputs, else to 1e-12)."""
    l = decomposition.block_len
    if len(word) % l != 0:
        raise InvalidInputError(f"word length must be a multiple of {l}")
    out = None
    for j in range(0, len(word), l):
        block = tuple(word[j : j + l])
        sigma = _count_type(block, decomposition.k)
        r = decomposition.weight(sigma)
        p = decomposition.conditional(block)
        term = r * p
        out = term if out is None else out * term
    if out is None:  # empty word
        return 1.0
    return out


def decomposition_to_json(decomposition):
    """{sigma, r, fiber:[{word, p}]} rows, one per type class."""
    rows = []
    for sigma, r in zip(decomposition.type_classes, decomposition.class_weights):
        fiber = [
            {"word": list(w), "p": float(p)}
            for w, p in sorted(decomposition.fibers[sigma].items())
        ]
        rows.append({"sigma": list(sigma), "r": float(r), "fiber": fiber})
    return {"block_len": decomposition.block_len, "classes": rows}
