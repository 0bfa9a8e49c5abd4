"""Angle, distance and entropy-aware similarity over 2D balance points.

A balance point is ``(gender_entropy, age_entropy)``. The entropy-aware score
works on points folded into the ``x <= y`` half-plane by
:func:`symmetric_transform`, so a gender-skewed site and an age-skewed site end
up close to each other.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .balance import DEFAULT_EPS, SiteProfile, ValidationError, pair_balance

__all__ = [
    "METHODS",
    "BalancePoint",
    "SimilarityMatrix",
    "DegeneratePointWarning",
    "balance_point",
    "cosine_similarity",
    "euclidean_distance",
    "symmetric_transform",
    "easb_similarity",
    "similarity_matrix",
]

METHODS = ("cosine", "euclidean", "easb")


class DegeneratePointWarning(UserWarning):
    """A zero-magnitude point made the cosine undefined; 0 was used instead."""


@dataclass(frozen=True)
class BalancePoint:
    site_id: str
    x: float
    y: float
    transformed: bool = False

    def __post_init__(self):
        for name in ("x", "y"):
            v = float(getattr(self, name))
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, v)
        if self.transformed and self.x > self.y:
            raise ValidationError("a transformed point must satisfy x <= y")

    def __iter__(self):
        yield self.x
        yield self.y


Point = Union[BalancePoint, Sequence[float]]


def balance_point(site: SiteProfile) -> BalancePoint:
    return BalancePoint(site.id, site.h_gender, site.h_age)


def _xy(p: Point) -> tuple[float, float]:
    x, y = p
    return float(x), float(y)


def cosine_similarity(a: Point, b: Point) -> float:
    """Cosine of the angle between ``a`` and ``b``.

    A zero-magnitude argument yields 0 and a :class:`DegeneratePointWarning`.
    """
    ax, ay = _xy(a)
    bx, by = _xy(b)
    na = math.hypot(ax, ay)
    nb = math.hypot(bx, by)
    if na == 0.0 or nb == 0.0:
        warnings.warn("zero-magnitude balance point; cosine set to 0",
                      DegeneratePointWarning, stacklevel=2)
        return 0.0
    c = (ax * bx + ay * by) / (na * nb)
    return min(max(c, -1.0), 1.0)


def euclidean_distance(a: Point, b: Point) -> float:
    ax, ay = _xy(a)
    bx, by = _xy(b)
    return math.hypot(ax - bx, ay - by)


def symmetric_transform(points: Iterable[BalancePoint]) -> list[BalancePoint]:
    """Reflect points with ``x > y`` across the diagonal; keep the rest.

    Reflected points are flagged ``transformed``; output order follows input.
    """
    out = []
    for p in points:
        if p.x > p.y:
            out.append(BalancePoint(p.site_id, p.y, p.x, transformed=True))
        else:
            out.append(p)
    return out


def easb_similarity(a: Point, b: Point, hw_ab: float) -> float:
    """Cosine times pairwise balance, damped by ``1 + euclidean distance``."""
    return cosine_similarity(a, b) * hw_ab / (1.0 + euclidean_distance(a, b))


@dataclass
class SimilarityMatrix:
    site_ids: list[str]
    method: str
    scores: np.ndarray
    degenerate: list[str] = field(default_factory=list)

    def score(self, i: str, j: str) -> float:
        return float(self.scores[self.site_ids.index(i), self.site_ids.index(j)])


def _pair_scores(points, hws, method, eps):
    n = len(points)
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            if method == "cosine":
                s = cosine_similarity(points[i], points[j])
            elif method == "euclidean":
                s = euclidean_distance(points[i], points[j])
            else:
                s = easb_similarity(points[i], points[j],
                                    pair_balance(hws[i], hws[j], eps))
            scores[i, j] = scores[j, i] = s
    return scores


def similarity_matrix(sites: Sequence[SiteProfile], method: str = "easb",
                      eps: float = DEFAULT_EPS) -> SimilarityMatrix:
    """Pairwise scores for ``method`` over ``sites`` in input order.

    The diagonal holds each site's self-score: 1 for cosine, 0 for euclidean,
    and the clamped self-weight for easb.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}")
    if len(sites) < 2:
        raise ValidationError("a similarity matrix needs at least 2 sites")
    points = [balance_point(s) for s in sites]
    if method == "easb":
        points = symmetric_transform(points)
    hws = [s.hw for s in sites]
    degenerate = [p.site_id for p in points if p.x == 0.0 and p.y == 0.0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneratePointWarning)
        scores = _pair_scores(points, hws, method, eps)
    if degenerate and method != "euclidean":
        warnings.warn(f"zero-magnitude balance points: {', '.join(degenerate)}",
                      DegeneratePointWarning, stacklevel=2)
    return SimilarityMatrix([s.id for s in sites], method, scores, degenerate)
