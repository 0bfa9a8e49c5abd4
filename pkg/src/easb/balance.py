"""Normalized categorical entropy, per-site balance weights and pairwise balance.

All entropies are carried as fractions in [0, 1]: the Shannon entropy (base 2)
divided by ``log2(K)`` for a distribution over ``K`` classes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "ValidationError",
    "CategoricalDistribution",
    "SiteProfile",
    "BalanceWeight",
    "normalized_entropy",
    "site_weight",
    "pair_balance",
    "DEFAULT_EPS",
]

DEFAULT_EPS = 1e-6
PROB_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class CategoricalDistribution:
    """Counts or probabilities over an ordered list of class labels.

    Exactly one of ``counts`` and ``probs`` is populated.
    """

    classes: tuple[str, ...]
    counts: Optional[tuple[int, ...]] = None
    probs: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(str(c) for c in self.classes))
        if (self.counts is None) == (self.probs is None):
            raise ValidationError("exactly one of counts/probs must be given")
        k = len(self.classes)
        if k < 1:
            raise ValidationError("a distribution needs at least one class")
        if self.counts is not None:
            counts = tuple(int(c) for c in self.counts)
            if any(c != c0 for c, c0 in zip(counts, self.counts)):
                raise ValidationError("counts must be integers")
            if len(counts) != k:
                raise ValidationError(f"expected {k} counts, got {len(counts)}")
            if any(c < 0 for c in counts):
                raise ValidationError("counts must be nonnegative")
            if sum(counts) == 0:
                raise ValidationError("at least one count must be positive")
            object.__setattr__(self, "counts", counts)
        else:
            probs = tuple(float(p) for p in self.probs)
            if len(probs) != k:
                raise ValidationError(f"expected {k} probabilities, got {len(probs)}")
            if any(not math.isfinite(p) or p < 0 for p in probs):
                raise ValidationError("probabilities must be finite and nonnegative")
            if abs(math.fsum(probs) - 1.0) > PROB_TOL:
                raise ValidationError("probabilities must sum to 1")
            object.__setattr__(self, "probs", probs)

    @classmethod
    def from_counts(cls, counts: Sequence[int], classes: Optional[Sequence[str]] = None):
        if classes is None:
            classes = [str(i) for i in range(len(counts))]
        return cls(tuple(classes), counts=tuple(counts))

    @classmethod
    def from_probs(cls, probs: Sequence[float], classes: Optional[Sequence[str]] = None):
        if classes is None:
            classes = [str(i) for i in range(len(probs))]
        return cls(tuple(classes), probs=tuple(probs))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def total(self) -> Optional[int]:
        return sum(self.counts) if self.counts is not None else None

    def probabilities(self) -> tuple[float, ...]:
        if self.probs is not None:
            return self.probs
        n = sum(self.counts)
        return tuple(c / n for c in self.counts)


def normalized_entropy(dist: CategoricalDistribution) -> float:
    """Shannon entropy of ``dist`` divided by ``log2(K)``.

    Empty classes contribute nothing (``0 log 0 = 0``). A single-class
    distribution has entropy 0.
    """
    if dist.k == 1:
        return 0.0
    h = -math.fsum(p * math.log2(p) for p in dist.probabilities() if p > 0)
    h /= math.log2(dist.k)
    # rounding can push a uniform distribution a few ulps past 1
    return min(max(h, 0.0), 1.0)


def _check_fraction(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class SiteProfile:
    """A data-holding site described by gender and age balance.

    Each attribute is given either as a raw distribution or as a direct
    normalized entropy in [0, 1], never both.
    """

    id: str
    gender: Optional[CategoricalDistribution] = None
    age: Optional[CategoricalDistribution] = None
    gender_entropy: Optional[float] = None
    age_entropy: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        for attr in ("gender", "age"):
            dist = getattr(self, attr)
            direct = getattr(self, f"{attr}_entropy")
            if (dist is None) == (direct is None):
                raise ValidationError(
                    f"site {self.id}: give exactly one of {attr} distribution "
                    f"or {attr}_entropy"
                )
            if direct is not None:
                object.__setattr__(
                    self, f"{attr}_entropy", _check_fraction(f"{attr}_entropy", direct)
                )

    def entropy(self, attribute: str) -> float:
        if attribute not in ("gender", "age"):
            raise ValidationError(f"unknown attribute {attribute!r}")
        dist = getattr(self, attribute)
        if dist is not None:
            return normalized_entropy(dist)
        return getattr(self, f"{attribute}_entropy")

    @property
    def h_gender(self) -> float:
        return self.entropy("gender")

    @property
    def h_age(self) -> float:
        return self.entropy("age")

    @property
    def has_counts(self) -> bool:
        return (
            self.gender is not None
            and self.age is not None
            and self.gender.counts is not None
            and self.age.counts is not None
        )

    @property
    def hw(self) -> float:
        return self.h_gender * self.h_age


@dataclass(frozen=True)
class BalanceWeight:
    site_id: str
    hw: float


def site_weight(site: SiteProfile) -> BalanceWeight:
    """Degree of balance of a site: gender entropy times age entropy."""
    if not isinstance(site, SiteProfile):
        raise ValidationError("site_weight expects a SiteProfile")
    return BalanceWeight(site.id, site.h_gender * site.h_age)


def pair_balance(hw_i: float, hw_j: float, eps: float = DEFAULT_EPS) -> float:
    """Balance score for merging two sites with weights ``hw_i`` and ``hw_j``.

    The mean weight is clamped into ``[eps, 1 - eps]`` and passed through
    odds -> log -> logistic, exactly as the formula chain is written.
    """
    hw_i = _check_fraction("hw_i", hw_i)
    hw_j = _check_fraction("hw_j", hw_j)
    if not (0.0 < eps < 0.5):
        raise ValidationError("eps must lie in (0, 0.5)")
    p = (hw_i + hw_j) / 2.0
    p = min(max(p, eps), 1.0 - eps)
    odds = p / (1.0 - p)
    z = math.log(odds)
    return 1.0 / (1.0 + math.exp(-z))
