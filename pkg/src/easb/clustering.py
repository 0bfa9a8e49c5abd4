"""Greedy average-linkage clustering driven by the entropy-aware score.

Sites whose balance weight already reaches ``beta`` are frozen as singletons.
The rest are folded into the ``x <= y`` half-plane and merged greedily: at
each step the cluster pair with the highest mean cross-pair score merges,
until that score drops below ``tau`` or a single unfrozen cluster is left.

Cosine and Euclidean baselines run the same agglomeration on raw points and
stop at an explicit cluster count ``k``.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .balance import (
    DEFAULT_EPS,
    CategoricalDistribution,
    SiteProfile,
    ValidationError,
    normalized_entropy,
    pair_balance,
)
from .similarity import (
    DegeneratePointWarning,
    balance_point,
    cosine_similarity,
    easb_similarity,
    euclidean_distance,
    symmetric_transform,
)

log = logging.getLogger(__name__)

DEFAULT_TAU = 0.05
DEFAULT_BETA = 0.55

__all__ = [
    "DEFAULT_TAU",
    "DEFAULT_BETA",
    "UnsupportedPoolingError",
    "Cluster",
    "MergeStep",
    "Partition",
    "pooled_entropy",
    "cluster_easb",
    "cluster_baseline",
    "evaluate_partition",
]


class UnsupportedPoolingError(ValidationError):
    """Members without raw counts cannot be pooled."""


@dataclass(frozen=True)
class Cluster:
    id: int
    members: tuple[str, ...]
    gender_entropy: float
    age_entropy: float
    hw: float
    pooling_mode: str  # "pooled" or "averaged"
    pooled_gender: Optional[CategoricalDistribution] = None
    pooled_age: Optional[CategoricalDistribution] = None

    @property
    def size(self) -> int:
        """Total record count when pooled, otherwise the number of members."""
        if self.pooled_gender is not None:
            return self.pooled_gender.total
        return len(self.members)


@dataclass(frozen=True)
class MergeStep:
    step: int
    cluster_a: tuple[str, ...]
    cluster_b: tuple[str, ...]
    score: float


@dataclass
class Partition:
    clusters: list[Cluster]
    method: str
    merge_log: list[MergeStep] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    frozen: tuple[str, ...] = ()

    def as_sets(self) -> set[frozenset[str]]:
        return {frozenset(c.members) for c in self.clusters}

    def cluster_of(self, site_id: str) -> Cluster:
        for c in self.clusters:
            if site_id in c.members:
                return c
        raise KeyError(site_id)


def _pool(dists: Sequence[CategoricalDistribution]) -> CategoricalDistribution:
    classes = dists[0].classes
    for d in dists[1:]:
        if d.classes != classes:
            raise ValidationError("cannot pool distributions over different classes")
    totals = [sum(col) for col in zip(*(d.counts for d in dists))]
    return CategoricalDistribution(classes, counts=tuple(totals))


def pooled_entropy(members: Iterable[SiteProfile], attribute: str) -> float:
    """Normalized entropy of the class-wise sum of the members' counts."""
    if attribute not in ("gender", "age"):
        raise ValidationError(f"unknown attribute {attribute!r}")
    dists = []
    for site in members:
        d = getattr(site, attribute)
        if d is None or d.counts is None:
            raise UnsupportedPoolingError(
                f"site {site.id} has no raw {attribute} counts")
        dists.append(d)
    if not dists:
        raise ValidationError("no members to pool")
    return normalized_entropy(_pool(dists))


def _make_cluster(cid: int, members: Sequence[SiteProfile]) -> Cluster:
    ids = tuple(s.id for s in members)
    if all(s.has_counts for s in members):
        pg = _pool([s.gender for s in members])
        pa = _pool([s.age for s in members])
        hg, ha = normalized_entropy(pg), normalized_entropy(pa)
        return Cluster(cid, ids, hg, ha, hg * ha, "pooled", pg, pa)
    hg = float(np.mean([s.h_gender for s in members]))
    ha = float(np.mean([s.h_age for s in members]))
    return Cluster(cid, ids, hg, ha, hg * ha, "averaged")


def _canonical(sites: Sequence[SiteProfile]) -> list[SiteProfile]:
    ids = [s.id for s in sites]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate site ids")
    return sorted(sites, key=lambda s: s.id)


def _agglomerate(ids, scores, *, maximize, stop):
    """Merge index clusters greedily by average linkage over ``scores``.

    ``stop(best_score, n_clusters)`` ends the loop before a merge. Pairs are
    scanned in (first member, second member) order and only a strictly better
    score replaces the incumbent, so ties go to the lexicographically lowest
    pair.
    """
    clusters = [[i] for i in range(len(ids))]
    merges = []
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                s = float(scores[np.ix_(clusters[a], clusters[b])].mean())
                if best is None or (s > best[0] if maximize else s < best[0]):
                    best = (s, a, b)
        s, a, b = best
        if stop(s, len(clusters)):
            break
        merges.append(MergeStep(
            len(merges),
            tuple(ids[i] for i in clusters[a]),
            tuple(ids[i] for i in clusters[b]),
            s,
        ))
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]
    return clusters, merges


def _finish(groups: list[list[SiteProfile]], method, merges, params, frozen=()):
    groups = sorted(groups, key=lambda g: g[0].id)
    clusters = [_make_cluster(i, g) for i, g in enumerate(groups)]
    return Partition(clusters, method, merges, params, tuple(frozen))


def _check_unit(name, value):
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")


def cluster_easb(sites: Sequence[SiteProfile], tau: float = DEFAULT_TAU,
                 beta: float = DEFAULT_BETA, eps: float = DEFAULT_EPS) -> Partition:
    _check_unit("tau", tau)
    _check_unit("beta", beta)
    if not (0.0 < eps < 0.5):
        raise ValidationError("eps must lie in (0, 0.5)")
    if not sites:
        raise ValidationError("need at least one site")
    sites = _canonical(sites)
    params = {"tau": tau, "beta": beta, "eps": eps}

    frozen = [s for s in sites if s.hw >= beta]
    active = [s for s in sites if s.hw < beta]
    log.debug("frozen: %s", [s.id for s in frozen])

    points = symmetric_transform([balance_point(s) for s in active])
    hws = [s.hw for s in active]
    n = len(active)
    scores = np.zeros((n, n))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneratePointWarning)
        for i in range(n):
            for j in range(i + 1, n):
                scores[i, j] = scores[j, i] = easb_similarity(
                    points[i], points[j], pair_balance(hws[i], hws[j], eps))

    groups, merges = _agglomerate(
        [s.id for s in active], scores, maximize=True,
        stop=lambda best, _: best < tau)
    for m in merges:
        log.debug("merge %d: %s + %s (%.6f)", m.step, m.cluster_a, m.cluster_b, m.score)
    out = [[active[i] for i in g] for g in groups] + [[s] for s in frozen]
    return _finish(out, "easb", merges, params, [s.id for s in frozen])


def cluster_baseline(sites: Sequence[SiteProfile], method: str, k: int) -> Partition:
    """Average-linkage clustering on raw points down to ``k`` clusters.

    ``cosine`` merges the most similar pair, ``euclidean`` the nearest.
    """
    if method not in ("cosine", "euclidean"):
        raise ValidationError(f"baseline method must be cosine or euclidean, got {method!r}")
    if not sites:
        raise ValidationError("need at least one site")
    if isinstance(k, bool) or int(k) != k or not (1 <= k <= len(sites)):
        raise ValidationError(f"k must be an integer in [1, {len(sites)}], got {k!r}")
    sites = _canonical(sites)
    points = [balance_point(s) for s in sites]
    metric = cosine_similarity if method == "cosine" else euclidean_distance
    n = len(sites)
    scores = np.zeros((n, n))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneratePointWarning)
        for i in range(n):
            for j in range(i + 1, n):
                scores[i, j] = scores[j, i] = metric(points[i], points[j])
    groups, merges = _agglomerate(
        [s.id for s in sites], scores, maximize=(method == "cosine"),
        stop=lambda _, count: count <= k)
    return _finish([[sites[i] for i in g] for g in groups], method, merges, {"k": int(k)})


def evaluate_partition(p: Partition, weighted: bool = False):
    """Per-cluster balance rows plus cross-cluster averages.

    Averages are unweighted means over clusters unless ``weighted`` is set, in
    which case clusters are weighted by :attr:`Cluster.size`.
    """
    from .report import BalanceReport

    return BalanceReport.from_partition(p, weighted=weighted)
