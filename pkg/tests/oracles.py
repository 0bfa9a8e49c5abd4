"""Independent reference computations used by the clustering tests."""
import itertools
import math


def ref_score(a, b, eps=1e-6):
    """EASB score of two entropy-profile sites computed from first principles."""
    def fold(s):
        return (min(s.h_gender, s.h_age), max(s.h_gender, s.h_age))

    (ax, ay), (bx, by) = fold(a), fold(b)
    na, nb = math.hypot(ax, ay), math.hypot(bx, by)
    cos = 0.0 if na == 0 or nb == 0 else (ax * bx + ay * by) / (na * nb)
    p = min(max((a.hw + b.hw) / 2, eps), 1 - eps)
    return cos * p / (1 + math.hypot(ax - bx, ay - by))


def ref_linkage(ca, cb, score):
    vals = [score(x, y) for x in ca for y in cb]
    return sum(vals) / len(vals)


def replay_merge_log(sites, partition, score, maximize=True, tol=1e-12):
    """Check that every logged merge was an optimal eligible pair.

    Returns the final list of clusters (lists of ids) reached by replaying.
    """
    by_id = {s.id: s for s in sites}
    frozen = set(partition.frozen)
    clusters = [[s.id] for s in sites if s.id not in frozen]
    for step in partition.merge_log:
        assert not (set(step.cluster_a) | set(step.cluster_b)) & frozen
        cand = {}
        for a, b in itertools.combinations(range(len(clusters)), 2):
            cand[(a, b)] = ref_linkage([by_id[i] for i in clusters[a]],
                                       [by_id[i] for i in clusters[b]], score)
        best = max(cand.values()) if maximize else min(cand.values())
        assert math.isclose(step.score, best, rel_tol=0, abs_tol=tol)
        keys = {tuple(sorted(clusters[a])): a for a in range(len(clusters))}
        ia, ib = keys[tuple(sorted(step.cluster_a))], keys[tuple(sorted(step.cluster_b))]
        assert math.isclose(cand[tuple(sorted((ia, ib)))], best, rel_tol=0, abs_tol=tol)
        merged = clusters[ia] + clusters[ib]
        clusters = [c for i, c in enumerate(clusters) if i not in (ia, ib)] + [merged]
    return clusters
