import random

import pytest
from hypothesis import given, settings, strategies as st

from easb.balance import CategoricalDistribution, SiteProfile, ValidationError
from easb.clustering import (
    UnsupportedPoolingError,
    cluster_baseline,
    cluster_easb,
    evaluate_partition,
    pooled_entropy,
)
from easb.similarity import cosine_similarity, euclidean_distance, balance_point

from conftest import mp_entropy
from oracles import ref_linkage, ref_score, replay_merge_log


def counts_site(sid, gender, age):
    return SiteProfile(
        sid,
        gender=CategoricalDistribution(("M", "F"), counts=tuple(gender)),
        age=CategoricalDistribution(tuple(str(i) for i in range(len(age))), counts=tuple(age)),
    )


def random_profiles(rnd, n):
    return [SiteProfile(f"s{i:02d}", gender_entropy=rnd.random(), age_entropy=rnd.random())
            for i in range(n)]


def assert_covers(partition, sites):
    members = [m for c in partition.clusters for m in c.members]
    assert sorted(members) == sorted(s.id for s in sites)


# pooled entropy

def test_pooled_uniform():
    a = counts_site("a", [50, 50], [1, 1])
    b = counts_site("b", [50, 50], [1, 1])
    assert pooled_entropy({a, b}, "gender") == 1.0


def test_pooled_complementary():
    a = counts_site("a", [100, 0], [1, 1])
    b = counts_site("b", [0, 100], [1, 1])
    assert pooled_entropy([a, b], "gender") == 1.0
    c = counts_site("c", [90, 10], [1, 1])
    d = counts_site("d", [10, 90], [1, 1])
    assert pooled_entropy([c, d], "gender") == 1.0
    assert pooled_entropy([c], "gender") == pytest.approx(0.468996, abs=1e-6)


def test_pooled_requires_counts():
    a = counts_site("a", [1, 1], [1, 1])
    b = SiteProfile("b", gender_entropy=0.5, age_entropy=0.5)
    with pytest.raises(UnsupportedPoolingError):
        pooled_entropy([a, b], "gender")
    with pytest.raises(ValidationError):
        pooled_entropy([a], "height")


@settings(max_examples=200)
@given(st.lists(st.integers(0, 500), min_size=3, max_size=3).filter(any),
       st.lists(st.integers(0, 500), min_size=3, max_size=3).filter(any))
def test_pooled_matches_tally(x, y):
    a = counts_site("a", [1, 1], x)
    b = counts_site("b", [1, 1], y)
    assert pooled_entropy([a, b], "age") == pytest.approx(
        mp_entropy([i + j for i, j in zip(x, y)]), abs=1e-12)


# EASB clustering

def test_scenario1(scenario1):
    p = cluster_easb(scenario1)
    assert p.as_sets() == {frozenset({"H0", "H1", "H2", "H3"}), frozenset({"H4"})}
    assert p.frozen == ("H4",)
    assert_covers(p, scenario1)


def test_scenario2(scenario2):
    p = cluster_easb(scenario2)
    sets = p.as_sets()
    assert frozenset({"H1"}) in sets and frozenset({"H5"}) in sets
    assert {"H0", "H3", "H4", "H6"} <= set(p.cluster_of("H0").members)


def test_single_site():
    s = [SiteProfile("only", gender_entropy=0.2, age_entropy=0.3)]
    p = cluster_easb(s)
    assert p.as_sets() == {frozenset({"only"})}
    assert p.merge_log == []


@pytest.mark.parametrize("kwargs", [dict(tau=-0.1), dict(beta=1.5), dict(eps=0.0), dict(eps=0.6)])
def test_easb_invalid_params(scenario1, kwargs):
    with pytest.raises(ValidationError):
        cluster_easb(scenario1, **kwargs)


def test_duplicate_ids_rejected():
    s = SiteProfile("x", gender_entropy=0.2, age_entropy=0.3)
    with pytest.raises(ValidationError):
        cluster_easb([s, s])


@pytest.mark.parametrize("seed", range(25))
def test_merge_log_replay(seed):
    rnd = random.Random(seed)
    sites = random_profiles(rnd, rnd.randint(2, 12))
    p = cluster_easb(sites, tau=rnd.choice([0.0, 0.05, 0.1]), beta=rnd.choice([0.3, 0.55, 1.0]))
    assert_covers(p, sites)
    final = replay_merge_log(sites, p, ref_score)
    expected = {frozenset(c) for c in final} | {frozenset([f]) for f in p.frozen}
    assert p.as_sets() == expected
    # stopping rule: either one unfrozen cluster left or the best score fell below tau
    if len(final) > 1:
        by_id = {s.id: s for s in sites}
        best = max(ref_linkage([by_id[i] for i in a], [by_id[i] for i in b], ref_score)
                   for ia, a in enumerate(final) for b in final[ia + 1:])
        assert best < p.params["tau"]


@pytest.mark.parametrize("seed", range(10))
def test_order_invariance(seed):
    rnd = random.Random(100 + seed)
    sites = random_profiles(rnd, 10)
    shuffled = sites[:]
    rnd.shuffle(shuffled)
    a, b = cluster_easb(sites), cluster_easb(shuffled)
    assert a.as_sets() == b.as_sets()
    assert a.merge_log == b.merge_log


def test_tie_break_prefers_lowest_pair():
    # four identical sites: every pair scores the same
    sites = [SiteProfile(i, gender_entropy=0.4, age_entropy=0.6) for i in "dcba"]
    p = cluster_easb(sites, tau=0.0)
    assert p.merge_log[0].cluster_a == ("a",) and p.merge_log[0].cluster_b == ("b",)


@pytest.mark.parametrize("seed", range(10))
def test_tau_refinement(seed):
    rnd = random.Random(200 + seed)
    sites = random_profiles(rnd, 10)
    coarse = cluster_easb(sites, tau=0.02)
    fine = cluster_easb(sites, tau=0.15)
    for c in fine.clusters:
        assert any(set(c.members) <= set(d.members) for d in coarse.clusters)


def test_frozen_never_merged():
    rnd = random.Random(7)
    for _ in range(20):
        sites = random_profiles(rnd, 9)
        p = cluster_easb(sites, beta=0.4)
        frozen = {s.id for s in sites if s.hw >= 0.4}
        assert set(p.frozen) == frozen
        for m in p.merge_log:
            assert not (set(m.cluster_a) | set(m.cluster_b)) & frozen


def test_complementary_pair_merges_and_improves():
    g = counts_site("g", [95, 5], [10] * 9)      # gender-skewed
    a = counts_site("a", [50, 50], [82] + [2] * 8)  # age-skewed
    assert g.hw < 0.55 and a.hw < 0.55
    p = cluster_easb([g, a])
    assert p.as_sets() == {frozenset({"g", "a"})}
    assert p.clusters[0].pooling_mode == "pooled"
    assert p.clusters[0].hw > max(g.hw, a.hw)


# baselines

@pytest.mark.parametrize("method", ["cosine", "euclidean"])
def test_baseline_extremes(scenario1, method):
    assert len(cluster_baseline(scenario1, method, 5).clusters) == 5
    one = cluster_baseline(scenario1, method, 1)
    assert one.as_sets() == {frozenset(s.id for s in scenario1)}


@pytest.mark.parametrize("k", [0, 6, 2.5])
def test_baseline_invalid_k(scenario1, k):
    with pytest.raises(ValidationError):
        cluster_baseline(scenario1, "cosine", k)


def test_baseline_scenario2_euclidean(scenario2):
    p = cluster_baseline(scenario2, "euclidean", 3)
    c = set(p.cluster_of("H0").members)
    assert {"H0", "H4", "H6"} <= c and "H3" not in c


@pytest.mark.parametrize("method,maximize,metric", [
    ("cosine", True, cosine_similarity), ("euclidean", False, euclidean_distance)])
@pytest.mark.parametrize("seed", range(10))
def test_baseline_replay(method, maximize, metric, seed):
    rnd = random.Random(300 + seed)
    sites = random_profiles(rnd, rnd.randint(2, 12))
    p = cluster_baseline(sites, method, rnd.randint(1, len(sites)))

    def score(a, b):
        return metric(balance_point(a), balance_point(b))

    replay_merge_log(sites, p, score, maximize=maximize)


# evaluation

def test_evaluate_average():
    sites = [SiteProfile("a", gender_entropy=1.0, age_entropy=0.9),
             SiteProfile("b", gender_entropy=0.9986, age_entropy=1.0)]
    r = evaluate_partition(cluster_baseline(sites, "cosine", 2))
    assert r.averages["gender_entropy_pct"] == pytest.approx(99.93, abs=1e-9)
    assert r.pooling_modes == {"averaged"}


def test_evaluate_singletons_match_inputs(scenario2):
    r = evaluate_partition(cluster_baseline(scenario2, "euclidean", 7))
    assert r.averages["age_entropy_pct"] == pytest.approx(
        100 * sum(s.h_age for s in scenario2) / 7, abs=1e-9)
    assert r.averages["mean_hw"] == pytest.approx(sum(s.hw for s in scenario2) / 7, abs=1e-12)


def test_evaluate_pooled_pair_exceeds_members():
    g = counts_site("g", [90, 10], [80, 10, 10])
    a = counts_site("a", [10, 90], [10, 10, 80])
    r = evaluate_partition(cluster_baseline([g, a], "cosine", 1))
    row = r.per_cluster[0]
    assert row.pooling_mode == "pooled"
    assert row.gender_entropy_pct / 100 == pytest.approx(mp_entropy([100, 100]), abs=1e-12)
    assert row.age_entropy_pct / 100 == pytest.approx(mp_entropy([90, 20, 90]), abs=1e-12)
    assert row.gender_entropy_pct >= 100 * max(g.h_gender, a.h_gender)
    assert row.age_entropy_pct >= 100 * max(g.h_age, a.h_age)


def test_evaluate_weighted():
    small = counts_site("s", [10, 0], [5, 5])
    big = counts_site("b", [50, 50], [50, 50])
    p = cluster_baseline([small, big], "euclidean", 2)
    unweighted = evaluate_partition(p).averages["gender_entropy_pct"]
    weighted = evaluate_partition(p, weighted=True).averages["gender_entropy_pct"]
    assert unweighted == pytest.approx(50.0)
    assert weighted == pytest.approx(100 * 100 / 110)
