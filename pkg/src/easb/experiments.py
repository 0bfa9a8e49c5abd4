"""Method comparison on one site set and seeded multi-trial simulation."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from .balance import DEFAULT_EPS, SiteProfile, ValidationError
from .clustering import (
    DEFAULT_BETA,
    DEFAULT_TAU,
    cluster_baseline,
    cluster_easb,
    evaluate_partition,
)
from .data import ScenarioSpec, generate_scenario
from .report import BalanceReport
from .rng import MASK

ALL_METHODS = ("cosine", "euclidean", "easb")


def compare(sites: Sequence[SiteProfile], tau: float = DEFAULT_TAU,
            beta: float = DEFAULT_BETA, eps: float = DEFAULT_EPS,
            methods: Sequence[str] = ALL_METHODS,
            weighted: bool = False) -> dict[str, BalanceReport]:
    """Run the requested methods; baselines get EASB's cluster count as ``k``."""
    for m in methods:
        if m not in ALL_METHODS:
            raise ValidationError(f"unknown method {m!r}")
    easb = cluster_easb(sites, tau, beta, eps)
    k = len(easb.clusters)
    out = {}
    for m in methods:
        p = easb if m == "easb" else cluster_baseline(sites, m, k)
        out[m] = evaluate_partition(p, weighted=weighted)
    return out


def comparison_rows(reports: dict[str, BalanceReport]) -> list[dict]:
    return [
        {"method": m, "clusters": len(r.per_cluster),
         "age_entropy_pct": r.averages["age_entropy_pct"],
         "gender_entropy_pct": r.averages["gender_entropy_pct"],
         "mean_hw": r.averages["mean_hw"]}
        for m, r in reports.items()
    ]


def trial_seed(base_seed: int, trial: int) -> int:
    return (base_seed + trial) & MASK


def run_trial(spec: ScenarioSpec, tau=DEFAULT_TAU, beta=DEFAULT_BETA,
              eps=DEFAULT_EPS, weighted=False) -> dict:
    sites = generate_scenario(spec)
    reports = compare(sites, tau, beta, eps, weighted=weighted)
    return {"seed": spec.seed, "rows": comparison_rows(reports)}


def aggregate(trials: list[dict]) -> dict:
    """Win rates and mean improvements of EASB's mean hw over each baseline.

    A tie counts as a win (EASB >= baseline).
    """
    hw = {m: np.array([next(r["mean_hw"] for r in t["rows"] if r["method"] == m)
                       for t in trials])
          for m in ALL_METHODS}
    out = {"trials": len(trials),
           "mean_hw": {m: float(v.mean()) for m, v in hw.items()}}
    for m in ("cosine", "euclidean"):
        diff = hw["easb"] - hw[m]
        out[f"win_rate_vs_{m}"] = float(np.mean(diff >= 0))
        out[f"mean_improvement_vs_{m}"] = float(diff.mean())
    return out


def simulate(base: ScenarioSpec, trials: int = 100, tau=DEFAULT_TAU,
             beta=DEFAULT_BETA, eps=DEFAULT_EPS, weighted=False,
             jobs: Optional[int] = None) -> dict:
    """Run ``trials`` scenarios seeded ``base.seed + t`` and aggregate them.

    Results are reduced in seed order, so ``jobs`` never changes the output.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    specs = [replace(base, seed=trial_seed(base.seed, t)) for t in range(trials)]

    def one(spec):
        return run_trial(spec, tau, beta, eps, weighted)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            per_trial = list(pool.map(one, specs))
    else:
        per_trial = [one(s) for s in specs]
    summary = aggregate(per_trial)
    summary["params"] = {"tau": tau, "beta": beta, "eps": eps,
                         "sites": base.n_sites, "seed": base.seed,
                         "mix": list(base.imbalance_mix), "age_bins": base.age_bins,
                         "weighted": weighted}
    summary["per_trial"] = per_trial
    return summary
