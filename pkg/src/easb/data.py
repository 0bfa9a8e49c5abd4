"""Site ingestion (records CSV, histogram JSON, entropy-profile JSON),
built-in scenario fixtures and seeded synthetic scenarios."""
from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .balance import CategoricalDistribution, SiteProfile, ValidationError
from .rng import SplitMix64

log = logging.getLogger(__name__)

__all__ = [
    "GENDER_CLASSES",
    "ARCHETYPES",
    "RecordRow",
    "ScenarioSpec",
    "age_bin_labels",
    "bin_age",
    "ingest_records",
    "read_records_csv",
    "ingest_histogram",
    "to_histogram",
    "ingest_profiles",
    "to_profiles",
    "load_document",
    "load_sites",
    "load_fixture",
    "FIXTURES",
    "generate_scenario",
    "scenario_archetypes",
]

GENDER_CLASSES = ("M", "F")
MAX_AGE = 130
ARCHETYPES = ("balanced", "gender", "age", "both")
FIXTURES = ("scenario1", "scenario2")


@dataclass(frozen=True)
class RecordRow:
    record_id: str
    site_id: str
    gender: str
    age: int
    label: Optional[str] = None


def age_bin_labels(age_bins: int) -> tuple[str, ...]:
    """Decade bins ``0-9, 10-19, ...`` with an open top bin."""
    if age_bins < 2:
        raise ValidationError("age_bins must be at least 2")
    labels = [f"{10 * i}-{10 * i + 9}" for i in range(age_bins - 1)]
    labels.append(f"{10 * (age_bins - 1)}+")
    return tuple(labels)


def bin_age(age: int, age_bins: int) -> int:
    return min(int(age) // 10, age_bins - 1)


def _row_fields(row) -> tuple:
    if isinstance(row, RecordRow):
        return row.site_id, row.gender, row.age
    return row["site_id"], row["gender"], row["age"]


def ingest_records(rows: Iterable[Union[RecordRow, Mapping]], age_bins: int = 9,
                   gender_classes: Sequence[str] = GENDER_CLASSES,
                   rejected: Optional[Counter] = None) -> list[SiteProfile]:
    """Tally per-patient rows into per-site gender and age count profiles.

    Rows with an unknown gender label or an unusable age are skipped; the
    reasons are tallied into ``rejected`` when given. Sites are returned in
    order of first appearance.
    """
    labels = age_bin_labels(age_bins)
    lookup = {g.lower(): i for i, g in enumerate(gender_classes)}
    rejected = Counter() if rejected is None else rejected
    gender_counts: dict[str, list[int]] = {}
    age_counts: dict[str, list[int]] = {}
    seen = 0
    for row in rows:
        seen += 1
        try:
            site_id, gender, age = _row_fields(row)
        except (KeyError, TypeError):
            rejected["malformed"] += 1
            continue
        site_id = str(site_id).strip()
        gender_counts.setdefault(site_id, [0] * len(gender_classes))
        age_counts.setdefault(site_id, [0] * age_bins)
        g = lookup.get(str(gender).strip().lower())
        if g is None:
            rejected["unknown_gender"] += 1
            continue
        try:
            age_f = float(age)
        except (TypeError, ValueError):
            rejected["bad_age"] += 1
            continue
        if not age_f.is_integer() or not (0 <= age_f < MAX_AGE):
            rejected["bad_age"] += 1
            continue
        gender_counts[site_id][g] += 1
        age_counts[site_id][bin_age(int(age_f), age_bins)] += 1
    if seen == 0:
        raise ValidationError("no records to ingest")
    for reason, n in sorted(rejected.items()):
        log.warning("skipped %d rows: %s", n, reason)

    sites = []
    for site_id, gc in gender_counts.items():
        if sum(gc) == 0:
            log.warning("site %s has no usable rows; dropped", site_id)
            rejected["empty_site"] += 1
            continue
        sites.append(SiteProfile(
            site_id,
            gender=CategoricalDistribution(tuple(gender_classes), counts=tuple(gc)),
            age=CategoricalDistribution(labels, counts=tuple(age_counts[site_id])),
        ))
    if not sites:
        raise ValidationError("no usable records")
    return sites


def read_records_csv(path, age_bins: int = 9,
                     gender_classes: Sequence[str] = GENDER_CLASSES,
                     rejected: Optional[Counter] = None) -> list[SiteProfile]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"site_id", "gender", "age"} - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(f"records CSV lacks columns: {sorted(missing)}")
        return ingest_records(reader, age_bins, gender_classes, rejected)


def ingest_histogram(doc: Mapping) -> list[SiteProfile]:
    """Profiles from ``{"schema": {...}, "sites": [{"id", "gender_counts", "age_counts"}]}``."""
    try:
        schema = doc["schema"]
        gender_classes = tuple(schema.get("gender_classes", GENDER_CLASSES))
        labels = age_bin_labels(int(schema["age_bins"]))
        entries = doc["sites"]
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed histogram document: {exc}") from None
    if not entries:
        raise ValidationError("histogram document has no sites")
    sites, seen = [], set()
    for e in entries:
        sid = str(e["id"])
        if sid in seen:
            raise ValidationError(f"duplicate site id {sid}")
        seen.add(sid)
        sites.append(SiteProfile(
            sid,
            gender=CategoricalDistribution(gender_classes, counts=tuple(e["gender_counts"])),
            age=CategoricalDistribution(labels, counts=tuple(e["age_counts"])),
        ))
    return sites


def to_histogram(sites: Sequence[SiteProfile]) -> dict:
    if not sites:
        raise ValidationError("no sites")
    if not all(s.has_counts for s in sites):
        raise ValidationError("histogram output needs raw counts for every site")
    gender_classes = sites[0].gender.classes
    age_bins = sites[0].age.k
    for s in sites:
        if s.gender.classes != gender_classes or s.age.classes != age_bin_labels(age_bins):
            raise ValidationError(f"site {s.id} does not share the common schema")
    return {
        "schema": {"gender_classes": list(gender_classes), "age_bins": age_bins},
        "sites": [
            {"id": s.id, "gender_counts": list(s.gender.counts),
             "age_counts": list(s.age.counts)}
            for s in sites
        ],
    }


def ingest_profiles(doc: Mapping) -> list[SiteProfile]:
    """Entropy-only profiles from a document with percent-scale entropies."""
    try:
        entries = doc["sites"]
    except (KeyError, TypeError):
        raise ValidationError("profile document needs a 'sites' list") from None
    if not entries:
        raise ValidationError("profile document has no sites")
    sites, seen = [], set()
    for e in entries:
        try:
            sid = str(e["id"])
            g = float(e["gender_entropy_pct"])
            a = float(e["age_entropy_pct"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed site entry {e!r}: {exc}") from None
        if sid in seen:
            raise ValidationError(f"duplicate site id {sid}")
        seen.add(sid)
        for name, v in (("gender_entropy_pct", g), ("age_entropy_pct", a)):
            if not (0.0 <= v <= 100.0):
                raise ValidationError(f"site {sid}: {name} {v} outside [0, 100]")
        sites.append(SiteProfile(sid, gender_entropy=g / 100.0, age_entropy=a / 100.0))
    return sites


def to_profiles(sites: Sequence[SiteProfile]) -> dict:
    return {"sites": [
        {"id": s.id, "gender_entropy_pct": 100.0 * s.h_gender,
         "age_entropy_pct": 100.0 * s.h_age}
        for s in sites
    ]}


def load_document(doc: Mapping) -> list[SiteProfile]:
    if isinstance(doc, Mapping) and "schema" in doc:
        return ingest_histogram(doc)
    return ingest_profiles(doc)


def load_fixture(name: str) -> list[SiteProfile]:
    name = name.removesuffix(".json")
    if name not in FIXTURES:
        raise ValidationError(f"unknown fixture {name!r}")
    text = resources.files("easb").joinpath("fixtures", f"{name}.json").read_text()
    return ingest_profiles(json.loads(text))


def load_sites(path, age_bins: int = 9) -> list[SiteProfile]:
    """Load sites from a records CSV or a histogram / profile JSON file.

    A bare ``scenario1.json`` or ``scenario2.json`` that does not exist on disk
    resolves to the bundled fixture.
    """
    p = Path(path)
    if not p.exists():
        if p.name == str(path) and p.stem in FIXTURES and p.suffix == ".json":
            return load_fixture(p.stem)
        raise FileNotFoundError(str(path))
    if p.suffix.lower() == ".csv":
        return read_records_csv(p, age_bins)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return load_document(doc)


@dataclass(frozen=True)
class ScenarioSpec:
    """Recipe for a synthetic scenario.

    ``imbalance_mix`` gives the fractions of balanced, gender-skewed,
    age-skewed and doubly-skewed sites, in that order.
    """

    n_sites: int = 8
    seed: int = 0
    age_bins: int = 9
    imbalance_mix: tuple[float, float, float, float] = (0.1, 0.3, 0.3, 0.3)
    population_per_site: tuple[int, int] = (200, 1000)

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValidationError("n_sites must be at least 2")
        if not (0 <= self.seed < 2 ** 64):
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.age_bins < 2:
            raise ValidationError("age_bins must be at least 2")
        mix = tuple(float(f) for f in self.imbalance_mix)
        if len(mix) != 4 or any(not (0.0 <= f <= 1.0) for f in mix):
            raise ValidationError("imbalance_mix needs four fractions in [0, 1]")
        if abs(sum(mix) - 1.0) > 1e-9:
            raise ValidationError("imbalance_mix fractions must sum to 1")
        object.__setattr__(self, "imbalance_mix", mix)
        lo, hi = self.population_per_site
        if not (1 <= lo <= hi):
            raise ValidationError("population_per_site must be a nonempty range of positive sizes")


def _allocate(n: int, mix: Sequence[float]) -> list[int]:
    """Largest-remainder split of ``n`` sites over the archetype fractions."""
    raw = [f * n for f in mix]
    base = [int(r) for r in raw]
    order = sorted(range(len(mix)), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[: n - sum(base)]:
        base[i] += 1
    return base


def _balanced_probs(rng: SplitMix64, k: int) -> np.ndarray:
    w = np.array([rng.uniform(0.8, 1.2) for _ in range(k)])
    return w / w.sum()


def _skewed_probs(rng: SplitMix64, k: int) -> np.ndarray:
    major = rng.uniform(0.93, 0.97)
    dominant = rng.integers(0, k - 1)
    rest = np.array([rng.uniform(0.8, 1.2) for _ in range(k - 1)])
    rest = rest / rest.sum() * (1.0 - major)
    return np.insert(rest, dominant, major)


def _sample_counts(rng: SplitMix64, probs: np.ndarray, n: int) -> tuple[int, ...]:
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, rng.random_array(n), side="right")
    idx = np.minimum(idx, len(probs) - 1)
    return tuple(int(c) for c in np.bincount(idx, minlength=len(probs)))


def archetype_probs(rng: SplitMix64, archetype: str, age_bins: int):
    """Target (gender, age) probabilities for one site of ``archetype``."""
    skew_g = archetype in ("gender", "both")
    skew_a = archetype in ("age", "both")
    if skew_g:
        gender = _skewed_probs(rng, 2)
    else:
        major = rng.uniform(0.5, 0.6)
        gender = np.array([major, 1 - major]) if rng.random() < 0.5 else np.array([1 - major, major])
    age = _skewed_probs(rng, age_bins) if skew_a else _balanced_probs(rng, age_bins)
    return gender, age


def generate_scenario(spec: ScenarioSpec) -> list[SiteProfile]:
    """Sites with raw counts drawn from archetype targets; depends only on ``spec``."""
    rng = SplitMix64(spec.seed)
    kinds = [a for a, n in zip(ARCHETYPES, _allocate(spec.n_sites, spec.imbalance_mix))
             for _ in range(n)]
    rng.shuffle(kinds)
    labels = age_bin_labels(spec.age_bins)
    lo, hi = spec.population_per_site
    width = len(str(spec.n_sites - 1))
    sites = []
    for i, kind in enumerate(kinds):
        gender_p, age_p = archetype_probs(rng, kind, spec.age_bins)
        n = rng.integers(lo, hi)
        sites.append(SiteProfile(
            f"S{i:0{width}d}",
            gender=CategoricalDistribution(GENDER_CLASSES, counts=_sample_counts(rng, gender_p, n)),
            age=CategoricalDistribution(labels, counts=_sample_counts(rng, age_p, n)),
        ))
    return sites


def scenario_archetypes(spec: ScenarioSpec) -> list[str]:
    """Archetype of each generated site, in the order :func:`generate_scenario` emits them."""
    rng = SplitMix64(spec.seed)
    kinds = [a for a, n in zip(ARCHETYPES, _allocate(spec.n_sites, spec.imbalance_mix))
             for _ in range(n)]
    rng.shuffle(kinds)
    return kinds
