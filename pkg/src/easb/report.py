"""Balance reports and their table / CSV / JSON renderings."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["ClusterRow", "BalanceReport", "render_rows"]


@dataclass
class ClusterRow:
    members: list[str]
    gender_entropy_pct: float
    age_entropy_pct: float
    hw: float
    pooling_mode: str


@dataclass
class BalanceReport:
    method: str
    params: dict
    per_cluster: list[ClusterRow]
    averages: dict
    merge_log: list[dict] = field(default_factory=list)
    weighted: bool = False

    @classmethod
    def from_partition(cls, p, weighted: bool = False) -> "BalanceReport":
        rows = [
            ClusterRow(list(c.members), 100.0 * c.gender_entropy,
                       100.0 * c.age_entropy, c.hw, c.pooling_mode)
            for c in p.clusters
        ]
        w = np.array([c.size for c in p.clusters], dtype=float) if weighted else None
        averages = {
            "age_entropy_pct": float(np.average([r.age_entropy_pct for r in rows], weights=w)),
            "gender_entropy_pct": float(np.average([r.gender_entropy_pct for r in rows], weights=w)),
            "mean_hw": float(np.average([r.hw for r in rows], weights=w)),
        }
        merge_log = [
            {"step": m.step, "cluster_a": list(m.cluster_a),
             "cluster_b": list(m.cluster_b), "score": m.score}
            for m in p.merge_log
        ]
        return cls(p.method, dict(p.params), rows, averages, merge_log, weighted)

    @property
    def pooling_modes(self) -> set[str]:
        return {r.pooling_mode for r in self.per_cluster}

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BalanceReport":
        d = dict(d)
        d["per_cluster"] = [ClusterRow(**r) for r in d["per_cluster"]]
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def cluster_table(self) -> list[dict]:
        return [
            {"cluster": i, "members": " ".join(r.members),
             "gender_entropy_pct": r.gender_entropy_pct,
             "age_entropy_pct": r.age_entropy_pct, "hw": r.hw,
             "pooling_mode": r.pooling_mode}
            for i, r in enumerate(self.per_cluster)
        ]

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json() + "\n"
        rows = self.cluster_table()
        rows.append({"cluster": "avg", "members": "",
                     "gender_entropy_pct": self.averages["gender_entropy_pct"],
                     "age_entropy_pct": self.averages["age_entropy_pct"],
                     "hw": self.averages["mean_hw"], "pooling_mode": ""})
        out = render_rows(rows, fmt)
        if fmt == "table":
            head = f"method: {self.method}  params: {json.dumps(self.params)}"
            if "averaged" in self.pooling_modes:
                head += "\nnote: entropy-only profiles; cluster entropies are member averages"
            out = head + "\n" + out
        return out


def _fmt_cell(key: str, value) -> str:
    if isinstance(value, float):
        if key.endswith("_pct"):
            return f"{value:.2f}"
        return f"{value:.4f}"
    return str(value)


def render_rows(rows: list[dict], fmt: str) -> str:
    """Render a list of flat dicts as an aligned table, CSV or JSON."""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    cells = [[_fmt_cell(k, r[k]) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for c in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip())
    return "\n".join(lines) + "\n"
