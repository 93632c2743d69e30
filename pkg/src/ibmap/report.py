"""Run reports emitted by the learners."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from ibmap.graph import Structure


@dataclass
class RunReport:
    algorithm: str
    structure: Structure
    score: float | None = None
    ascents: int | None = None  # M for hill climbing
    tests: int = 0
    cache_hits: int = 0
    cost_units: int = 0
    wall_time: float = 0.0
    truncated: bool = False
    budget_exhausted: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("structure")
        d["n"] = self.structure.n
        d["edges"] = [list(e) for e in self.structure.edges()]
        if self.score is not None:
            d["score"] = round(self.score, 6)
        lookups = self.tests + self.cache_hits
        d["hit_rate"] = round(self.cache_hits / lookups, 6) if lookups else 0.0
        d["wall_time"] = round(self.wall_time, 6)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def stable_dict(self) -> dict:
        """Report without timing fields, for reproducibility comparisons."""
        d = self.to_dict()
        d.pop("wall_time", None)
        return d
