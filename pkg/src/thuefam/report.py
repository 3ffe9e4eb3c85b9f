"""JSON sweep reports (schema 1). Big integers travel as decimal strings."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import __version__
from .search import SolutionRecord

SCHEMA = 1


@dataclass(frozen=True)
class CaseSummary:
    n: int
    j: int
    q: int
    p: int
    epsilon_lower: str
    Y: str
    Y_ceil: int
    convergents_checked: int
    prec_bits: int
    solutions: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q"], d["p"], d["Y_ceil"] = str(self.q), str(self.p), str(self.Y_ceil)
        d["solutions"] = [[str(x), str(y)] for x, y in self.solutions]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CaseSummary":
        return cls(
            n=int(d["n"]), j=int(d["j"]), q=int(d["q"]), p=int(d["p"]),
            epsilon_lower=d["epsilon_lower"], Y=d["Y"], Y_ceil=int(d["Y_ceil"]),
            convergents_checked=int(d["convergents_checked"]), prec_bits=int(d["prec_bits"]),
            solutions=tuple((int(x), int(y)) for x, y in d["solutions"]),
        )


@dataclass
class SweepReport:
    meta: dict
    cases: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    solutions: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @classmethod
    def new(cls, config: dict | None = None) -> "SweepReport":
        meta = {"version": __version__,
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "config": dict(config or {})}
        return cls(meta=meta)

    @property
    def ok(self) -> bool:
        return not self.failures and not any(not s.is_trivial for s in self.solutions)

    def sort(self) -> None:
        self.cases.sort(key=lambda c: (c.n, c.j))
        self.failures.sort(key=lambda f: (f["n"], f["j"]))
        self.solutions.sort(key=lambda s: (s.n, s.y, s.x))

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "meta": self.meta,
            "cases": [c.to_dict() for c in self.cases],
            "failures": list(self.failures),
            "solutions": [s.to_dict() for s in self.solutions],
            "timing": dict(self.timing),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            meta=d["meta"],
            cases=[CaseSummary.from_dict(c) for c in d["cases"]],
            failures=list(d["failures"]),
            solutions=[SolutionRecord.from_dict(s) for s in d["solutions"]],
            timing=dict(d["timing"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "SweepReport":
        return cls.from_dict(json.loads(text))

    def deterministic_view(self) -> dict:
        """Everything except wall-clock fields."""
        d = self.to_dict()
        d["meta"] = {k: v for k, v in d["meta"].items() if k != "timestamp"}
        d.pop("timing")
        return d
