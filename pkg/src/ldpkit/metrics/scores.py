from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class MetricScore:
    name: str
    value: float
    scale: tuple = (0.0, 100.0)
    segment_count: int = 0

    def __post_init__(self):
        lo, hi = self.scale
        if not lo - 1e-9 <= self.value <= hi + 1e-9:
            raise ValueError(f"{self.name} value {self.value} outside {self.scale}")

    def __float__(self):
        return float(self.value)


@dataclass
class NGramStats:
    """Per-order matched / hypothesis / reference n-gram counts."""

    matched: list = field(default_factory=list)
    hyp: list = field(default_factory=list)
    ref: list = field(default_factory=list)

    @classmethod
    def zeros(cls, orders):
        return cls([0] * orders, [0] * orders, [0] * orders)

    def __iadd__(self, other):
        for name in ("matched", "hyp", "ref"):
            mine, theirs = getattr(self, name), getattr(other, name)
            for i, v in enumerate(theirs):
                mine[i] += v
        return self

    def check(self):
        for m, h, r in zip(self.matched, self.hyp, self.ref):
            assert m <= min(h, r), "matched count exceeds hypothesis/reference count"
        return self
