from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Tag(str, Enum):
    NO_POSITIVE_UNDER_COND5 = "NoPositiveSolutionUnderCond5"
    NO_POSITIVE_NONINCREASING = "NoPositiveNonincreasing"
    POSITIVE_SOLUTION_EXISTS = "PositiveSolutionExists"
    OSCILLATORY = "Oscillatory"
    NON_OSCILLATORY = "NonOscillatory"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass
class Verdict:
    tag: Tag
    theorem: str
    evidence: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.tag is not Tag.INCONCLUSIVE

    def as_items(self, prefix: str = ""):
        items = [(f"{prefix}verdict", str(self.tag)), (f"{prefix}theorem", self.theorem)]
        for key in self.evidence:
            items.append((f"{prefix}evidence.{key}", self.evidence[key]))
        for i, note in enumerate(self.caveats):
            items.append((f"{prefix}caveat.{i}", note))
        return items
