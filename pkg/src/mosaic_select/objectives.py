"""Cover feasibility and the four objective components.

Every component is minimized.  The component order (cost, cloud_area,
resolution_sum, max_incidence) is fixed and used everywhere: serialized
vectors, Pareto cuts, epsilon bounds, hypervolume reference points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .instance import DiscreteInstance

COST, CLOUD, RESOLUTION, INCIDENCE = range(4)
OBJECTIVE_NAMES = ("cost", "cloud_area", "resolution_sum", "max_incidence")

__all__ = [
    "COST",
    "CLOUD",
    "RESOLUTION",
    "INCIDENCE",
    "OBJECTIVE_NAMES",
    "ObjectiveVector",
    "Cover",
    "NotACoverError",
    "is_cover",
    "evaluate",
    "dominates",
]


class NotACoverError(ValueError):
    """Objective evaluation was requested for a selection that is not a cover."""


class ObjectiveVector(NamedTuple):
    cost: int
    cloud_area: int
    resolution_sum: int
    max_incidence: int


@dataclass(frozen=True)
class Cover:
    """A feasible image selection together with its evaluated objectives."""

    taken: frozenset[int]
    objectives: ObjectiveVector


def is_cover(inst: DiscreteInstance, taken: Iterable[int]) -> bool:
    """True iff the selected images' parts jointly cover the whole universe."""
    got: set[int] = set()
    for i in taken:
        got |= inst.parts_of[i]
    return len(got) == inst.n


def evaluate(inst: DiscreteInstance, taken: Iterable[int]) -> ObjectiveVector:
    """Objective vector of a cover.

    cost: sum of selected image costs.  cloud_area: total area of parts no
    selected image sees cloud-free.  resolution_sum: per part, the best
    (lowest) resolution among selected images covering it, summed.
    max_incidence: worst selected incidence angle.  Raises NotACoverError if
    the selection leaves any part uncovered.
    """
    chosen = sorted(set(taken))
    if not chosen or not is_cover(inst, chosen):
        raise NotACoverError("selection does not cover the universe")
    cost = sum(inst.cost[i] for i in chosen)
    max_inc = max(inst.angle[i] for i in chosen)
    cloud = 0
    res_sum = 0
    for k in range(inst.n):
        clear = False
        best_res = None
        for i in chosen:
            if k in inst.parts_of[i]:
                if best_res is None or inst.resolution[i] < best_res:
                    best_res = inst.resolution[i]
                if k not in inst.cloudy_of[i]:
                    clear = True
        if not clear:
            cloud += inst.part_area[k]
        res_sum += best_res
    return ObjectiveVector(cost, cloud, res_sum, max_inc)


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Strict Pareto dominance under minimization: a <= b everywhere and a != b."""
    return a != b and all(x <= y for x, y in zip(a, b))
