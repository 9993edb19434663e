"""Exact search core: depth-first branch and bound over image selections.

Branching mirrors the greedy set-cover heuristic: always branch on the free
image covering the most still-uncovered parts (ties to the lowest index) and
try "take" before "reject", so with no side constraints the first cover found
is exactly the greedy cover.  Propagation maintains coverability: once an
uncovered part has no remaining candidate image the node fails, and once it
has exactly one that image is forced taken.  The forcing rule only fires
after a rejection exists; firing it at the root would pull in globally
single-provider images early and change the first-found cover away from the
greedy sequence, without pruning anything the root branching would not.

Pruning works on component-wise objective lower bounds: cost and incidence
from the taken images, cloud area from parts no non-rejected image sees
clear, resolution from the per-part minimum over non-rejected images.  The
latter two only change when an image is rejected and are recomputed just
then.  Bounds are checked against upper-bound constraints, Pareto cuts
(require strict improvement over a given vector somewhere) and, when
minimizing, the incumbent.

Budgets combine a wall-clock and a node cap; exhausting either yields a
TIMEOUT outcome, which is distinct from a proven UNSAT.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .instance import DiscreteInstance
from .objectives import (
    COST,
    CLOUD,
    INCIDENCE,
    RESOLUTION,
    Cover,
    NotACoverError,
    ObjectiveVector,
)

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"
OPTIMAL = "OPTIMAL"

__all__ = [
    "SAT",
    "UNSAT",
    "TIMEOUT",
    "OPTIMAL",
    "Budget",
    "BudgetClock",
    "ObjectiveBound",
    "ParetoCut",
    "SolveStats",
    "SolveResult",
    "SearchEngine",
    "solve_satisfy",
    "solve_min",
    "greedy_cover",
]


@dataclass(frozen=True)
class Budget:
    """Wall-clock and node-count caps; None means unlimited."""

    max_ms: float | None = None
    max_nodes: int | None = None

    def start(self) -> "BudgetClock":
        return BudgetClock(self)


class BudgetClock:
    """Countdown shared by consecutive solver calls, e.g. one front enumeration."""

    _CHECK_EVERY = 128  # wall-clock is polled once per this many nodes

    def __init__(self, budget: Budget | None = None):
        budget = budget or Budget()
        self.deadline = None if budget.max_ms is None else time.monotonic() + budget.max_ms / 1000.0
        self.nodes_left = budget.max_nodes
        self._tick = 0

    def spend_node(self) -> bool:
        """Account one search node; False once the budget is exhausted."""
        if self.nodes_left is not None:
            if self.nodes_left <= 0:
                return False
            self.nodes_left -= 1
        if self.deadline is not None:
            self._tick += 1
            if self._tick >= self._CHECK_EVERY:
                self._tick = 0
                if time.monotonic() >= self.deadline:
                    self.nodes_left = 0
                    return False
        return True


def _as_clock(budget) -> BudgetClock:
    if isinstance(budget, BudgetClock):
        return budget
    return BudgetClock(budget)


@dataclass(frozen=True)
class ObjectiveBound:
    """Constraint: objective component ``objective`` must be <= ``upper``."""

    objective: int
    upper: int


@dataclass(frozen=True)
class ParetoCut:
    """Constraint: improve strictly on ``vector`` in at least one component."""

    vector: ObjectiveVector


@dataclass
class SolveStats:
    nodes: int = 0
    failures: int = 0
    incumbents: int = 0
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes,
            "failures": self.failures,
            "incumbents": self.incumbents,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def merge(self, other: "SolveStats") -> None:
        self.nodes += other.nodes
        self.failures += other.failures
        self.incumbents += other.incumbents
        self.elapsed_ms += other.elapsed_ms


@dataclass(frozen=True)
class SolveResult:
    status: str
    cover: Cover | None
    stats: SolveStats


class _OutOfBudget(Exception):
    pass


class SearchEngine:
    """Reusable per-instance search state (bitmask tables are built once).

    Parts live in one big integer per image (bit k set when the image covers
    part k) and images in one integer per part, so propagation and bound
    updates are bit operations.
    """

    def __init__(self, inst: DiscreteInstance):
        inst.validate()
        self.inst = inst
        n, m = inst.n, inst.m
        self.n = n
        self.m = m
        self.full_parts = (1 << n) - 1
        self.all_images = (1 << m) - 1
        part_bits = []
        clear_bits = []
        providers = [0] * n
        clear_providers = [0] * n
        for i in range(m):
            pb = 0
            cb = 0
            for k in inst.parts_of[i]:
                pb |= 1 << k
                providers[k] |= 1 << i
                if k not in inst.cloudy_of[i]:
                    cb |= 1 << k
                    clear_providers[k] |= 1 << i
            part_bits.append(pb)
            clear_bits.append(cb)
        self.part_bits = part_bits
        self.clear_bits = clear_bits
        self.providers = providers
        self.clear_providers = clear_providers
        self.W = list(inst.cost)
        self.R = list(inst.resolution)
        self.F = list(inst.angle)
        self.area = list(inst.part_area)
        self.res_order = [
            sorted((inst.resolution[i], i) for i in range(m) if (providers[k] >> i) & 1)
            for k in range(n)
        ]
        self.res_lb_base = sum(order[0][0] for order in self.res_order)
        self.cloud_lb_base = sum(self.area[k] for k in range(n) if clear_providers[k] == 0)

    # -- full-selection evaluation (bit-parallel twin of objectives.evaluate)

    def evaluate_mask(self, taken: int) -> ObjectiveVector:
        if taken == 0:
            raise NotACoverError("selection does not cover the universe")
        cost = 0
        inc = 0
        t = taken
        covered = 0
        while t:
            low = t & -t
            t ^= low
            i = low.bit_length() - 1
            cost += self.W[i]
            if self.F[i] > inc:
                inc = self.F[i]
            covered |= self.part_bits[i]
        if covered != self.full_parts:
            raise NotACoverError("selection does not cover the universe")
        cloud = 0
        res = 0
        for k in range(self.n):
            if self.clear_providers[k] & taken == 0:
                cloud += self.area[k]
            for r, i in self.res_order[k]:
                if (taken >> i) & 1:
                    res += r
                    break
        return ObjectiveVector(cost, cloud, res, inc)

    def cover_from_mask(self, taken: int) -> Cover:
        return Cover(
            taken=frozenset(i for i in range(self.m) if (taken >> i) & 1),
            objectives=self.evaluate_mask(taken),
        )

    def greedy_mask(self) -> int:
        """Greedy set cover: repeatedly take the image covering the most
        uncovered parts, ties to the lowest index."""
        uncovered = self.full_parts
        mask = 0
        while uncovered:
            best_i = -1
            best_c = 0
            for i in range(self.m):
                if (mask >> i) & 1:
                    continue
                c = (self.part_bits[i] & uncovered).bit_count()
                if c > best_c:
                    best_c = c
                    best_i = i
            if best_i < 0:
                raise ValueError("instance is not coverable")
            mask |= 1 << best_i
            uncovered &= ~self.part_bits[best_i]
        return mask

    # -- core search

    def _cloud_lb(self, rejected: int) -> int:
        total = 0
        not_rejected = ~rejected
        for k in range(self.n):
            if self.clear_providers[k] & not_rejected == 0:
                total += self.area[k]
        return total

    def _res_lb(self, rejected: int) -> int:
        total = 0
        for order in self.res_order:
            for r, i in order:
                if not (rejected >> i) & 1:
                    total += r
                    break
        return total

    def _prepare(self, constraints):
        bounds: list[tuple[int, int]] = []
        cuts: list[tuple[int, int, int, int]] = []
        for c in constraints:
            if isinstance(c, ObjectiveBound):
                if not 0 <= c.objective <= 3:
                    raise ValueError(f"unknown objective index {c.objective}")
                bounds.append((c.objective, c.upper))
            elif isinstance(c, ParetoCut):
                cuts.append(tuple(c.vector))
            else:
                raise TypeError(f"unsupported constraint {c!r}")
        # Single-image prefilters: an image whose own cost or angle already
        # exceeds an upper bound can never be part of an admissible cover.
        static_reject = 0
        inc_cap = min((u for o, u in bounds if o == INCIDENCE), default=None)
        cost_cap = min((u for o, u in bounds if o == COST), default=None)
        if inc_cap is not None or cost_cap is not None:
            for i in range(self.m):
                if inc_cap is not None and self.F[i] > inc_cap:
                    static_reject |= 1 << i
                elif cost_cap is not None and self.W[i] > cost_cap:
                    static_reject |= 1 << i
        return bounds, cuts, static_reject

    def _search(self, constraints, clock: BudgetClock, minimize: int | None):
        """Run the DFS.  minimize=None: stop at the first admissible cover.
        Otherwise exhaust the tree, keeping the best incumbent for that
        objective.  Returns (status, best_mask)."""
        bounds, cuts, static_reject = self._prepare(constraints)
        part_bits = self.part_bits
        providers = self.providers
        W, F = self.W, self.F
        stats = self.stats
        need_cloud = bool(cuts) or minimize == CLOUD or any(o == CLOUD for o, _ in bounds)
        need_res = bool(cuts) or minimize == RESOLUTION or any(o == RESOLUTION for o, _ in bounds)
        best: list = [None, None]  # [value, mask]
        found: list = [None]

        def admissible(vec) -> bool:
            for o, u in bounds:
                if vec[o] > u:
                    return False
            for v in cuts:
                if vec[0] >= v[0] and vec[1] >= v[1] and vec[2] >= v[2] and vec[3] >= v[3]:
                    return False
            return True

        def node(taken, rejected, uncovered, cost_lb, inc_lb, cloud_lb, res_lb, dirty, fresh) -> bool:
            if not clock.spend_node():
                raise _OutOfBudget
            stats.nodes += 1
            if dirty:
                forced = 0
                rem = uncovered
                while rem:
                    low = rem & -rem
                    rem ^= low
                    live = providers[low.bit_length() - 1] & ~rejected
                    if live == 0:
                        stats.failures += 1
                        return False
                    if live & (live - 1) == 0:
                        forced |= live
                forced &= ~taken
                while forced:
                    low = forced & -forced
                    forced ^= low
                    i = low.bit_length() - 1
                    taken |= low
                    uncovered &= ~part_bits[i]
                    cost_lb += W[i]
                    if F[i] > inc_lb:
                        inc_lb = F[i]
                    fresh = True
                if need_cloud:
                    cloud_lb = self._cloud_lb(rejected)
                if need_res:
                    res_lb = self._res_lb(rejected)
            # prune on component-wise lower bounds
            lb = (cost_lb, cloud_lb, res_lb, inc_lb)
            for o, u in bounds:
                if lb[o] > u:
                    stats.failures += 1
                    return False
            for v in cuts:
                if cost_lb >= v[0] and cloud_lb >= v[1] and res_lb >= v[2] and inc_lb >= v[3]:
                    stats.failures += 1
                    return False
            if minimize is not None and best[0] is not None and lb[minimize] >= best[0]:
                stats.failures += 1
                return False
            if uncovered == 0 and fresh:
                # the current taken set is a cover; supersets may still differ
                # on cloud/resolution, so branching continues below
                vec = self.evaluate_mask(taken)
                if admissible(vec):
                    if minimize is None:
                        stats.incumbents += 1
                        found[0] = taken
                        return True
                    if best[0] is None or vec[minimize] < best[0]:
                        stats.incumbents += 1
                        best[0] = vec[minimize]
                        best[1] = taken
                        if lb[minimize] >= best[0]:
                            return False
            free = ~(taken | rejected) & self.all_images
            if free == 0:
                if uncovered:
                    stats.failures += 1
                return False
            best_i = -1
            best_c = -1
            fm = free
            while fm:
                low = fm & -fm
                fm ^= low
                i = low.bit_length() - 1
                c = (part_bits[i] & uncovered).bit_count()
                if c > best_c:
                    best_c = c
                    best_i = i
            bit = 1 << best_i
            if node(taken | bit, rejected, uncovered & ~part_bits[best_i],
                    cost_lb + W[best_i], max(inc_lb, F[best_i]),
                    cloud_lb, res_lb, False, True):
                return True
            return node(taken, rejected | bit, uncovered,
                        cost_lb, inc_lb, cloud_lb, res_lb, True, False)

        try:
            node(0, static_reject, self.full_parts, 0, 0,
                 self.cloud_lb_base, self.res_lb_base,
                 static_reject != 0, False)
        except _OutOfBudget:
            if minimize is None:
                return TIMEOUT, None
            return TIMEOUT, best[1]
        if minimize is None:
            if found[0] is not None:
                return SAT, found[0]
            return UNSAT, None
        if best[1] is not None:
            return OPTIMAL, best[1]
        return UNSAT, None

    def satisfy(self, constraints=(), clock: BudgetClock | None = None):
        """First admissible cover.  Returns (status, mask or None, stats)."""
        clock = clock or BudgetClock()
        self.stats = SolveStats()
        start = time.monotonic()
        status, mask = self._search(constraints, clock, None)
        self.stats.elapsed_ms = (time.monotonic() - start) * 1000.0
        return status, mask, self.stats

    def minimize(self, objective: int, constraints=(), clock: BudgetClock | None = None):
        """Minimize one objective component subject to the constraints.
        Returns (status, mask or None, stats); on TIMEOUT the mask is the
        best incumbent found, possibly None."""
        if not 0 <= objective <= 3:
            raise ValueError(f"unknown objective index {objective}")
        clock = clock or BudgetClock()
        self.stats = SolveStats()
        start = time.monotonic()
        status, mask = self._search(constraints, clock, objective)
        self.stats.elapsed_ms = (time.monotonic() - start) * 1000.0
        return status, mask, self.stats


def solve_satisfy(inst: DiscreteInstance, constraints=(), budget: Budget | None = None) -> SolveResult:
    """First cover admissible under the side constraints.

    Status SAT carries the cover; UNSAT proves none exists; TIMEOUT means the
    budget ran out first.
    """
    engine = SearchEngine(inst)
    status, mask, stats = engine.satisfy(constraints, _as_clock(budget))
    cover = engine.cover_from_mask(mask) if mask is not None else None
    return SolveResult(status=status, cover=cover, stats=stats)


def solve_min(inst: DiscreteInstance, objective: int, constraints=(), budget: Budget | None = None) -> SolveResult:
    """Minimize one objective component subject to the side constraints.

    Status OPTIMAL carries a proven optimum; TIMEOUT carries the best
    incumbent found so far, if any.
    """
    engine = SearchEngine(inst)
    status, mask, stats = engine.minimize(objective, constraints, _as_clock(budget))
    cover = engine.cover_from_mask(mask) if mask is not None else None
    return SolveResult(status=status, cover=cover, stats=stats)


def greedy_cover(inst: DiscreteInstance) -> Cover:
    """Plain greedy set cover (most new parts first, ties to lowest index)."""
    engine = SearchEngine(inst)
    return engine.cover_from_mask(engine.greedy_mask())
