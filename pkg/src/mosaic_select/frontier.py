"""Exact Pareto front enumeration, hypervolume and front serialization.

Two independent enumeration routes are provided on purpose: an iterated
satisfaction loop with dominance cuts, and an epsilon-constraint sweep with
lexicographic refinement.  Both produce the complete efficient frontier when
allowed to finish; a brute-force subset enumeration serves as the reference
for small instances.  Keep the routes separate: agreement between them is
the cross-check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .instance import DiscreteInstance, SchemaError, _read_json, write_text
from .objectives import (
    CLOUD,
    COST,
    INCIDENCE,
    RESOLUTION,
    ObjectiveVector,
    dominates,
    evaluate,
)
from .solver import (
    OPTIMAL,
    TIMEOUT,
    UNSAT,
    Budget,
    ObjectiveBound,
    ParetoCut,
    SearchEngine,
    SolveStats,
    _as_clock,
)

COMPLETE = "COMPLETE"
PARTIAL = "PARTIAL"


class _SweepTimeout(Exception):
    pass

__all__ = [
    "COMPLETE",
    "PARTIAL",
    "FrontPoint",
    "ParetoFront",
    "pareto_gavanelli",
    "saugmencon",
    "brute_force_front",
    "hypervolume",
    "score",
    "worst_bounds",
    "reference_point",
    "load_front",
    "save_front",
]


@dataclass(frozen=True)
class FrontPoint:
    """One efficient objective vector with a witness image selection."""

    objectives: ObjectiveVector
    images: tuple[str, ...]


@dataclass
class ParetoFront:
    """Enumerated front.  COMPLETE means proven exact; PARTIAL means the
    budget ran out and only the points found so far are listed (each still
    feasible and mutually non-dominated)."""

    points: tuple[FrontPoint, ...]
    status: str
    reference: ObjectiveVector
    meta: dict = field(default_factory=dict)

    def vectors(self) -> list[ObjectiveVector]:
        return [p.objectives for p in self.points]


def worst_bounds(inst: DiscreteInstance) -> ObjectiveVector:
    """Component-wise worst value any cover can reach."""
    res = 0
    for k in range(inst.n):
        res += max(inst.resolution[i] for i in range(inst.m) if k in inst.parts_of[i])
    return ObjectiveVector(
        cost=sum(inst.cost),
        cloud_area=sum(inst.part_area),
        resolution_sum=res,
        max_incidence=max(inst.angle),
    )


def reference_point(inst: DiscreteInstance) -> ObjectiveVector:
    """Hypervolume reference: one past the worst-case bound per component."""
    return ObjectiveVector(*(b + 1 for b in worst_bounds(inst)))


def _labels(inst: DiscreteInstance, mask: int) -> tuple[str, ...]:
    ids = inst.ids
    return tuple(
        (ids[i] if ids else str(i + 1))
        for i in range(inst.m)
        if (mask >> i) & 1
    )


def _canonical(points) -> tuple[FrontPoint, ...]:
    return tuple(sorted(points, key=lambda p: p.objectives))


def _insert_nondominated(front: list, vec: ObjectiveVector, witness) -> bool:
    """Archive insert: drop if weakly dominated, else evict what vec dominates."""
    for v, _ in front:
        if all(a <= b for a, b in zip(v, vec)):
            return False
    front[:] = [(v, w) for v, w in front if not dominates(vec, v)]
    front.append((vec, witness))
    return True


def pareto_gavanelli(inst: DiscreteInstance, budget: Budget | None = None) -> ParetoFront:
    """Front by iterated satisfaction under dominance cuts.

    Each round asks for any cover that strictly improves on every front point
    somewhere; the answer replaces what it dominates and tightens the cuts.
    An UNSAT round proves the archive is the complete efficient frontier.
    """
    clock = _as_clock(budget)
    engine = SearchEngine(inst)
    stats = SolveStats()
    front: list[tuple[ObjectiveVector, int]] = []
    status = COMPLETE
    rounds = 0
    while True:
        rounds += 1
        st, mask, s = engine.satisfy([ParetoCut(v) for v, _ in front], clock)
        stats.merge(s)
        if st == TIMEOUT:
            status = PARTIAL
            break
        if st == UNSAT:
            break
        vec = engine.evaluate_mask(mask)
        front[:] = [(v, w) for v, w in front if not dominates(vec, v)]
        front.append((vec, mask))
    points = [FrontPoint(v, _labels(inst, w)) for v, w in front]
    return ParetoFront(
        points=_canonical(points),
        status=status,
        reference=reference_point(inst),
        meta={"algorithm": "gavanelli", "rounds": rounds, "stats": stats.to_json()},
    )


def saugmencon(inst: DiscreteInstance, main_objective: int = COST, budget: Budget | None = None) -> ParetoFront:
    """Front by epsilon-constraint sweeps with lexicographic refinement.

    The three non-main objectives form nested integer epsilon grids (step 1).
    At each grid point the main objective is minimized and the solution is
    refined lexicographically so the recorded vector is efficient.  Two
    accelerations keep the sweep linear in the front size: when the most
    relaxed subproblem of a loop is infeasible the enclosing loop advances
    immediately, and after each solve or completed inner sweep the next
    epsilon jumps to one below the worst value actually attained, which
    provably skips only grid points whose optima were already enumerated.
    """
    if not 0 <= main_objective <= 3:
        raise ValueError(f"unknown objective index {main_objective}")
    clock = _as_clock(budget)
    engine = SearchEngine(inst)
    stats = SolveStats()
    order = [o for o in (INCIDENCE, RESOLUTION, CLOUD, COST) if o != main_objective][:3]
    lex_order = [main_objective] + order
    found: dict[ObjectiveVector, int] = {}
    status = COMPLETE

    def minimize(objective, bounds):
        st, mask, s = engine.minimize(objective, bounds, clock)
        stats.merge(s)
        if st == TIMEOUT:
            raise _SweepTimeout
        return (mask, engine.evaluate_mask(mask)) if st == OPTIMAL else (None, None)

    try:
        ideal = {}
        for o in order:
            mask, vec = minimize(o, [])
            if mask is None:
                # no cover satisfies even the unconstrained problem
                return ParetoFront((), COMPLETE, reference_point(inst),
                                   {"algorithm": "saugmencon", "stats": stats.to_json()})
            ideal[o] = vec[o]
        worst = worst_bounds(inst)

        def lex_solve(bounds):
            bs = list(bounds)
            result = None
            for o in lex_order:
                mask, vec = minimize(o, bs)
                if mask is None:
                    return None
                bs.append(ObjectiveBound(o, vec[o]))
                result = vec, mask
            return result

        def sweep(level, bounds):
            # returns (vectors found, whether the first subproblem was UNSAT)
            o = order[level]
            eps = worst[o]
            first = True
            vecs: list[ObjectiveVector] = []
            while eps >= ideal[o]:
                bs = bounds + [ObjectiveBound(o, eps)]
                if level == len(order) - 1:
                    got = lex_solve(bs)
                    if got is None:
                        return vecs, first
                    vec, mask = got
                    found.setdefault(vec, mask)
                    vecs.append(vec)
                    eps = vec[o] - 1
                else:
                    sub, infeasible = sweep(level + 1, bs)
                    if infeasible:
                        return vecs, first
                    vecs.extend(sub)
                    eps = max(v[o] for v in sub) - 1
                first = False
            return vecs, False

        sweep(0, [])
    except _SweepTimeout:
        status = PARTIAL

    archive: list[tuple[ObjectiveVector, int]] = []
    for vec in sorted(found):
        _insert_nondominated(archive, vec, found[vec])
    points = [FrontPoint(v, _labels(inst, w)) for v, w in archive]
    return ParetoFront(
        points=_canonical(points),
        status=status,
        reference=reference_point(inst),
        meta={"algorithm": "saugmencon", "main_objective": main_objective, "stats": stats.to_json()},
    )


def brute_force_front(inst: DiscreteInstance, max_images: int = 20) -> ParetoFront:
    """Reference front by exhaustive subset enumeration.

    Deliberately shares no search machinery with the solvers: subsets are
    enumerated as bitmasks, covers filtered, and objectives computed by the
    public evaluator.  Refuses instances above ``max_images`` images.
    """
    m = inst.m
    if m > max_images:
        raise ValueError(f"brute force enumeration refuses m={m} > {max_images} images")
    inst.validate()
    part_bits = [0] * m
    for i in range(m):
        for k in inst.parts_of[i]:
            part_bits[i] |= 1 << k
    full = (1 << inst.n) - 1
    coverage = [0] * (1 << m)
    front: list[tuple[ObjectiveVector, int]] = []
    for s in range(1, 1 << m):
        low = s & -s
        coverage[s] = coverage[s ^ low] | part_bits[low.bit_length() - 1]
        if coverage[s] == full:
            vec = evaluate(inst, [i for i in range(m) if (s >> i) & 1])
            _insert_nondominated(front, vec, s)
    points = [FrontPoint(v, _labels(inst, w)) for v, w in front]
    return ParetoFront(
        points=_canonical(points),
        status=COMPLETE,
        reference=reference_point(inst),
        meta={"algorithm": "brute"},
    )


# ---------------------------------------------------------------------------
# Hypervolume and scoring


def _minimal(pts: list[tuple]) -> list[tuple]:
    uniq = sorted(set(pts))
    out = []
    for p in uniq:
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in uniq):
            out.append(p)
    return out


def _hv(pts: list[tuple], ref: tuple):
    d = len(ref)
    if d == 1:
        return ref[0] - min(p[0] for p in pts)
    if d == 2:
        # staircase sweep: minimal sets sort ascending in x, descending in y
        total = 0
        prev_y = ref[1]
        for x, y in sorted(pts):
            total += (ref[0] - x) * (prev_y - y)
            prev_y = y
        return total
    values = sorted({p[0] for p in pts})
    total = 0
    for t, v in enumerate(values):
        nxt = values[t + 1] if t + 1 < len(values) else ref[0]
        width = nxt - v
        if width <= 0:
            continue
        active = _minimal([p[1:] for p in pts if p[0] <= v])
        total += width * _hv(active, ref[1:])
    return total


def hypervolume(front, reference) -> int:
    """Exact dominated hypervolume under minimization, by recursive slicing.

    ``front`` is a ParetoFront or an iterable of objective vectors; every
    point must strictly dominate the reference point component-wise.  With
    integer inputs the result is exact integer arithmetic.  An empty front
    has hypervolume 0.
    """
    if isinstance(front, ParetoFront):
        pts = [tuple(p.objectives) for p in front.points]
    else:
        pts = [tuple(p) for p in front]
    ref = tuple(reference)
    if not pts:
        return 0
    if not all(len(p) == len(ref) for p in pts):
        raise ValueError("front points and reference point disagree on dimension")
    for p in pts:
        if any(c >= r for c, r in zip(p, ref)):
            raise ValueError(f"front point {p} does not strictly dominate the reference point {ref}")
    return _hv(_minimal(pts), ref)


def score(hypervolumes) -> dict[str, float]:
    """Normalize hypervolumes to [0, 1] by dividing by the best.

    All-zero input (every strategy produced nothing) maps to all-zero scores.
    """
    values = dict(hypervolumes)
    best = max(values.values(), default=0)
    if best <= 0:
        return {k: 0.0 for k in values}
    return {k: v / best for k, v in values.items()}


# ---------------------------------------------------------------------------
# Front file format


def front_to_json(front: ParetoFront) -> dict:
    doc: dict = {
        "status": front.status,
        "reference_point": list(front.reference),
        "points": [
            {"objectives": list(p.objectives), "images": list(p.images)}
            for p in front.points
        ],
    }
    if front.meta:
        doc["meta"] = front.meta
    return doc


def front_from_json(doc) -> ParetoFront:
    from .instance import _check_keys  # shared strict-schema helper

    _check_keys(doc, "", {"status", "reference_point", "points"}, {"meta"})
    if doc["status"] not in (COMPLETE, PARTIAL):
        raise SchemaError("status", f"expected COMPLETE or PARTIAL, got {doc['status']!r}")
    ref = doc["reference_point"]
    if not isinstance(ref, list) or len(ref) != 4 or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in ref
    ):
        raise SchemaError("reference_point", "expected an array of 4 integers")
    if not isinstance(doc["points"], list):
        raise SchemaError("points", "expected an array")
    points = []
    for i, item in enumerate(doc["points"]):
        where = f"points[{i}]"
        _check_keys(item, where, {"objectives", "images"})
        vec = item["objectives"]
        if not isinstance(vec, list) or len(vec) != 4 or not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in vec
        ):
            raise SchemaError(where, "objectives must be an array of 4 non-negative integers")
        imgs = item["images"]
        if not isinstance(imgs, list) or not all(isinstance(s, str) for s in imgs):
            raise SchemaError(where, "images must be an array of image id strings")
        points.append(FrontPoint(ObjectiveVector(*vec), tuple(imgs)))
    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise SchemaError("meta", "expected a JSON object")
    return ParetoFront(
        points=tuple(points),
        status=doc["status"],
        reference=ObjectiveVector(*ref),
        meta=meta or {},
    )


def load_front(source) -> ParetoFront:
    return front_from_json(_read_json(source))


def save_front(front: ParetoFront, dest) -> None:
    write_text(dest, json.dumps(front_to_json(front), indent=2) + "\n")
