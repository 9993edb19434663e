"""Raw problem to discrete instance: clip, overlay-partition, allocate clouds."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .geometry import clip, overlay
from .instance import DiscreteInstance, RawProblem, with_clouds

__all__ = [
    "discretize",
    "assign_clouds",
    "preprocess",
    "PreprocessReport",
    "ImageCloudReport",
]


def discretize(raw: RawProblem) -> DiscreteInstance:
    """Overlay the AOI-clipped footprints into disjoint universe parts.

    Part areas are rounded to whole m^2 (minimum 1).  AOI area reached by no
    footprint is excluded from the universe; preprocess() reports how much.
    The result carries empty cloud sets, the source image ids, and the part
    geometries as provenance.
    """
    clipped = [clip(img.footprint, raw.aoi) for img in raw.images]
    if all(c.is_empty for c in clipped):
        raise ValueError("no image intersects the AOI")
    faces = overlay(clipped)
    areas: list[int] = []
    parts_of: list[set[int]] = [set() for _ in raw.images]
    provenance: dict = {}
    for k, (face, owners) in enumerate(faces):
        areas.append(max(1, round(face.area)))
        provenance[k] = face
        for i in owners:
            parts_of[i].add(k)
    inst = DiscreteInstance(
        part_area=tuple(areas),
        parts_of=tuple(frozenset(s) for s in parts_of),
        cloudy_of=tuple(frozenset() for _ in raw.images),
        cost=tuple(img.cost for img in raw.images),
        resolution=tuple(img.resolution for img in raw.images),
        angle=tuple(img.incidence_angle for img in raw.images),
        ids=tuple(img.id for img in raw.images),
        provenance=provenance,
    )
    inst.validate()
    return inst


def assign_clouds(inst: DiscreteInstance, raw: RawProblem, seed: int) -> DiscreteInstance:
    """Flag parts cloudy per image until its declared cloud share is reached.

    For each image in input order, parts are drawn uniformly over part ids
    (not weighted by area) without replacement; the first draw that brings
    the flagged area to at least cloud_cover_pct percent of the image's part
    area stops, so the achieved share overshoots by less than one part.
    Deterministic for a fixed seed.
    """
    if len(raw.images) != inst.m:
        raise ValueError("raw problem and instance disagree on image count")
    rng = random.Random(seed)
    cloudy = []
    for i, img in enumerate(raw.images):
        pool = sorted(inst.parts_of[i])
        total = sum(inst.part_area[k] for k in pool)
        target = img.cloud_cover_pct / 100.0 * total
        flagged: set[int] = set()
        acc = 0
        while pool and acc < target:
            k = pool.pop(rng.randrange(len(pool)))
            flagged.add(k)
            acc += inst.part_area[k]
        cloudy.append(frozenset(flagged))
    meta = dict(inst.meta or {})
    meta["cloud_seed"] = seed
    return with_clouds(inst, cloudy, meta)


@dataclass(frozen=True)
class ImageCloudReport:
    id: str
    part_count: int
    target_pct: int
    achieved_pct: float


@dataclass(frozen=True)
class PreprocessReport:
    """What discretization and cloud allocation actually produced."""

    part_count: int
    aoi_area: float
    covered_area: float
    uncoverable_area: float
    images: tuple[ImageCloudReport, ...]

    def to_json(self) -> dict:
        return {
            "part_count": self.part_count,
            "aoi_area": round(self.aoi_area, 3),
            "covered_area": round(self.covered_area, 3),
            "uncoverable_area": round(self.uncoverable_area, 3),
            "images": [
                {
                    "id": r.id,
                    "part_count": r.part_count,
                    "target_pct": r.target_pct,
                    "achieved_pct": r.achieved_pct,
                }
                for r in self.images
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"parts: {self.part_count}",
            f"aoi area: {self.aoi_area:.1f} m^2 (uncoverable: {self.uncoverable_area:.1f} m^2)",
        ]
        for r in self.images:
            lines.append(
                f"  {r.id}: {r.part_count} parts, cloud {r.target_pct}% requested"
                f" -> {r.achieved_pct:.2f}% achieved"
            )
        return "\n".join(lines) + "\n"


def preprocess(raw: RawProblem, cloud_seed: int) -> tuple[DiscreteInstance, PreprocessReport]:
    """discretize + assign_clouds, with a report of what came out."""
    inst = assign_clouds(discretize(raw), raw, cloud_seed)
    covered = sum(inst.provenance[k].area for k in inst.provenance)
    aoi_area = raw.aoi.area
    reports = []
    for i in range(inst.m):
        total = sum(inst.part_area[k] for k in inst.parts_of[i])
        flagged = sum(inst.part_area[k] for k in inst.cloudy_of[i])
        achieved = 100.0 * flagged / total if total else 0.0
        reports.append(ImageCloudReport(
            id=inst.ids[i] if inst.ids else str(i + 1),
            part_count=len(inst.parts_of[i]),
            target_pct=raw.images[i].cloud_cover_pct,
            achieved_pct=round(achieved, 2),
        ))
    report = PreprocessReport(
        part_count=inst.n,
        aoi_area=aoi_area,
        covered_area=covered,
        uncoverable_area=max(aoi_area - covered, 0.0),
        images=tuple(reports),
    )
    return inst, report
