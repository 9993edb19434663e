"""Planar polygon kernel: clipping, overlay arrangement and area computation.

Coordinates are planar x/y pairs in meters; inputs are assumed to be
pre-projected, so there is no CRS handling here.  Robustness policy:
coordinates are snapped to a fixed ``SNAP_GRID`` after every boolean
operation, and any piece whose area falls below ``SLIVER_AREA`` is discarded
as a sliver.  Boolean operations themselves are delegated to shapely/GEOS;
the arrangement logic on top is ours.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import shapely
from shapely.geometry import LineString, Polygon
from shapely.ops import split as _split_by_line

SNAP_GRID = 1e-7    # coordinate snap grid in meters
SLIVER_AREA = 1e-4  # minimum piece area in m^2, smaller pieces are dropped

__all__ = [
    "SNAP_GRID",
    "SLIVER_AREA",
    "SimplePolygon",
    "PolygonSet",
    "clip",
    "overlay",
    "area",
]


def _signed_area(ring: Sequence[tuple[float, float]]) -> float:
    total = 0.0
    for i, (x0, y0) in enumerate(ring):
        x1, y1 = ring[(i + 1) % len(ring)]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _snap(geom):
    return shapely.set_precision(geom, SNAP_GRID)


def _polygonal_parts(geom) -> list[Polygon]:
    """Polygon components of any geometry; lines and points are dropped."""
    if geom is None or geom.is_empty:
        return []
    if geom.geom_type == "Polygon":
        return [geom]
    if geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        parts: list[Polygon] = []
        for g in geom.geoms:
            parts.extend(_polygonal_parts(g))
        return parts
    return []


def _cut_out_holes(poly: Polygon) -> list[Polygon]:
    # A straight cut through the first hole's interior turns the hole into
    # outer boundary; remaining holes land in one of the pieces and are
    # handled recursively.  Each cut removes at least one hole, so this
    # terminates.
    if not poly.interiors:
        return [poly]
    anchor = Polygon(poly.interiors[0]).representative_point()
    minx, miny, maxx, maxy = poly.bounds
    cutters = (
        LineString([(anchor.x, miny - 1.0), (anchor.x, maxy + 1.0)]),
        LineString([(minx - 1.0, anchor.y), (maxx + 1.0, anchor.y)]),
    )
    for cutter in cutters:
        pieces = _polygonal_parts(_split_by_line(poly, cutter))
        if len(pieces) > 1 or (pieces and not pieces[0].interiors):
            out: list[Polygon] = []
            for piece in pieces:
                out.extend(_cut_out_holes(piece))
            return out
    raise ValueError("unable to decompose a polygon with holes into simple pieces")


@dataclass(frozen=True, init=False)
class SimplePolygon:
    """A simple, hole-free polygon stored with counter-clockwise orientation.

    The exterior ring is stored open (the closing vertex is implicit).
    Construction validates the ring: at least three vertices, positive area,
    no self-intersection; clockwise input is reversed.
    """

    exterior: tuple[tuple[float, float], ...]

    def __init__(self, exterior: Iterable[Sequence[float]]):
        ring = [(float(p[0]), float(p[1])) for p in exterior]
        if len(ring) > 1 and ring[0] == ring[-1]:
            ring.pop()
        if len(ring) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        if _signed_area(ring) < 0:
            ring.reverse()
        probe = Polygon(ring + [ring[0]])
        if not probe.is_valid or probe.area <= 0.0:
            raise ValueError("polygon ring is degenerate or self-intersecting")
        object.__setattr__(self, "exterior", tuple(ring))

    @property
    def area(self) -> float:
        return _signed_area(self.exterior)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.exterior]
        ys = [p[1] for p in self.exterior]
        return min(xs), min(ys), max(xs), max(ys)

    def to_shapely(self) -> Polygon:
        return Polygon(list(self.exterior) + [self.exterior[0]])

    @classmethod
    def from_shapely(cls, poly: Polygon) -> "SimplePolygon":
        if poly.interiors:
            raise ValueError("expected a hole-free polygon")
        return cls(list(poly.exterior.coords))

    def to_geojson(self) -> dict:
        ring = [list(p) for p in self.exterior]
        ring.append(list(self.exterior[0]))
        return {"type": "Polygon", "coordinates": [ring]}

    @classmethod
    def from_geojson(cls, obj) -> "SimplePolygon":
        if not isinstance(obj, dict) or obj.get("type") != "Polygon":
            raise ValueError("expected a GeoJSON Polygon")
        coords = obj.get("coordinates")
        if not isinstance(coords, list) or not coords:
            raise ValueError("GeoJSON Polygon has no coordinate rings")
        if len(coords) > 1:
            raise ValueError("polygons with interior rings are not supported")
        return cls(coords[0])


@dataclass(frozen=True)
class PolygonSet:
    """A possibly-disconnected region: pairwise interior-disjoint simple polygons."""

    polygons: tuple[SimplePolygon, ...] = ()

    @classmethod
    def from_shapely(cls, geom) -> "PolygonSet":
        members = []
        for poly in _polygonal_parts(geom):
            for piece in _cut_out_holes(poly):
                if piece.area >= SLIVER_AREA:
                    members.append(SimplePolygon.from_shapely(piece))
        return cls(tuple(members))

    @property
    def is_empty(self) -> bool:
        return not self.polygons

    @property
    def area(self) -> float:
        return sum(p.area for p in self.polygons)

    def to_shapely(self):
        # Members may share boundary edges, which a MultiPolygon would not
        # tolerate; dissolve through a union instead.
        if not self.polygons:
            return Polygon()
        return shapely.union_all([p.to_shapely() for p in self.polygons])

    def to_geojson(self) -> dict:
        coords = [p.to_geojson()["coordinates"] for p in self.polygons]
        return {"type": "MultiPolygon", "coordinates": coords}

    @classmethod
    def from_geojson(cls, obj) -> "PolygonSet":
        if isinstance(obj, dict) and obj.get("type") == "Polygon":
            return cls((SimplePolygon.from_geojson(obj),))
        if not isinstance(obj, dict) or obj.get("type") != "MultiPolygon":
            raise ValueError("expected a GeoJSON Polygon or MultiPolygon")
        coords = obj.get("coordinates")
        if not isinstance(coords, list):
            raise ValueError("GeoJSON MultiPolygon has no coordinates")
        members = []
        for rings in coords:
            if not isinstance(rings, list) or not rings:
                raise ValueError("GeoJSON MultiPolygon member has no rings")
            if len(rings) > 1:
                raise ValueError("polygons with interior rings are not supported")
            members.append(SimplePolygon(rings[0]))
        return cls(tuple(members))


def clip(subject: SimplePolygon, window: SimplePolygon) -> PolygonSet:
    """Region of ``subject`` inside ``window``; empty when they barely touch."""
    inter = _snap(subject.to_shapely().intersection(window.to_shapely()))
    return PolygonSet.from_shapely(inter)


def overlay(regions: Sequence[PolygonSet]) -> list[tuple[PolygonSet, frozenset[int]]]:
    """Partition the union of ``regions`` into disjoint faces with owner sets.

    Faces are refined iteratively: each region splits every face it overlaps
    into an inside part (owners gain the region) and an outside part, then
    claims whatever area no earlier region covered.  Owner indices are
    positions in ``regions``.  Faces below the sliver threshold are dropped,
    so total face area matches the union area only up to that tolerance.
    """
    faces: list[tuple[object, tuple, frozenset[int]]] = []  # (geom, bounds, owners)
    covered = None
    for idx, region in enumerate(regions):
        shp = _snap(region.to_shapely())
        if shp.is_empty:
            continue
        rb = shp.bounds
        refined: list[tuple[object, tuple, frozenset[int]]] = []
        for geom, gb, owners in faces:
            if gb[2] <= rb[0] or gb[0] >= rb[2] or gb[3] <= rb[1] or gb[1] >= rb[3]:
                refined.append((geom, gb, owners))
                continue
            inside = _snap(geom.intersection(shp))
            if inside.area < SLIVER_AREA:
                refined.append((geom, gb, owners))
                continue
            outside = _snap(geom.difference(shp))
            if outside.area >= SLIVER_AREA:
                refined.append((outside, outside.bounds, owners))
            refined.append((inside, inside.bounds, owners | {idx}))
        fresh = shp if covered is None else _snap(shp.difference(covered))
        if fresh.area >= SLIVER_AREA:
            refined.append((fresh, fresh.bounds, frozenset((idx,))))
        faces = refined
        covered = shp if covered is None else _snap(covered.union(shp))
    out = []
    for geom, _, owners in faces:
        face = PolygonSet.from_shapely(geom)
        if not face.is_empty:
            out.append((face, owners))
    return out


def area(region: "PolygonSet | SimplePolygon") -> float:
    """Total area in square meters (shoelace, additive over members)."""
    return region.area
