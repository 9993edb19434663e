"""Problem data model, JSON file formats, catalog ingestion, synthetic instances.

Objective quantities are integers throughout: cost in currency cents,
resolution in cm^2 per pixel, incidence angle in tenths of a degree, areas
in whole m^2.  File formats are strict: unknown keys are rejected so format
drift is caught early, and every schema error names the offending location.
"""

from __future__ import annotations

import json
import math
import random
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .geometry import PolygonSet, SimplePolygon

__all__ = [
    "SchemaError",
    "ImageRecord",
    "RawProblem",
    "DiscreteInstance",
    "CatalogIngest",
    "load_raw",
    "save_raw",
    "raw_from_json",
    "raw_to_json",
    "load_discrete",
    "save_discrete",
    "discrete_from_json",
    "discrete_to_json",
    "ingest_catalog",
    "generate_synthetic",
]


class SchemaError(ValueError):
    """An input document violates the expected schema or an instance invariant."""

    def __init__(self, where: str, message: str):
        prefix = f"{where}: " if where else ""
        super().__init__(f"{prefix}{message}")
        self.where = where


# ---------------------------------------------------------------------------
# JSON plumbing


def _read_json(source):
    if hasattr(source, "read"):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    elif source == "-":
        text = sys.stdin.read()
        name = "<stdin>"
    else:
        name = str(source)
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(name, f"cannot read file: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(name, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def write_text(dest, text: str) -> None:
    """Write ``text`` to a path, an open file, or stdout when dest is "-"."""
    if hasattr(dest, "write"):
        dest.write(text)
    elif dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _check_keys(obj, where: str, required: set, optional: set = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(where, "expected a JSON object")
    missing = required - obj.keys()
    if missing:
        raise SchemaError(where, f"missing required key(s): {', '.join(sorted(missing))}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise SchemaError(where, f"unknown key(s): {', '.join(sorted(unknown))}")


def _get_int(obj, key: str, where: str, lo=None, hi=None) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(where, f"{key} must be an integer, got {value!r}")
    if lo is not None and value < lo:
        raise SchemaError(where, f"{key} out of range [{lo}, {hi if hi is not None else ''}]: {value}")
    if hi is not None and value > hi:
        raise SchemaError(where, f"{key} out of range [{lo}, {hi}]: {value}")
    return value


def _get_str(obj, key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise SchemaError(where, f"{key} must be a string, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Data model


@dataclass(frozen=True)
class ImageRecord:
    """One purchasable satellite image and its attributes."""

    id: str
    footprint: SimplePolygon
    cost: int             # currency cents
    resolution: int       # cm^2 per pixel
    incidence_angle: int  # tenths of a degree
    cloud_cover_pct: int  # whole percent, 0..100

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"cost must be >= 0, got {self.cost}")
        if self.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {self.resolution}")
        if not 0 <= self.incidence_angle <= 900:
            raise ValueError(f"incidence_angle out of range [0, 900]: {self.incidence_angle}")
        if not 0 <= self.cloud_cover_pct <= 100:
            raise ValueError(f"cloud_cover_pct out of range [0, 100]: {self.cloud_cover_pct}")


@dataclass(frozen=True)
class RawProblem:
    """Area of interest plus candidate images, before discretization."""

    aoi: SimplePolygon
    images: tuple[ImageRecord, ...]
    meta: dict | None = None


@dataclass(frozen=True)
class DiscreteInstance:
    """Set-cover universe produced by discretization.

    Parts are indexed 0..n-1 internally (serialized 1-based).  ``parts_of[i]``
    is the set of parts image i covers, ``cloudy_of[i]`` the subset it sees
    through clouds.  ``provenance`` optionally keeps the part geometries for
    rendering, ``ids`` the source image identifiers.
    """

    part_area: tuple[int, ...]
    parts_of: tuple[frozenset[int], ...]
    cloudy_of: tuple[frozenset[int], ...]
    cost: tuple[int, ...]
    resolution: tuple[int, ...]
    angle: tuple[int, ...]
    ids: tuple[str, ...] | None = None
    provenance: dict | None = field(default=None, compare=True)
    meta: dict | None = None

    @property
    def n(self) -> int:
        return len(self.part_area)

    @property
    def m(self) -> int:
        return len(self.parts_of)

    def validate(self) -> None:
        """Check structural invariants, raising ValueError with a location."""
        n, m = self.n, self.m
        if n < 1:
            raise ValueError("instance has no parts")
        if not (len(self.cloudy_of) == len(self.cost) == len(self.resolution) == len(self.angle) == m):
            raise ValueError("per-image arrays disagree on image count")
        if self.ids is not None and len(self.ids) != m:
            raise ValueError("ids length disagrees with image count")
        for k, a in enumerate(self.part_area):
            if a < 1:
                raise ValueError(f"areas[{k}] must be >= 1, got {a}")
        seen: set[int] = set()
        for i in range(m):
            for k in self.parts_of[i]:
                if not 0 <= k < n:
                    raise ValueError(f"images[{i}] references part {k + 1} outside 1..{n}")
            if not self.cloudy_of[i] <= self.parts_of[i]:
                extra = sorted(self.cloudy_of[i] - self.parts_of[i])[0]
                raise ValueError(f"images[{i}] flags part {extra + 1} cloudy but does not cover it")
            if self.resolution[i] < 1:
                raise ValueError(f"images[{i}] resolution must be >= 1")
            if self.cost[i] < 0:
                raise ValueError(f"images[{i}] cost must be >= 0")
            if not 0 <= self.angle[i] <= 900:
                raise ValueError(f"images[{i}] angle out of range [0, 900]")
            seen |= self.parts_of[i]
        if len(seen) != n:
            k = min(set(range(n)) - seen)
            raise ValueError(f"part {k + 1} is covered by no image")


# ---------------------------------------------------------------------------
# Raw problem format


def raw_to_json(problem: RawProblem) -> dict:
    doc: dict = {
        "aoi": problem.aoi.to_geojson(),
        "images": [
            {
                "id": img.id,
                "footprint": img.footprint.to_geojson(),
                "cost": img.cost,
                "resolution": img.resolution,
                "incidence_angle": img.incidence_angle,
                "cloud_cover_pct": img.cloud_cover_pct,
            }
            for img in problem.images
        ],
    }
    if problem.meta is not None:
        doc["meta"] = problem.meta
    return doc


def _geojson_polygon(obj, where: str) -> SimplePolygon:
    try:
        return SimplePolygon.from_geojson(obj)
    except (ValueError, TypeError) as exc:
        raise SchemaError(where, str(exc)) from exc


def raw_from_json(doc) -> RawProblem:
    _check_keys(doc, "", {"aoi", "images"}, {"meta"})
    aoi = _geojson_polygon(doc["aoi"], "aoi")
    if not isinstance(doc["images"], list) or not doc["images"]:
        raise SchemaError("images", "expected a non-empty array")
    aoi_shp = aoi.to_shapely()
    images = []
    for i, item in enumerate(doc["images"]):
        where = f"images[{i}]"
        _check_keys(item, where, {"id", "footprint", "cost", "resolution", "incidence_angle", "cloud_cover_pct"})
        footprint = _geojson_polygon(item["footprint"], f"{where}.footprint")
        record = ImageRecord(
            id=_get_str(item, "id", where),
            footprint=footprint,
            cost=_get_int(item, "cost", where, lo=0),
            resolution=_get_int(item, "resolution", where, lo=1),
            incidence_angle=_get_int(item, "incidence_angle", where, lo=0, hi=900),
            cloud_cover_pct=_get_int(item, "cloud_cover_pct", where, lo=0, hi=100),
        )
        if footprint.to_shapely().intersection(aoi_shp).area <= 0.0:
            raise SchemaError(where, "footprint does not intersect the AOI")
        images.append(record)
    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise SchemaError("meta", "expected a JSON object")
    return RawProblem(aoi=aoi, images=tuple(images), meta=meta)


def load_raw(source) -> RawProblem:
    return raw_from_json(_read_json(source))


def save_raw(problem: RawProblem, dest) -> None:
    write_text(dest, _dump(raw_to_json(problem)))


# ---------------------------------------------------------------------------
# Discrete instance format (part ids are 1-based on disk)


def discrete_to_json(inst: DiscreteInstance) -> dict:
    doc: dict = {
        "n": inst.n,
        "areas": list(inst.part_area),
        "images": [
            {
                "cost": inst.cost[i],
                "resolution": inst.resolution[i],
                "angle": inst.angle[i],
                "parts": [k + 1 for k in sorted(inst.parts_of[i])],
                "cloudy": [k + 1 for k in sorted(inst.cloudy_of[i])],
            }
            for i in range(inst.m)
        ],
    }
    if inst.ids is not None:
        doc["ids"] = list(inst.ids)
    if inst.provenance is not None:
        doc["provenance"] = {str(k + 1): inst.provenance[k].to_geojson() for k in sorted(inst.provenance)}
    if inst.meta is not None:
        doc["meta"] = inst.meta
    return doc


def _part_list(obj, key: str, where: str, n: int) -> frozenset[int]:
    raw = obj[key]
    if not isinstance(raw, list):
        raise SchemaError(where, f"{key} must be an array of part ids")
    out = set()
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= n:
            raise SchemaError(where, f"{key} contains invalid part id {v!r} (expected 1..{n})")
        out.add(v - 1)
    return frozenset(out)


def discrete_from_json(doc) -> DiscreteInstance:
    _check_keys(doc, "", {"n", "areas", "images"}, {"ids", "provenance", "meta"})
    n = _get_int(doc, "n", "", lo=1)
    areas = doc["areas"]
    if not isinstance(areas, list) or len(areas) != n:
        raise SchemaError("areas", f"expected an array of {n} areas")
    for k, a in enumerate(areas):
        if isinstance(a, bool) or not isinstance(a, int) or a < 1:
            raise SchemaError(f"areas[{k}]", f"area must be a positive integer, got {a!r}")
    if not isinstance(doc["images"], list) or not doc["images"]:
        raise SchemaError("images", "expected a non-empty array")
    cost, resolution, angle, parts_of, cloudy_of = [], [], [], [], []
    for i, item in enumerate(doc["images"]):
        where = f"images[{i}]"
        _check_keys(item, where, {"cost", "resolution", "angle", "parts", "cloudy"})
        cost.append(_get_int(item, "cost", where, lo=0))
        resolution.append(_get_int(item, "resolution", where, lo=1))
        angle.append(_get_int(item, "angle", where, lo=0, hi=900))
        parts_of.append(_part_list(item, "parts", where, n))
        cloudy_of.append(_part_list(item, "cloudy", where, n))
    ids = None
    if "ids" in doc:
        if not isinstance(doc["ids"], list) or not all(isinstance(s, str) for s in doc["ids"]):
            raise SchemaError("ids", "expected an array of strings")
        ids = tuple(doc["ids"])
    provenance = None
    if "provenance" in doc:
        if not isinstance(doc["provenance"], dict):
            raise SchemaError("provenance", "expected an object keyed by part id")
        provenance = {}
        for key, geo in doc["provenance"].items():
            try:
                k = int(key)
            except ValueError:
                raise SchemaError("provenance", f"invalid part id key {key!r}") from None
            if not 1 <= k <= n:
                raise SchemaError("provenance", f"part id {k} outside 1..{n}")
            try:
                provenance[k - 1] = PolygonSet.from_geojson(geo)
            except (ValueError, TypeError) as exc:
                raise SchemaError(f"provenance[{key}]", str(exc)) from exc
    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise SchemaError("meta", "expected a JSON object")
    inst = DiscreteInstance(
        part_area=tuple(areas),
        parts_of=tuple(parts_of),
        cloudy_of=tuple(cloudy_of),
        cost=tuple(cost),
        resolution=tuple(resolution),
        angle=tuple(angle),
        ids=ids,
        provenance=provenance,
        meta=meta,
    )
    try:
        inst.validate()
    except ValueError as exc:
        raise SchemaError("", str(exc)) from exc
    return inst


def load_discrete(source) -> DiscreteInstance:
    return discrete_from_json(_read_json(source))


def save_discrete(inst: DiscreteInstance, dest) -> None:
    write_text(dest, _dump(discrete_to_json(inst)))


# ---------------------------------------------------------------------------
# Catalog ingestion


@dataclass(frozen=True)
class CatalogIngest:
    """Result of reading a catalog: usable records plus skipped items with reasons."""

    records: tuple[ImageRecord, ...]
    skipped: tuple[tuple[str, str], ...]


def _dotted_lookup(props: dict, path: str):
    node = props
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            raise KeyError(path)
        node = node[key]
    return node


def ingest_catalog(source, price_field: str = "price") -> CatalogIngest:
    """Read a STAC-style ItemCollection into image records.

    Each item needs a Polygon geometry and the properties ``eo:cloud_cover``
    (percent), ``gsd`` (meters per pixel, converted to cm^2 per pixel),
    ``view:incidence_angle`` (degrees, kept in tenths) and a price found at
    ``price_field``, a dot-path inside properties, converted to cents.
    Items missing or failing any of these are skipped and reported.
    """
    doc = _read_json(source)
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise SchemaError("", "expected a FeatureCollection item collection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise SchemaError("features", "expected an array of items")
    records: list[ImageRecord] = []
    skipped: list[tuple[str, str]] = []
    for i, item in enumerate(features):
        item_id = item.get("id") if isinstance(item, dict) else None
        if not isinstance(item_id, str) or not item_id:
            item_id = f"item-{i}"
        try:
            if not isinstance(item, dict):
                raise ValueError("item is not an object")
            footprint = SimplePolygon.from_geojson(item["geometry"])
            props = item.get("properties")
            if not isinstance(props, dict):
                raise KeyError("properties")
            cloud = props["eo:cloud_cover"]
            gsd = props["gsd"]
            angle = props["view:incidence_angle"]
            price = _dotted_lookup(props, price_field)
            for name, value in (("eo:cloud_cover", cloud), ("gsd", gsd),
                                ("view:incidence_angle", angle), (price_field, price)):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"{name} is not a number")
            record = ImageRecord(
                id=item_id,
                footprint=footprint,
                cost=round(price * 100),
                resolution=round((gsd * 100.0) ** 2),
                incidence_angle=round(angle * 10),
                cloud_cover_pct=round(cloud),
            )
        except KeyError as exc:
            skipped.append((item_id, f"missing {exc.args[0]}"))
            continue
        except (ValueError, TypeError) as exc:
            skipped.append((item_id, str(exc)))
            continue
        records.append(record)
    if not records:
        raise SchemaError("", "no usable items in the catalog")
    return CatalogIngest(records=tuple(records), skipped=tuple(skipped))


# ---------------------------------------------------------------------------
# Synthetic generation

DEFAULT_COST_RANGE = (50_000, 500_000)    # cents
DEFAULT_RESOLUTION_RANGE = (900, 6_400)   # cm^2/pixel, i.e. 0.3 m to 0.8 m gsd
DEFAULT_ANGLE_RANGE = (50, 400)           # tenths of a degree
DEFAULT_CLOUD_RANGE = (0, 60)             # percent


def _check_range(name: str, rng: tuple[int, int], lo: int, hi: int) -> tuple[int, int]:
    a, b = int(rng[0]), int(rng[1])
    if a > b or a < lo or b > hi:
        raise ValueError(f"{name} must satisfy {lo} <= lo <= hi <= {hi}, got {rng}")
    return a, b


def generate_synthetic(
    aoi_width: float,
    aoi_height: float,
    count: int,
    seed: int,
    *,
    cost_range: tuple[int, int] = DEFAULT_COST_RANGE,
    resolution_range: tuple[int, int] = DEFAULT_RESOLUTION_RANGE,
    angle_range: tuple[int, int] = DEFAULT_ANGLE_RANGE,
    cloud_range: tuple[int, int] = DEFAULT_CLOUD_RANGE,
) -> RawProblem:
    """Deterministic random problem over a rectangular AOI.

    Footprints are rotated quadrilaterals centered inside the AOI (side
    fraction 0.2..0.6 of the AOI extent, tilt up to 15 degrees), so every
    footprint intersects the AOI.  Attributes are drawn uniformly from the
    inclusive ranges.  The same seed reproduces the same problem; the seed is
    echoed in the output metadata.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if aoi_width <= 0 or aoi_height <= 0:
        raise ValueError("AOI extent must be positive")
    cost_range = _check_range("cost_range", cost_range, 0, 10**9)
    resolution_range = _check_range("resolution_range", resolution_range, 1, 10**9)
    angle_range = _check_range("angle_range", angle_range, 0, 900)
    cloud_range = _check_range("cloud_range", cloud_range, 0, 100)
    rng = random.Random(seed)
    aoi = SimplePolygon([(0.0, 0.0), (aoi_width, 0.0), (aoi_width, aoi_height), (0.0, aoi_height)])
    images = []
    for i in range(count):
        half_w = rng.uniform(0.2, 0.6) * aoi_width / 2.0
        half_h = rng.uniform(0.2, 0.6) * aoi_height / 2.0
        cx = rng.uniform(0.0, aoi_width)
        cy = rng.uniform(0.0, aoi_height)
        theta = math.radians(rng.uniform(-15.0, 15.0))
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        corners = []
        for dx, dy in ((-half_w, -half_h), (half_w, -half_h), (half_w, half_h), (-half_w, half_h)):
            corners.append((round(cx + dx * cos_t - dy * sin_t, 3), round(cy + dx * sin_t + dy * cos_t, 3)))
        images.append(ImageRecord(
            id=f"img-{i:03d}",
            footprint=SimplePolygon(corners),
            cost=rng.randint(*cost_range),
            resolution=rng.randint(*resolution_range),
            incidence_angle=rng.randint(*angle_range),
            cloud_cover_pct=rng.randint(*cloud_range),
        ))
    meta = {
        "generator": {
            "seed": seed,
            "count": count,
            "aoi_width": aoi_width,
            "aoi_height": aoi_height,
            "cost_range": list(cost_range),
            "resolution_range": list(resolution_range),
            "angle_range": list(angle_range),
            "cloud_range": list(cloud_range),
        }
    }
    return RawProblem(aoi=aoi, images=tuple(images), meta=meta)


def with_clouds(inst: DiscreteInstance, cloudy_of: Iterable[frozenset[int]], meta: dict | None) -> DiscreteInstance:
    """Copy of ``inst`` with a new cloud assignment (helper for preprocessing)."""
    return replace(inst, cloudy_of=tuple(cloudy_of), meta=meta)
