"""Render an instance partition, and optionally a cover, as an SVG figure.

Parts are filled by status: covered with a cloud-free view, covered but
cloudy everywhere, or not covered by the selection.  Without a selection all
parts share one neutral fill.  Selected footprints are outlined dashed; the
AOI is outlined solid.  The geometry comes from the instance provenance, so
every part polygon is drawn exactly once.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .instance import DiscreteInstance, RawProblem

_STYLE = """\
.part { fill: #a8c4e0; }
.clear { fill: #8fd18f; }
.cloudy { fill: #c9c9d4; }
.uncovered { fill: #f2e0a8; }
.part, .clear, .cloudy, .uncovered { stroke: #444444; stroke-width: 0.6; }
.aoi { fill: none; stroke: #222222; stroke-width: 1.4; }
.footprint { fill: none; stroke: #b03030; stroke-width: 1.0; stroke-dasharray: 5 3; }
"""

__all__ = ["render_svg"]


def _part_class(inst: DiscreteInstance, k: int, taken) -> str:
    if taken is None:
        return "part"
    covered = False
    for i in taken:
        if k in inst.parts_of[i]:
            covered = True
            if k not in inst.cloudy_of[i]:
                return "clear"
    return "cloudy" if covered else "uncovered"


def render_svg(raw: RawProblem, inst: DiscreteInstance, taken=None, size: int = 720) -> str:
    """SVG text for the partition of ``inst`` over the AOI of ``raw``.

    ``taken`` is an iterable of 0-based image indices or None.  Requires the
    instance to carry part provenance geometry.
    """
    if inst.provenance is None or len(inst.provenance) != inst.n:
        raise ValueError("instance carries no provenance geometry to render")
    if taken is not None:
        taken = set(taken)
        for i in taken:
            if not 0 <= i < inst.m:
                raise ValueError(f"image index {i} outside 0..{inst.m - 1}")
    minx, miny, maxx, maxy = raw.aoi.bounds
    span_x = maxx - minx
    span_y = maxy - miny
    scale = size / max(span_x, span_y)

    def fmt(value: float) -> str:
        value = round(value, 2)
        return str(int(value)) if value == int(value) else str(value)

    width = fmt(span_x * scale)
    height = fmt(span_y * scale)

    def path_of(points) -> str:
        cmds = []
        for j, (x, y) in enumerate(points):
            px = fmt((x - minx) * scale)
            py = fmt((maxy - y) * scale)  # flip: world y up, svg y down
            cmds.append(f"{'M' if j == 0 else 'L'} {px} {py}")
        cmds.append("Z")
        return " ".join(cmds)

    root = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "viewBox": f"0 0 {width} {height}",
        "width": width,
        "height": height,
    })
    style = ET.SubElement(root, "style")
    style.text = _STYLE
    parts_group = ET.SubElement(root, "g", {"id": "parts"})
    for k in range(inst.n):
        d = " ".join(path_of(poly.exterior) for poly in inst.provenance[k].polygons)
        ET.SubElement(parts_group, "path", {
            "id": f"part-{k + 1}",
            "class": _part_class(inst, k, taken),
            "d": d,
        })
    if taken:
        foot_group = ET.SubElement(root, "g", {"id": "footprints"})
        for i in sorted(taken):
            ET.SubElement(foot_group, "path", {
                "id": f"image-{i + 1}",
                "class": "footprint",
                "d": path_of(raw.images[i].footprint.exterior),
            })
    ET.SubElement(root, "path", {"id": "aoi", "class": "aoi", "d": path_of(raw.aoi.exterior)})
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
