"""Emit a discrete instance as a CPLEX-style LP text model.

The model linearizes all four objective components over binary image
selectors x_i: per-part best resolution through selector binaries z_k_j with
a big-M of 2B (B = one past the worst resolution), worst incidence through a
max variable, and per-part cloud-free indicators y_k that can only switch on
when a clear-viewing image is selected.  Output is deterministic bytes: same
instance and arguments, same text.
"""

from __future__ import annotations

from .instance import DiscreteInstance

OBJECTIVE_CHOICES = ("cost", "cloud", "resolution", "incidence", "weighted")

__all__ = ["OBJECTIVE_CHOICES", "export_lp"]

_WRAP = 8  # terms per expression line


def _format_number(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _expr_lines(terms) -> list[str]:
    """Render [(coef, var), ...] as sign-separated chunks, wrapped."""
    chunks = []
    for idx, (coef, var) in enumerate(terms):
        if coef < 0:
            sign, mag = "-", -coef
        else:
            sign, mag = ("+" if idx else ""), coef
        body = var if mag == 1 else f"{_format_number(mag)} {var}"
        chunks.append(f"{sign} {body}" if sign else body)
    lines = []
    for start in range(0, len(chunks), _WRAP):
        lines.append(" ".join(chunks[start:start + _WRAP]))
    return lines


def _emit_row(out: list[str], name: str, terms, relation: str, rhs) -> None:
    lines = _expr_lines(terms)
    lines[-1] = f"{lines[-1]} {relation} {_format_number(rhs)}"
    out.append(f" {name}: {lines[0]}")
    for cont in lines[1:]:
        out.append(f"   {cont}")


def _weights_tuple(weights) -> tuple:
    if weights is None:
        raise ValueError("weighted objective requires weights")
    if isinstance(weights, dict):
        unknown = set(weights) - {"cost", "cloud", "resolution", "incidence"}
        if unknown:
            raise ValueError(f"unknown weight key(s): {', '.join(sorted(unknown))}")
        vals = tuple(weights.get(k, 0) for k in ("cost", "cloud", "resolution", "incidence"))
    else:
        vals = tuple(weights)
        if len(vals) != 4:
            raise ValueError("weights must supply 4 values (cost, cloud, resolution, incidence)")
    if any(v < 0 for v in vals):
        raise ValueError("weights must be non-negative")
    if all(v == 0 for v in vals):
        raise ValueError("weights must not all be zero")
    return vals


def export_lp(inst: DiscreteInstance, objective: str = "cost", weights=None, bounds=None) -> str:
    """LP text for the instance with one (or a weighted) objective.

    ``objective`` is one of cost/cloud/resolution/incidence/weighted;
    ``weights`` supplies the four scalarization weights for "weighted";
    ``bounds`` maps objective names to inclusive integer upper bounds emitted
    as epsilon rows.  The full variable structure is always present so the
    same file supports any bound combination downstream.
    """
    if objective not in OBJECTIVE_CHOICES:
        raise ValueError(f"unknown objective {objective!r} (expected one of {', '.join(OBJECTIVE_CHOICES)})")
    inst.validate()
    n, m = inst.n, inst.m
    providers = [[] for _ in range(n)]
    clear_providers = [[] for _ in range(n)]
    for i in range(m):
        for k in sorted(inst.parts_of[i]):
            providers[k].append(i)
        for k in inst.parts_of[i] - inst.cloudy_of[i]:
            clear_providers[k].append(i)
    for k in range(n):
        providers[k].sort()
        clear_providers[k].sort()
    # parts some covering image sees through clouds; only these need y vars
    cloudy_parts = [k for k in range(n) if clear_providers[k] != providers[k]]
    big = max(inst.resolution) + 1
    cloud_const = sum(inst.part_area[k] for k in cloudy_parts)

    cost_terms = [(inst.cost[i], f"x_{i + 1}") for i in range(m)]
    res_terms = [(1, f"r_{k + 1}") for k in range(n)]
    inc_terms = [(1, "max_f")]
    cloud_terms = [(-inst.part_area[k], f"y_{k + 1}") for k in cloudy_parts]

    out: list[str] = []
    out.append(f"\\ mosaic cover model: images={m} parts={n}")
    out.append(f"\\ objective={objective}; cloud_area = {cloud_const} + value of the cloud objective")
    out.append("Minimize")
    if objective == "cost":
        obj_terms = cost_terms
    elif objective == "resolution":
        obj_terms = res_terms
    elif objective == "incidence":
        obj_terms = inc_terms
    elif objective == "cloud":
        obj_terms = cloud_terms if cloud_terms else [(0, "max_f")]
    else:
        w_cost, w_cloud, w_res, w_inc = _weights_tuple(weights)
        obj_terms = []
        for weight, terms in ((w_cost, cost_terms), (w_cloud, cloud_terms),
                              (w_res, res_terms), (w_inc, inc_terms)):
            if weight:
                obj_terms.extend((weight * c, v) for c, v in terms)
        if not obj_terms:
            obj_terms = [(0, "max_f")]
    lines = _expr_lines(obj_terms)
    out.append(f" obj: {lines[0]}")
    for cont in lines[1:]:
        out.append(f"   {cont}")

    out.append("Subject To")
    for k in range(n):
        _emit_row(out, f"cover_{k + 1}", [(1, f"x_{i + 1}") for i in providers[k]], ">=", 1)
    for k in range(n):
        _emit_row(out, f"zsum_{k + 1}", [(1, f"z_{k + 1}_{i + 1}") for i in providers[k]],
                  "=", len(providers[k]) - 1)
    for k in range(n):
        for i in providers[k]:
            _emit_row(
                out,
                f"res_{k + 1}_{i + 1}",
                [(1, f"r_{k + 1}"), (big - inst.resolution[i], f"x_{i + 1}"), (2 * big, f"z_{k + 1}_{i + 1}")],
                ">=",
                big,
            )
    for i in range(m):
        _emit_row(out, f"inc_{i + 1}", [(1, "max_f"), (-inst.angle[i], f"x_{i + 1}")], ">=", 0)
    for k in cloudy_parts:
        terms = [(1, f"x_{i + 1}") for i in clear_providers[k]]
        terms.append((-1, f"y_{k + 1}"))
        _emit_row(out, f"cloud_{k + 1}", terms, ">=", 0)

    if bounds:
        unknown = set(bounds) - {"cost", "cloud", "resolution", "incidence"}
        if unknown:
            raise ValueError(f"unknown bound key(s): {', '.join(sorted(unknown))}")
        if "cost" in bounds:
            _emit_row(out, "eps_cost", cost_terms, "<=", int(bounds["cost"]))
        if "cloud" in bounds:
            # true cloud area is cloud_const plus the (negative) y terms
            rhs = int(bounds["cloud"]) - cloud_const
            terms = cloud_terms if cloud_terms else [(0, "max_f")]
            _emit_row(out, "eps_cloud", terms, "<=", rhs)
        if "resolution" in bounds:
            _emit_row(out, "eps_resolution", res_terms, "<=", int(bounds["resolution"]))
        if "incidence" in bounds:
            _emit_row(out, "eps_incidence", inc_terms, "<=", int(bounds["incidence"]))

    out.append("Bounds")
    for k in range(n):
        out.append(f" r_{k + 1} >= 0")
    out.append(" max_f >= 0")

    out.append("Binaries")
    names = [f"x_{i + 1}" for i in range(m)]
    for k in range(n):
        names.extend(f"z_{k + 1}_{i + 1}" for i in providers[k])
    names.extend(f"y_{k + 1}" for k in cloudy_parts)
    for start in range(0, len(names), _WRAP):
        out.append(" " + " ".join(names[start:start + _WRAP]))
    out.append("End")
    return "\n".join(out) + "\n"
