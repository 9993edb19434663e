"""Test-only reader for the emitted LP text: parse, then solve with scipy.

Kept deliberately separate from the package so the export path is checked by
an independent consumer (HiGHS via scipy.optimize.milp).
"""

from __future__ import annotations

import re

_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z][A-Za-z0-9_]*)")
_SECTIONS = ("Minimize", "Subject To", "Bounds", "Binaries", "End")


def parse_terms(text: str) -> list[tuple[float, str]]:
    out = []
    for sign, mag, var in _TERM.findall(text):
        coef = float(mag) if mag else 1.0
        if sign == "-":
            coef = -coef
        out.append((coef, var))
    return out


def parse_lp(text: str):
    """Returns (objective terms, rows, bound lines, binary names).

    Rows are (name, terms, relation, rhs); expressions may wrap onto
    continuation lines, which carry no colon.
    """
    lines = [ln.rstrip() for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("\\")]
    section = None
    objective: list[tuple[float, str]] = []
    rows = []
    bounds: list[str] = []
    binaries: list[str] = []
    current = None

    def flush():
        nonlocal current
        if current is None:
            return
        name, body = current
        tail = re.search(r"(<=|>=|=)\s*(-?\d+(?:\.\d+)?)\s*$", body)
        if tail is None:
            raise ValueError(f"row {name} has no relation/rhs: {body!r}")
        rows.append((name, parse_terms(body[:tail.start()]), tail.group(1), float(tail.group(2))))
        current = None

    for ln in lines:
        word = ln.strip()
        if word in _SECTIONS:
            flush()
            section = word
            continue
        if section == "Minimize":
            objective += parse_terms(word.split(":", 1)[1] if ":" in word else word)
        elif section == "Subject To":
            if ":" in word:
                flush()
                name, body = word.split(":", 1)
                current = (name.strip(), body)
            else:
                current = (current[0], current[1] + " " + word)
        elif section == "Bounds":
            bounds.append(word)
        elif section == "Binaries":
            binaries += word.split()
    flush()
    return objective, rows, bounds, binaries


def solve_lp(text: str):
    """Solve the parsed model with scipy's MILP; returns the scipy result."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    objective, rows, _, binaries = parse_lp(text)
    names: list[str] = []
    seen = set()

    def note(v):
        if v not in seen:
            seen.add(v)
            names.append(v)

    for _, v in objective:
        note(v)
    for _, terms, _, _ in rows:
        for _, v in terms:
            note(v)
    for v in binaries:
        note(v)
    idx = {v: i for i, v in enumerate(names)}
    c = np.zeros(len(names))
    for coef, v in objective:
        c[idx[v]] += coef
    matrix = []
    lo = []
    hi = []
    for _, terms, rel, rhs in rows:
        row = np.zeros(len(names))
        for coef, v in terms:
            row[idx[v]] += coef
        matrix.append(row)
        lo.append(-np.inf if rel == "<=" else rhs)
        hi.append(np.inf if rel == ">=" else rhs)
    integrality = np.zeros(len(names))
    lower = np.zeros(len(names))
    upper = np.full(len(names), np.inf)
    for v in binaries:
        integrality[idx[v]] = 1
        upper[idx[v]] = 1
    return milp(
        c=c,
        constraints=LinearConstraint(np.array(matrix), lo, hi),
        integrality=integrality,
        bounds=Bounds(lower, upper),
    )
