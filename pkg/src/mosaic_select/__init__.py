"""Exact multi-objective selection of satellite image mosaics.

Pipeline: a raw problem (AOI plus candidate images) is discretized into a
set-cover universe of disjoint parts, clouds are allocated per image, and
the exact 4-objective Pareto front (cost, cloud area, resolution, incidence
angle) is enumerated by two independent algorithms with a brute-force
reference for small instances.  Fronts are compared by exact hypervolume,
and instances export to CPLEX-style LP text for external solvers.
"""

from .geometry import PolygonSet, SimplePolygon, area, clip, overlay
from .instance import (
    DiscreteInstance,
    ImageRecord,
    RawProblem,
    SchemaError,
    generate_synthetic,
    ingest_catalog,
    load_discrete,
    load_raw,
    save_discrete,
    save_raw,
)
from .objectives import (
    CLOUD,
    COST,
    INCIDENCE,
    OBJECTIVE_NAMES,
    RESOLUTION,
    Cover,
    NotACoverError,
    ObjectiveVector,
    dominates,
    evaluate,
    is_cover,
)
from .preprocess import assign_clouds, discretize, preprocess
from .solver import (
    Budget,
    ObjectiveBound,
    ParetoCut,
    SolveResult,
    SolveStats,
    greedy_cover,
    solve_min,
    solve_satisfy,
)
from .frontier import (
    COMPLETE,
    PARTIAL,
    FrontPoint,
    ParetoFront,
    brute_force_front,
    hypervolume,
    load_front,
    pareto_gavanelli,
    reference_point,
    saugmencon,
    save_front,
    score,
    worst_bounds,
)
from .export import export_lp
from .render import render_svg

__version__ = "0.1.0"
