"""Property-based invariants over randomly drawn instances."""

from hypothesis import given, settings
from hypothesis import strategies as st

from mosaic_select.frontier import brute_force_front, hypervolume, saugmencon
from mosaic_select.instance import DiscreteInstance, discrete_from_json, discrete_to_json
from mosaic_select.objectives import dominates, evaluate, is_cover


@st.composite
def instances(draw, max_m=6, max_n=8):
    m = draw(st.integers(2, max_m))
    n = draw(st.integers(2, max_n))
    parts_of = [set(draw(st.sets(st.integers(0, n - 1), max_size=n))) for _ in range(m)]
    # patch any part nobody covers so the instance stays feasible
    covered = set().union(*parts_of)
    for k in range(n):
        if k not in covered:
            parts_of[draw(st.integers(0, m - 1))].add(k)
    cloudy = [set(draw(st.sets(st.sampled_from(sorted(p)), max_size=len(p)))) if p else set()
              for p in parts_of]
    return DiscreteInstance(
        part_area=tuple(draw(st.integers(1, 9)) for _ in range(n)),
        parts_of=tuple(frozenset(p) for p in parts_of),
        cloudy_of=tuple(frozenset(c) for c in cloudy),
        cost=tuple(draw(st.integers(0, 20)) for _ in range(m)),
        resolution=tuple(draw(st.integers(1, 15)) for _ in range(m)),
        angle=tuple(draw(st.integers(0, 900)) for _ in range(m)),
    )


@settings(max_examples=40, deadline=None)
@given(instances())
def test_adding_an_image_never_hurts_quality_objectives(inst):
    """Growing a cover can only lower cloud/resolution and raise cost/angle."""
    full = set(range(inst.m))
    for drop in range(inst.m):
        smaller = full - {drop}
        if not smaller or not is_cover(inst, smaller):
            continue
        small_vec = evaluate(inst, smaller)
        full_vec = evaluate(inst, full)
        assert full_vec.cost >= small_vec.cost
        assert full_vec.cloud_area <= small_vec.cloud_area
        assert full_vec.resolution_sum <= small_vec.resolution_sum
        assert full_vec.max_incidence >= small_vec.max_incidence


@settings(max_examples=30, deadline=None)
@given(instances())
def test_enumerated_front_matches_brute_force(inst):
    assert saugmencon(inst).vectors() == brute_force_front(inst).vectors()


@settings(max_examples=30, deadline=None)
@given(instances())
def test_front_dominates_every_feasible_cover(inst):
    front = brute_force_front(inst).vectors()
    full_vec = evaluate(inst, range(inst.m))
    assert any(v == full_vec or dominates(v, full_vec) for v in front)


@settings(max_examples=40, deadline=None)
@given(instances())
def test_discrete_json_round_trip(inst):
    assert discrete_from_json(discrete_to_json(inst)) == inst


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(*[st.integers(0, 9)] * 4), min_size=1, max_size=6),
    st.tuples(*[st.integers(10, 14)] * 4),
)
def test_hypervolume_bounds_and_monotonicity(points, reference):
    value = hypervolume(points, reference)
    box = 1
    for r in reference:
        box *= r
    assert 0 < value <= box
    # every single point's own box is a lower bound
    for p in points:
        own = 1
        for c, r in zip(p, reference):
            own *= r - c
        assert value >= own
    # adding a point never shrinks the dominated region
    assert hypervolume(points + [(0, 0, 0, 0)], reference) >= value
