"""Objective evaluation and dominance tests."""

import random

import pytest

from mosaic_select.objectives import (
    CLOUD,
    COST,
    INCIDENCE,
    OBJECTIVE_NAMES,
    RESOLUTION,
    NotACoverError,
    ObjectiveVector,
    dominates,
    evaluate,
    is_cover,
)

from conftest import make_random_discrete


def test_objective_index_layout():
    assert (COST, CLOUD, RESOLUTION, INCIDENCE) == (0, 1, 2, 3)
    assert OBJECTIVE_NAMES == ("cost", "cloud_area", "resolution_sum", "max_incidence")


class TestEvaluate:
    def test_reference_cover(self, two_image_overlap):
        vec = evaluate(two_image_overlap, {0, 1})
        assert vec == ObjectiveVector(30, 11, 33, 200)

    def test_cloud_area_is_parts_no_one_sees_clear(self, two_image_overlap):
        # parts 3 and 6 stay cloudy under the full cover: areas 4 and 7
        vec = evaluate(two_image_overlap, {0, 1})
        assert vec.cloud_area == two_image_overlap.part_area[3] + two_image_overlap.part_area[6]

    def test_resolution_takes_best_per_part(self, two_image_overlap):
        # shared parts use image 0's finer 4; part 1 only has image 1's 9
        assert evaluate(two_image_overlap, {0, 1}).resolution_sum == 4 * 6 + 9

    def test_incidence_is_max_over_taken(self, two_image_overlap):
        assert evaluate(two_image_overlap, {0, 1}).max_incidence == 200

    def test_non_cover_raises(self, two_image_overlap):
        with pytest.raises(NotACoverError):
            evaluate(two_image_overlap, {0})
        with pytest.raises(NotACoverError):
            evaluate(two_image_overlap, set())

    def test_matches_independent_recomputation(self):
        rng = random.Random(42)
        for seed in range(15):
            inst = make_random_discrete(seed, m=8, n=12)
            full = frozenset(range(inst.m))
            taken = frozenset(i for i in full if rng.random() < 0.7) or full
            if not is_cover(inst, taken):
                taken = full
            vec = evaluate(inst, taken)

            # second route: plain set arithmetic, no shared helpers
            cost = sum(inst.cost[i] for i in taken)
            cloud = 0
            res = 0
            for k in range(inst.n):
                owners = [i for i in taken if k in inst.parts_of[i]]
                assert owners
                res += min(inst.resolution[i] for i in owners)
                if all(k in inst.cloudy_of[i] for i in owners):
                    cloud += inst.part_area[k]
            angle = max(inst.angle[i] for i in taken)
            assert vec == ObjectiveVector(cost, cloud, res, angle)


class TestIsCover:
    def test_partial_and_full(self, two_image_overlap):
        assert is_cover(two_image_overlap, {0, 1})
        assert not is_cover(two_image_overlap, {0})
        assert not is_cover(two_image_overlap, {1})
        assert not is_cover(two_image_overlap, set())


class TestDominates:
    def test_equal_vectors_do_not_dominate(self):
        v = ObjectiveVector(1, 2, 3, 4)
        assert not dominates(v, v)

    def test_strict_improvement_in_one(self):
        a = ObjectiveVector(1, 2, 3, 4)
        b = ObjectiveVector(1, 2, 3, 5)
        assert dominates(a, b)
        assert not dominates(b, a)

    def test_componentwise_better(self):
        assert dominates(ObjectiveVector(0, 0, 0, 0), ObjectiveVector(1, 1, 1, 1))

    def test_incomparable(self):
        a = ObjectiveVector(1, 5, 3, 4)
        b = ObjectiveVector(2, 2, 3, 4)
        assert not dominates(a, b)
        assert not dominates(b, a)

    def test_transitivity_spot_check(self):
        rng = random.Random(3)
        vecs = [ObjectiveVector(*(rng.randint(0, 5) for _ in range(4))) for _ in range(40)]
        for a in vecs:
            for b in vecs:
                for c in vecs:
                    if dominates(a, b) and dominates(b, c):
                        assert dominates(a, c)
