import random

import pytest
from hypothesis import given, settings, strategies as st

from epicsub.homs import (Constraint, PartialMap, brute_force_homs, count_homs, homs,
                          homs_grouped_by_restriction, is_homomorphism, solve)
from epicsub.library import bare_set, random_algebra, square_lattice, two_lattice
from epicsub.limits import Limits, ResourceLimitExceeded

from conftest import SIGS
from oracles import all_maps_homs


def test_projections_of_square():
    assert homs(square_lattice(), two_lattice()) == [(0, 0, 1, 1), (0, 1, 0, 1)]
    assert count_homs(two_lattice(), square_lattice()) == 1      # constants are preserved


def test_fixed_values_and_partial_map():
    sq, two = square_lattice(), two_lattice()
    assert homs(sq, two, fixed={1: 1}) == [(0, 1, 0, 1)]
    pm = PartialMap.from_dict(sq, two, {2: 1})
    assert pm.as_dict() == {2: 1}
    assert homs(sq, two, fixed=pm) == [(0, 0, 1, 1)]


def test_grouping_split():
    sq, two = square_lattice(), two_lattice()
    assert homs_grouped_by_restriction(sq, two, [0, 1, 3]).split is None
    g = homs_grouped_by_restriction(sq, two, [0, 3])
    assert g.split == ((0, 0, 1, 1), (0, 1, 0, 1), 1)
    assert g.n_homs == 2


def test_solver_equalities():
    # x0 = x1 and f(x0) = x2 in the 3-element set with identity
    s3 = bare_set(3)
    sols = solve(3, [Constraint("id", (0,), 2)], s3, equalities=[(0, 1)])
    assert sols == [(v, v, v) for v in range(3)]


def test_search_node_limit():
    big = bare_set(6)
    with pytest.raises(ResourceLimitExceeded):
        homs(big, big, limits=Limits(max_search_nodes=10))


algebra_pairs = st.builds(
    lambda seed, sig, n, m: (random_algebra(SIGS[sig], n, random.Random(seed)),
                             random_algebra(SIGS[sig], m, random.Random(seed + 1))),
    st.integers(0, 10**6), st.integers(0, len(SIGS) - 1), st.integers(1, 4), st.integers(1, 3))


@settings(max_examples=100, deadline=None)
@given(algebra_pairs)
def test_matches_all_maps(pair):
    src, dst = pair
    got = homs(src, dst)
    assert got == all_maps_homs(src, dst) == brute_force_homs(src, dst)
    assert all(is_homomorphism(h, src, dst) for h in got)
