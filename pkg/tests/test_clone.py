import itertools

import pytest

from epicsub.algebra import evaluate, is_nu_term, is_pixley_term, term_operation
from epicsub.clone import (clone_closure, find_majority_term, find_nu_term, find_pixley_term,
                           free_algebra, interpolate)
from epicsub.library import (bare_set, chain_lattice, cyclic_group, kleene3, median_algebra, trivial,
                             two_boolean, two_lattice)
from epicsub.limits import Limits, ResourceLimitExceeded

from oracles import monotone_boolean_functions


def test_free_lattice_sizes():
    two = two_lattice()
    f3 = free_algebra([two], 3)
    assert len(f3) == 20
    # element i is the term operation of closure.term(i)
    ops = {term_operation(two, f3.term(i), 3) for i in range(len(f3))}
    assert ops == set(monotone_boolean_functions(3))
    assert len(free_algebra([two], 0)) == 2
    assert len(free_algebra([two], 1)) == 3
    assert len(free_algebra([two_boolean()], 3)) == 256
    assert len(free_algebra([chain_lattice(3)], 2)) == 6


def test_free_discovery_order():
    f = free_algebra([two_lattice()], 2)
    assert [str(f.term(i)) for i in f.generators] == ["x0", "x1"]
    assert str(f.term(2)) == "bot" and str(f.term(3)) == "top"


def test_majority_and_nu():
    two = two_lattice()
    t = find_majority_term([two])
    assert str(t) == "meet(join(x0,x1),meet(join(x0,x2),join(x1,x2)))"
    assert is_nu_term([two], t, 3)
    t4 = find_nu_term([two], 4)
    assert t4 is not None and is_nu_term([two], t4, 4)
    assert find_majority_term([bare_set(2)]) is None
    assert find_majority_term([cyclic_group(2)]) is None
    assert is_nu_term([median_algebra()], find_majority_term([median_algebra()]), 3)


def test_pixley():
    t = find_pixley_term([two_boolean()])
    assert t is not None and is_pixley_term([two_boolean()], t)
    assert find_pixley_term([two_lattice()]) is None
    assert find_pixley_term([trivial()]) is not None


def test_pixley_absent_from_monotone_functions():
    # an independent reason the lattice search must fail
    pts = list(itertools.product((0, 1), repeat=3))
    for f in monotone_boolean_functions(3):
        p = dict(zip(pts, f))
        if all(p[(x, y, y)] == x and p[(x, y, x)] == x and p[(y, y, x)] == x for x in (0, 1) for y in (0, 1)):
            pytest.fail("monotone Pixley operation found")


def test_interpolate():
    two = two_lattice()
    t = interpolate([two], 2, [{(0, 1): 1, (1, 0): 1, (0, 0): 0}])
    assert all(evaluate(two, t, a) == v for a, v in [((0, 1), 1), ((1, 0), 1), ((0, 0), 0)])
    # no lattice term sends (1, 1) to 0 while fixing (0, 0) -> 0 and (0,1) -> 1
    assert interpolate([two], 2, [{(1, 1): 0, (0, 1): 1}]) is None


def test_closure_limit():
    with pytest.raises(ResourceLimitExceeded):
        clone_closure([two_boolean()], 3, limits=Limits(max_closure_size=50))


def test_kleene_has_majority_not_pixley():
    k = kleene3()
    assert find_majority_term([k]) is not None
    assert find_pixley_term([k]) is None
