import random

import pytest

from epicsub.certificates import (NotAFunction, apply_formula, closure_violation,
                                  defines_function, delta_formula, find_interpolating_term,
                                  format_certificate, parse_certificate, parse_pp, partial_function,
                                  solutions, verify_witness)
from epicsub.homs import homs
from epicsub.library import BOUNDED_LATTICE, BOOLEAN, square_lattice, two_boolean, two_lattice

from mutations import KINDS, random_mutation


def test_delta_formula_layout():
    sq = square_lattice()
    cert = delta_formula(sq, [0, 1, 3])
    assert cert.elements == (0, 1, 3, 2)
    assert cert.inputs == (0, 1, 3) and cert.outputs == (2,)
    assert len(cert.equations) == 2 * 16 + 2
    assert cert.var_name(2) == "x2" and cert.var_name(3) == "y0"


def test_solutions_are_homs():
    sq, two = square_lattice(), two_lattice()
    cert = delta_formula(sq, [0, 3])
    sols = solutions(cert, two)
    back = sorted(tuple(s[cert.elements.index(x)] for x in range(sq.size)) for s in sols)
    assert back == homs(sq, two)


def test_defines_function_matches_epicness():
    sq, two = square_lattice(), two_lattice()
    assert defines_function(delta_formula(sq, [0, 1, 3]), [two])
    assert not defines_function(delta_formula(sq, [0, 3]), [two])
    with pytest.raises(NotAFunction):
        partial_function(delta_formula(sq, [0, 3]), two)


def test_complement_formula():
    phi = parse_pp("meet(x,y)=bot & join(x,y)=top", BOUNDED_LATTICE, ["x"], ["y"])
    two = two_lattice()
    assert partial_function(phi, two) == {(0,): (1,), (1,): (0,)}
    assert apply_formula(phi, two, [1]) == (0,)
    sq = square_lattice()
    assert apply_formula(phi, sq, [1]) == (2,)
    # the complement is not a lattice term operation on 2
    assert find_interpolating_term([two], phi) is None
    assert closure_violation([two], phi) is not None


def test_interpolation_in_boolean_case():
    phi = parse_pp("meet(x,y)=bot & join(x,y)=top", BOOLEAN, ["x"], ["y"])
    t = find_interpolating_term([two_boolean()], phi)
    assert str(t) == "neg(x0)"
    assert closure_violation([two_boolean()], phi) is None


def test_verify_accepts_and_rejects():
    sq, two = square_lattice(), two_lattice()
    good = delta_formula(sq, [0, 1, 3])
    assert verify_witness(sq, [0, 1, 3], good, [two]).reason == "ok"
    bad = delta_formula(sq, [0, 3])
    assert verify_witness(sq, [0, 3], bad, [two]).reason == "not-a-function"
    assert verify_witness(sq, [1], good, [two]).reason == "subuniverse-not-closed"


def test_text_round_trip():
    sq = square_lattice()
    cert = delta_formula(sq, [0, 1, 3])
    text = format_certificate(cert)
    assert text.splitlines()[:3] == ["delta-certificate", "inputs x0=0 x1=1 x2=3", "outputs y0=2"]
    assert parse_certificate(text) == cert
    with pytest.raises(ValueError):
        parse_certificate("inputs x0=0\n")
    with pytest.raises(ValueError):
        parse_certificate(text.replace("y0=2", "y3=2"))


@pytest.mark.parametrize("kind", KINDS)
def test_each_mutation_kind(kind):
    sq, two = square_lattice(), two_lattice()
    cert = delta_formula(sq, [0, 1, 3])
    rng = random.Random(kind)
    for _ in range(10):
        _, mutant, reason = random_mutation(cert, sq, rng, kind)
        check = verify_witness(sq, [0, 1, 3], mutant, [two])
        assert not check.ok and check.reason == reason
