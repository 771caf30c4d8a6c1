import pytest

from epicsub.algebra import (Algebra, Apply, Identity, Signature, Var, evaluate, holds, induced,
                             is_nu_term, is_pixley_term, nu_identities, parse_term, permute, power,
                             product, substitute, term_operation, term_variables)
from epicsub.library import BOUNDED_LATTICE, chain_lattice, square_lattice, two_boolean, two_lattice


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature([("f", 2), ("f", 1)])
    with pytest.raises(ValueError):
        Signature([("1f", 2)])
    with pytest.raises(ValueError):
        Signature([("f", -1)])
    sig = Signature([("f", 2), ("c", 0)])
    assert sig.arity("f") == 2 and sig.constants == ("c",) and "c" in sig


def test_algebra_table_checks():
    with pytest.raises(ValueError):
        Algebra([("f", 1)], 2, {"f": [0, 2]})
    with pytest.raises(ValueError):
        Algebra([("f", 1)], 2, {"f": [0]})
    with pytest.raises(ValueError):
        Algebra([("f", 1)], 2, {"f": [0, 1], "g": [0]})


def test_product_coding():
    sq = square_lattice()
    two = two_lattice()
    # (i, j) -> 2i + j, so meet((0,1),(1,0)) = (0,0)
    assert sq.op("meet", 1, 2) == 0
    assert sq.op("join", 1, 2) == 3
    assert sq.constant("top") == 3
    assert product(two, two) == sq
    assert power(two, 2) == sq
    assert power(two, 0).size == 1


def test_permute_and_induced():
    c3 = chain_lattice(3)
    p = permute(c3, [2, 0, 1])
    assert p.op("meet", 2, 0) == 2          # image of min(0, 1) = 0
    sub = induced(c3, [0, 2])
    assert sub.size == 2 and sub.op("join", 0, 1) == 1
    with pytest.raises(ValueError):
        induced(c3, [1])                     # misses the constants


def test_terms_parse_and_evaluate():
    sig = BOUNDED_LATTICE
    t = parse_term("meet(join(x0,x1),top)", sig)
    assert str(t) == "meet(join(x0,x1),top)"
    assert term_variables(t) == {0, 1}
    two = two_lattice()
    assert evaluate(two, t, [0, 1]) == 1
    op = term_operation(two, t, 2)
    assert op == (0, 1, 1, 1)
    s = substitute(t, [Var(0), Var(0)])
    assert evaluate(two, s, [0]) == 0
    with pytest.raises(ValueError):
        parse_term("meet(x0)", sig)
    with pytest.raises(ValueError):
        parse_term("nope(x0,x1)", sig)


def test_identities():
    two = two_lattice()
    comm = Identity(Apply("meet", (Var(0), Var(1))), Apply("meet", (Var(1), Var(0))), 2)
    assert holds(two, comm)
    med = parse_term("meet(join(x0,x1),meet(join(x0,x2),join(x1,x2)))", BOUNDED_LATTICE)
    assert len(nu_identities(med, 3)) == 3
    assert all(holds(two, i) for i in nu_identities(med, 3))
    assert is_nu_term([two], med, 3)
    assert not is_pixley_term([two], med)
    with pytest.raises(ValueError):
        is_nu_term([two], med, 2)
    pix = parse_term("meet(join(x0,x2),join(meet(x0,x2),neg(x1)))", two_boolean().signature)
    assert is_pixley_term([two_boolean()], pix)
