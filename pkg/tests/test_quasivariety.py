from epicsub.algebra import product
from epicsub.library import chain_lattice, kleene3, square_lattice, two_boolean, two_lattice
from epicsub.quasivariety import (in_quasivariety, q_rsi_class, rsi_report, separating_embedding,
                                  separating_homs)
from epicsub.structure import is_isomorphic


def test_membership():
    two = two_lattice()
    assert in_quasivariety(square_lattice(), [two])
    assert in_quasivariety(chain_lattice(3), [two])
    assert in_quasivariety(product(chain_lattice(3), two), [two])
    # neg a = a has no image in 2
    assert not in_quasivariety(kleene3(), [two_boolean()])
    assert in_quasivariety(kleene3(), [kleene3()])


def test_separating_embedding():
    emb = separating_embedding(chain_lattice(3), [two_lattice()])
    assert emb is not None and len(emb) == 2
    maps = [h for _, h in emb]
    assert len({tuple(h[x] for h in maps) for x in range(3)}) == 3
    assert len(separating_homs(square_lattice(), [two_lattice()])) == 6


def test_rsi():
    two = two_lattice()
    assert rsi_report(two, [two]).verdict
    assert not rsi_report(square_lattice(), [two]).verdict
    assert not rsi_report(chain_lattice(3), [two]).verdict
    sizes = [m.algebra.size for m in q_rsi_class([two]).members]
    assert sizes == [2]
    k = q_rsi_class([kleene3()])
    assert sorted(m.algebra.size for m in k.members) == [2, 3]
    assert any(is_isomorphic(m.algebra, two_boolean()) for m in k.members)
