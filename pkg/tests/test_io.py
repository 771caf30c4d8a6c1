import random

import pytest
from hypothesis import given, settings, strategies as st

from epicsub.io import (DocumentError, emit_algebra, emit_document, load_document, parse_algebra,
                        parse_document, parse_elements)
from epicsub.library import random_algebra, square_lattice, two_lattice
from epicsub.structure import canonical_form

from conftest import SIGS

TWO = """# the two-element bounded lattice
algebra two_lat
size 2
labels bot top
op meet 2 : 0 0 0 1
op join 2 : 0 1 1 1
op bot 0 : 0
op top 0 : 1
"""


def test_parse_and_round_trip():
    doc = parse_document(TWO)
    assert doc.algebra == two_lattice()
    assert doc.labels == ("bot", "top")
    text = emit_document(doc)
    assert text == TWO.split("\n", 1)[1]
    assert emit_document(parse_document(text)) == text


def test_explicit_square_matches_product():
    text = """size 4
op meet 2 : 0 0 0 0  0 1 0 1  0 0 2 2  0 1 2 3
op join 2 : 0 1 2 3  1 1 3 3  2 3 2 3  3 3 3 3
op bot 0 : 0
op top 0 : 3
"""
    alg = parse_algebra(text)
    assert canonical_form(alg).encoding == canonical_form(square_lattice()).encoding


@pytest.mark.parametrize("text, line, col, fragment", [
    ("size 2\nop f 1 : 0 2\n", 2, 12, "out of range"),
    ("size 2\nop f 1 : 0\n", 2, 4, "expected 2"),
    ("size 2\nop f 1 : 0 1\nop f 1 : 1 0\n", 3, 4, "duplicate symbol"),
    ("size 2\ncolour red\n", 2, 1, "unknown field"),
    ("size 2\nsize 3\n", 2, 1, "twice"),
    ("op f 1 : 0 1\n", 1, 1, "missing"),
    ("size two\n", 1, 6, "integer"),
    ("size 2\nlabels a a\n", 2, 8, "unique"),
    ("size 2\nop f 1 0 1\n", 2, 1, "expected"),
])
def test_errors_carry_position(text, line, col, fragment):
    with pytest.raises(DocumentError) as info:
        parse_document(text)
    err = info.value
    assert (err.line, err.column) == (line, col)
    assert fragment in err.message


def test_elements_by_label_or_index(tmp_path):
    p = tmp_path / "two.alg"
    p.write_text(TWO)
    doc = load_document(p)
    assert parse_elements("bot,top", doc) == [0, 1]
    assert parse_elements("1 0", doc) == [1, 0]
    with pytest.raises(ValueError):
        parse_elements("mid", doc)
    with pytest.raises(ValueError):
        parse_elements("2", doc)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, len(SIGS) - 1), st.integers(1, 4))
def test_round_trip_random(seed, sig, n):
    alg = random_algebra(SIGS[sig], n, random.Random(seed), name="r")
    text = emit_algebra(alg)
    assert parse_algebra(text) == alg
    assert emit_algebra(parse_algebra(text)) == text
