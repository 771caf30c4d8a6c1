"""Small standard algebras and random generators."""

from __future__ import annotations

import random
from typing import Sequence

from .algebra import Algebra, Signature, product, tuples

LATTICE = Signature([("meet", 2), ("join", 2)])
BOUNDED_LATTICE = Signature([("meet", 2), ("join", 2), ("bot", 0), ("top", 0)])
BOOLEAN = Signature([("meet", 2), ("join", 2), ("neg", 1), ("bot", 0), ("top", 0)])
DE_MORGAN = BOOLEAN
HEYTING = Signature([("meet", 2), ("join", 2), ("imp", 2), ("bot", 0), ("top", 0)])
MV = Signature([("oplus", 2), ("neg", 1), ("zero", 0)])
GROUP = Signature([("mul", 2), ("inv", 1), ("e", 0)])


def _binary(n: int, f) -> list[int]:
    return [f(a, b) for a, b in tuples(n, 2)]


def chain_lattice(n: int, bounded: bool = True) -> Algebra:
    tables = {"meet": _binary(n, min), "join": _binary(n, max)}
    if bounded:
        tables.update(bot=[0], top=[n - 1])
    sig = BOUNDED_LATTICE if bounded else LATTICE
    return Algebra(sig, n, tables, name=f"{'' if bounded else 'u'}chain{n}")


def two_lattice() -> Algebra:
    alg = chain_lattice(2)
    alg.name = "two_lat"
    return alg


def two_boolean() -> Algebra:
    return Algebra(BOOLEAN, 2, {"meet": [0, 0, 0, 1], "join": [0, 1, 1, 1], "neg": [1, 0],
                                "bot": [0], "top": [1]}, name="two_bool")


def square_lattice() -> Algebra:
    """2 x 2 with (i, j) coded as 2i + j."""
    alg = product(two_lattice(), two_lattice())
    alg.name = "square_lat"
    return alg


def kleene3() -> Algebra:
    """Three-element Kleene algebra 0 < a < 1 with neg a = a."""
    return Algebra(DE_MORGAN, 3, {"meet": _binary(3, min), "join": _binary(3, max),
                                  "neg": [2, 1, 0], "bot": [0], "top": [2]}, name="kleene3")


def godel_chain(n: int) -> Algebra:
    """The n-element Heyting chain."""
    imp = _binary(n, lambda a, b: n - 1 if a <= b else b)
    return Algebra(HEYTING, n, {"meet": _binary(n, min), "join": _binary(n, max), "imp": imp,
                                "bot": [0], "top": [n - 1]}, name=f"godel{n}")


def lukasiewicz(n: int) -> Algebra:
    """The MV-chain {0, 1/(n-1), ..., 1} scaled to 0..n-1."""
    top = n - 1
    return Algebra(MV, n, {"oplus": _binary(n, lambda a, b: min(top, a + b)),
                           "neg": [top - a for a in range(n)], "zero": [0]}, name=f"luk{n}")


def median_algebra() -> Algebra:
    return Algebra([("maj", 3)], 2, {"maj": [int(a + b + c >= 2) for a, b, c in tuples(2, 3)]},
                   name="median2")


def bare_set(n: int = 2) -> Algebra:
    return Algebra([("id", 1)], n, {"id": list(range(n))}, name=f"set{n}")


def cyclic_group(n: int) -> Algebra:
    return Algebra(GROUP, n, {"mul": _binary(n, lambda a, b: (a + b) % n),
                              "inv": [(-a) % n for a in range(n)], "e": [0]}, name=f"Z{n}")


def trivial(signature: Signature | Sequence[tuple[str, int]] = BOUNDED_LATTICE) -> Algebra:
    sig = signature if isinstance(signature, Signature) else Signature(signature)
    return Algebra(sig, 1, {s: [0] for s, _ in sig}, name="trivial")


def random_algebra(signature: Signature | Sequence[tuple[str, int]], size: int,
                   rng: random.Random, name: str | None = None) -> Algebra:
    sig = signature if isinstance(signature, Signature) else Signature(signature)
    tables = {s: [rng.randrange(size) for _ in range(size ** a)] for s, a in sig}
    return Algebra(sig, size, tables, name=name)


def standard_algebras() -> dict[str, Algebra]:
    algs = [two_lattice(), two_boolean(), chain_lattice(3), kleene3(), godel_chain(3),
            lukasiewicz(3), median_algebra(), bare_set(2), cyclic_group(2), trivial(),
            chain_lattice(2, bounded=False)]
    return {a.name: a for a in algs}
