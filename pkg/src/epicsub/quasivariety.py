"""Membership in finitely generated quasivarieties and relative subdirect irreducibility."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebra import Algebra
from .homs import homs
from .limits import Limits
from .structure import AlgebraClass, Congruence, class_IS, congruences, quotient


def separating_homs(alg: Algebra, generators: Sequence[Algebra], limits: Limits | None = None):
    """Map each separable pair (a, b), a < b, to a (generator index, hom) separating it."""
    found: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    pairs = list(itertools.combinations(alg.universe, 2))
    for i, c in enumerate(generators):
        alg.check_compatible(c)
        for h in homs(alg, c, limits=limits):
            for a, b in pairs:
                if h[a] != h[b] and (a, b) not in found:
                    found[(a, b)] = (i, h)
        if len(found) == len(pairs):
            break
    return found


def in_quasivariety(alg: Algebra, generators: Sequence[Algebra], limits: Limits | None = None) -> bool:
    """A finite algebra lies in ISPP_u(F) iff homs into members of F separate points."""
    n_pairs = alg.size * (alg.size - 1) // 2
    return len(separating_homs(alg, generators, limits)) == n_pairs


def separating_embedding(alg: Algebra, generators: Sequence[Algebra],
                         limits: Limits | None = None) -> list[tuple[int, tuple[int, ...]]] | None:
    """Homs whose product map embeds ``alg`` into a product of generators."""
    found = separating_homs(alg, generators, limits)
    if len(found) != alg.size * (alg.size - 1) // 2:
        return None
    chosen = []
    for key in sorted(found):
        if found[key] not in chosen:
            chosen.append(found[key])
    return chosen


@dataclass
class RsiReport:
    algebra: Algebra
    q_congruences: list[Congruence]
    verdict: bool
    monolith: Congruence | None


def rsi_report(alg: Algebra, generators: Sequence[Algebra], limits: Limits | None = None) -> RsiReport:
    qcons = [theta for theta in congruences(alg, limits)
             if in_quasivariety(quotient(alg, theta)[0], generators, limits)]
    nontrivial = [t for t in qcons if not t.is_diagonal]
    mono = None
    if alg.size > 1 and nontrivial:
        m = nontrivial[0]
        for t in nontrivial[1:]:
            m = m.meet(t)
        if not m.is_diagonal:
            mono = m
    return RsiReport(alg, qcons, mono is not None, mono)


def q_rsi_class(generators: Sequence[Algebra], limits: Limits | None = None) -> AlgebraClass:
    """Relatively subdirectly irreducible members of Q(F), all found inside IS(F)."""
    candidates = class_IS(generators, limits)
    return candidates.filter(lambda a: rsi_report(a, generators, limits).verdict)
