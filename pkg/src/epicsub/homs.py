"""Homomorphism search between finite algebras.

Homomorphisms B -> C are the solutions in C of the flat equations
``f(z_a1, ..., z_ak) = z_f(a1..ak)`` read off B's tables, so the engine is a
general solver for systems of flat equations: backtracking with
smallest-domain-first variable order, ascending values, and forward checking
on every constraint left with a single unassigned variable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import Algebra, tuples
from .limits import Limits, ResourceLimitExceeded, resolve


@dataclass
class Constraint:
    symbol: str
    args: tuple[int, ...]
    result: int


def _popcount(x: int) -> int:
    return bin(x).count("1")


def solve(n_vars: int, constraints: Sequence[Constraint], target: Algebra,
          fixed: Mapping[int, int] | None = None, equalities: Iterable[tuple[int, int]] = (),
          limits: Limits | None = None) -> list[tuple[int, ...]]:
    """All assignments of ``n_vars`` variables into ``target`` satisfying every
    constraint and equality, sorted lexicographically."""
    limits = resolve(limits)
    n = target.size
    full = (1 << n) - 1

    # merge equal variables onto a representative
    rep = list(range(n_vars))

    def find(v):
        while rep[v] != v:
            rep[v] = rep[rep[v]]
            v = rep[v]
        return v

    for a, b in equalities:
        ra, rb = find(a), find(b)
        if ra != rb:
            rep[max(ra, rb)] = min(ra, rb)
    canon = [find(v) for v in range(n_vars)]

    cons = [(c.symbol, tuple(canon[a] for a in c.args), canon[c.result]) for c in constraints]
    tables = {sym: target.tables[sym] for sym in target.signature.names}
    occ: list[list[int]] = [[] for _ in range(n_vars)]
    for cid, (_, args, res) in enumerate(cons):
        for v in set(args) | {res}:
            occ[v].append(cid)
    live = sorted(set(canon))

    domains = [full] * n_vars
    for v, val in (fixed or {}).items():
        if not 0 <= val < n:
            raise ValueError(f"fixed value {val} out of range")
        domains[canon[v]] &= 1 << val
    assign = [-1] * n_vars

    def check(cid: int, values: list[int]) -> bool:
        sym, args, res = cons[cid]
        idx = 0
        for a in args:
            idx = idx * n + values[a]
        return tables[sym][idx] == values[res]

    def prune(cid: int, doms: list[int], values: list[int]) -> bool:
        """Forward-check one constraint; False on a wipe-out."""
        sym, args, res = cons[cid]
        free = {v for v in args if values[v] < 0}
        if values[res] < 0:
            free.add(res)
        if not free:
            return check(cid, values)
        if len(free) > 1:
            return True
        (u,) = free
        allowed = 0
        dom = doms[u]
        table = tables[sym]
        for val in range(n):
            if not dom >> val & 1:
                continue
            values[u] = val
            idx = 0
            for a in args:
                idx = idx * n + values[a]
            if table[idx] == values[res]:
                allowed |= 1 << val
        values[u] = -1
        doms[u] = dom & allowed
        return doms[u] != 0

    for cid in range(len(cons)):
        if not prune(cid, domains, assign):
            return []
    if any(domains[v] == 0 for v in live):
        return []

    solutions: list[tuple[int, ...]] = []
    nodes = [0]

    def search(doms: list[int], remaining: int) -> None:
        if remaining == 0:
            solutions.append(tuple(assign[canon[v]] for v in range(n_vars)))
            return
        nodes[0] += 1
        if nodes[0] % 4096 == 0:
            limits.check_time()
        if nodes[0] > limits.max_search_nodes:
            raise ResourceLimitExceeded("search nodes", limits.max_search_nodes, nodes[0])
        var = min((v for v in live if assign[v] < 0), key=lambda v: (_popcount(doms[v]), v))
        dom = doms[var]
        for val in range(n):
            if not dom >> val & 1:
                continue
            assign[var] = val
            new = list(doms)
            new[var] = 1 << val
            if all(prune(cid, new, assign) for cid in occ[var]):
                search(new, remaining - 1)
            assign[var] = -1

    search(domains, len(live))
    solutions.sort()
    return solutions


def table_constraints(source: Algebra) -> list[Constraint]:
    out = []
    for sym, arity in source.signature:
        for args in tuples(source.size, arity):
            out.append(Constraint(sym, args, source.op(sym, *args)))
    return out


@dataclass
class PartialMap:
    """A partial assignment source element -> target element (None = unassigned)."""
    source: Algebra
    target: Algebra
    assignment: tuple[int | None, ...] = field(default=())

    def __post_init__(self):
        if not self.assignment:
            self.assignment = (None,) * self.source.size
        if len(self.assignment) != self.source.size:
            raise ValueError("assignment length differs from source size")

    @classmethod
    def from_dict(cls, source: Algebra, target: Algebra, values: Mapping[int, int]) -> "PartialMap":
        a: list[int | None] = [None] * source.size
        for k, v in values.items():
            a[k] = v
        return cls(source, target, tuple(a))

    def as_dict(self) -> dict[int, int]:
        return {i: v for i, v in enumerate(self.assignment) if v is not None}

    def candidates(self) -> list[set[int]]:
        return [set(range(self.target.size)) if v is None else {v} for v in self.assignment]


def homs(source: Algebra, target: Algebra, fixed: PartialMap | Mapping[int, int] | None = None,
         limits: Limits | None = None) -> list[tuple[int, ...]]:
    """Every homomorphism source -> target extending ``fixed``, in lexicographic order."""
    source.check_compatible(target)
    if isinstance(fixed, PartialMap):
        fixed = fixed.as_dict()
    return solve(source.size, table_constraints(source), target, fixed=fixed, limits=limits)


def count_homs(source: Algebra, target: Algebra, limits: Limits | None = None) -> int:
    return len(homs(source, target, limits=limits))


def is_homomorphism(h: Sequence[int], source: Algebra, target: Algebra) -> bool:
    if len(h) != source.size or any(not 0 <= v < target.size for v in h):
        return False
    for sym, arity in source.signature:
        for args in tuples(source.size, arity):
            if h[source.op(sym, *args)] != target.op(sym, *(h[a] for a in args)):
                return False
    return True


def brute_force_homs(source: Algebra, target: Algebra) -> list[tuple[int, ...]]:
    """Filter all |target|^|source| maps; an oracle for small cases."""
    return [h for h in itertools.product(range(target.size), repeat=source.size)
            if is_homomorphism(h, source, target)]


@dataclass
class HomGroups:
    groups: dict[tuple[int, ...], list[tuple[int, ...]]]
    split: tuple[tuple[int, ...], tuple[int, ...], int] | None
    n_homs: int


def homs_grouped_by_restriction(source: Algebra, target: Algebra, sub: Iterable[int],
                                limits: Limits | None = None) -> HomGroups:
    """Partition homs(source, target) by their restriction to ``sub``.

    ``split`` is the lexicographically first pair (g, g') in a common group
    with the least element b where they differ, or None when every group
    is a singleton.
    """
    sub = sorted(set(sub))
    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    all_homs = homs(source, target, limits=limits)
    for h in all_homs:
        groups.setdefault(tuple(h[a] for a in sub), []).append(h)
    split = None
    for key in sorted(groups):
        g = groups[key]
        if len(g) > 1:
            b = next(i for i in range(source.size) if g[0][i] != g[1][i])
            split = (g[0], g[1], b)
            break
    return HomGroups(groups, split, len(all_homs))
