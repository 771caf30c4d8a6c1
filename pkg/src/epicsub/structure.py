"""Subuniverses, congruences, quotients, canonical forms and IS/HS classes."""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .algebra import Algebra, induced, permute, tuples
from .limits import Limits, ResourceLimitExceeded, resolve

# -- subuniverses --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subuniverse:
    parent: Algebra
    members: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    @property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Subuniverse) and self.members == other.members
                and (self.parent is other.parent or self.parent == other.parent))

    def __hash__(self) -> int:
        return hash(self.members)

    @property
    def is_full(self) -> bool:
        return len(self.members) == self.parent.size

    def algebra(self, name: str | None = None) -> Algebra:
        return induced(self.parent, self.members, name=name)

    def __repr__(self) -> str:
        return f"Subuniverse({list(self.members)})"


def _close(alg: Algebra, start: Iterable[int]) -> frozenset[int]:
    members = set(start)
    for sym in alg.signature.constants:
        members.add(alg.constant(sym))
    ops = [(s, a) for s, a in alg.signature if a > 0]
    frontier = set(members)
    while frontier:
        old = members - frontier
        new: set[int] = set()
        current = sorted(members)
        for sym, arity in ops:
            for args in itertools.product(current, repeat=arity):
                if old and all(a in old for a in args):
                    continue
                v = alg.op(sym, *args)
                if v not in members:
                    new.add(v)
        members |= new
        frontier = new
    return frozenset(members)


def sg(alg: Algebra, gens: Iterable[int] = ()) -> Subuniverse:
    """Least subuniverse containing ``gens`` (and every constant)."""
    gens = list(gens)
    for g in gens:
        if not 0 <= g < alg.size:
            raise ValueError(f"generator {g} not in universe")
    return Subuniverse(alg, tuple(sorted(_close(alg, gens))))


def is_closed(alg: Algebra, subset: Iterable[int]) -> bool:
    s = set(subset)
    for sym, arity in alg.signature:
        for args in itertools.product(sorted(s), repeat=arity):
            if alg.op(sym, *args) not in s:
                return False
    return True


def subuniverses(alg: Algebra, limits: Limits | None = None) -> list[Subuniverse]:
    """Every nonempty subuniverse, ordered by size then lexicographically.

    Closed sets are generated by adding one element at a time to a closed
    set and closing again; each closed set is expanded once.
    """
    limits = resolve(limits)
    seen: set[frozenset[int]] = set()
    stack: list[frozenset[int]] = []
    bottom = _close(alg, ())
    starts = [bottom] if bottom else []
    starts += [_close(alg, [a]) for a in alg.universe]
    for s in starts:
        if s not in seen:
            seen.add(s)
            stack.append(s)
    while stack:
        limits.check_time()
        s = stack.pop()
        for a in alg.universe:
            if a in s:
                continue
            t = _close(alg, s | {a})
            if t not in seen:
                seen.add(t)
                if len(seen) > limits.max_subalgebras:
                    raise ResourceLimitExceeded("subalgebra count", limits.max_subalgebras, len(seen))
                stack.append(t)
    out = [tuple(sorted(s)) for s in seen]
    out.sort(key=lambda m: (len(m), m))
    return [Subuniverse(alg, m) for m in out]


def maximal_proper_subuniverses(alg: Algebra, limits: Limits | None = None,
                                subs: Sequence[Subuniverse] | None = None) -> list[Subuniverse]:
    if subs is None:
        subs = subuniverses(alg, limits)
    proper = [s for s in subs if not s.is_full]
    sets = [frozenset(s.members) for s in proper]
    return [s for s, fs in zip(proper, sets) if not any(fs < other for other in sets)]


# -- congruences ---------------------------------------------------------


def _normalize(labels: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(x, len(relabel)) for x in labels)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            rx, ry = ry, rx
        self.parent[rx] = ry
        return True

    def labels(self) -> tuple[int, ...]:
        return _normalize([self.find(x) for x in range(len(self.parent))])


@dataclass(frozen=True, eq=False)
class Congruence:
    parent: Algebra
    block_id: tuple[int, ...]

    def __post_init__(self):
        if len(self.block_id) != self.parent.size:
            raise ValueError("block vector length differs from algebra size")
        object.__setattr__(self, "block_id", _normalize(self.block_id))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Congruence) and self.block_id == other.block_id

    def __hash__(self) -> int:
        return hash(self.block_id)

    def __le__(self, other: "Congruence") -> bool:
        return all(other.block_id[a] == other.block_id[self.rep[self.block_id[a]]]
                   for a in range(len(self.block_id)))

    def __repr__(self) -> str:
        return "Congruence(" + "|".join(
            ",".join(str(x) for x in b) for b in self.blocks()) + ")"

    @property
    def rep(self) -> list[int]:
        reps: list[int] = []
        for a, b in enumerate(self.block_id):
            if b == len(reps):
                reps.append(a)
        return reps

    @property
    def n_blocks(self) -> int:
        return max(self.block_id) + 1

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for a, b in enumerate(self.block_id):
            out[b].append(a)
        return out

    def related(self, a: int, b: int) -> bool:
        return self.block_id[a] == self.block_id[b]

    @property
    def is_diagonal(self) -> bool:
        return self.n_blocks == len(self.block_id)

    @property
    def is_total(self) -> bool:
        return self.n_blocks == 1

    def meet(self, other: "Congruence") -> "Congruence":
        return Congruence(self.parent, tuple(zip(self.block_id, other.block_id)))

    def join(self, other: "Congruence") -> "Congruence":
        uf = _UnionFind(len(self.block_id))
        for theta in (self, other):
            for block in theta.blocks():
                for x in block[1:]:
                    uf.union(block[0], x)
        return Congruence(self.parent, uf.labels())


def diagonal(alg: Algebra) -> Congruence:
    return Congruence(alg, tuple(range(alg.size)))


def total(alg: Algebra) -> Congruence:
    return Congruence(alg, (0,) * alg.size)


def _translations(alg: Algebra):
    """For each basic operation and position, the tables of the unary
    translations obtained by freezing the other arguments."""
    n = alg.size
    out = []
    for sym, arity in alg.signature:
        for pos in range(arity):
            for rest in tuples(n, arity - 1):
                out.append((sym, pos, rest))
    return out


def cg(alg: Algebra, a: int, b: int, _trans=None) -> Congruence:
    """Principal congruence generated by the pair (a, b)."""
    trans = _translations(alg) if _trans is None else _trans
    uf = _UnionFind(alg.size)
    queue = [(a, b)] if a != b else []
    if queue:
        uf.union(a, b)
    while queue:
        x, y = queue.pop()
        for sym, pos, rest in trans:
            u = alg.op(sym, *rest[:pos], x, *rest[pos:])
            v = alg.op(sym, *rest[:pos], y, *rest[pos:])
            if uf.union(u, v):
                queue.append((u, v))
    return Congruence(alg, uf.labels())


def is_congruence(alg: Algebra, labels: Sequence[int]) -> bool:
    """Direct compatibility check of a partition (independent of ``cg``)."""
    for sym, arity in alg.signature:
        for args in tuples(alg.size, arity):
            for pos in range(arity):
                for y in alg.universe:
                    if labels[y] == labels[args[pos]] and y != args[pos]:
                        other = args[:pos] + (y,) + args[pos + 1:]
                        if labels[alg.op(sym, *args)] != labels[alg.op(sym, *other)]:
                            return False
    return True


def principal_congruences(alg: Algebra) -> list[Congruence]:
    trans = _translations(alg)
    found: dict[tuple[int, ...], Congruence] = {}
    for a, b in itertools.combinations(alg.universe, 2):
        theta = cg(alg, a, b, trans)
        found.setdefault(theta.block_id, theta)
    return sorted(found.values(), key=_con_key)


def _con_key(theta: Congruence):
    return (-theta.n_blocks, theta.block_id)


def congruences(alg: Algebra, limits: Limits | None = None) -> list[Congruence]:
    """The congruence lattice, as the join-closure of the principal congruences."""
    limits = resolve(limits)
    principals = principal_congruences(alg)
    bottom = diagonal(alg)
    seen = {bottom.block_id: bottom}
    queue = [bottom]
    while queue:
        limits.check_time()
        theta = queue.pop()
        for pi in principals:
            j = theta.join(pi)
            if j.block_id not in seen:
                seen[j.block_id] = j
                if len(seen) > limits.max_subalgebras:
                    raise ResourceLimitExceeded("congruence count", limits.max_subalgebras, len(seen))
                queue.append(j)
    return sorted(seen.values(), key=_con_key)


def quotient(alg: Algebra, theta: Congruence, name: str | None = None) -> tuple[Algebra, tuple[int, ...]]:
    """The quotient algebra and the projection map (element -> block index)."""
    reps = theta.rep
    tables = {}
    for sym, arity in alg.signature:
        tables[sym] = [theta.block_id[alg.op(sym, *(reps[b] for b in args))]
                       for args in tuples(len(reps), arity)]
    return Algebra(alg.signature, len(reps), tables, name=name), theta.block_id


def monolith(alg: Algebra, cons: Sequence[Congruence] | None = None) -> Congruence | None:
    """Least non-diagonal congruence, if the non-diagonal ones have one."""
    if cons is None:
        cons = congruences(alg)
    nontrivial = [c for c in cons if not c.is_diagonal]
    if not nontrivial:
        return None
    m = nontrivial[0]
    for c in nontrivial[1:]:
        m = m.meet(c)
    return None if m.is_diagonal else m


def is_si(alg: Algebra, cons: Sequence[Congruence] | None = None) -> bool:
    if alg.size < 2:
        return False
    return monolith(alg, cons) is not None


def is_fsi(alg: Algebra, cons: Sequence[Congruence] | None = None) -> bool:
    if alg.size < 2:
        return False
    if cons is None:
        cons = congruences(alg)
    nontrivial = [c for c in cons if not c.is_diagonal]
    return all(not a.meet(b).is_diagonal for a, b in itertools.combinations(nontrivial, 2))


def is_simple(alg: Algebra, cons: Sequence[Congruence] | None = None) -> bool:
    if alg.size < 2:
        return False
    if cons is None:
        cons = congruences(alg)
    return len(cons) == 2


# -- canonical forms -----------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    perm: tuple[int, ...]
    encoding: bytes

    def apply(self, alg: Algebra) -> Algebra:
        return permute(alg, self.perm)


def _rank(keys: Sequence) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(alg: Algebra, colors: list[int], ops) -> list[int]:
    n = alg.size
    while True:
        sigs = []
        profile: list[list] = [[colors[a]] for a in range(n)]
        for sym, arity, table in ops:
            incoming: list[list] = [[] for _ in range(n)]
            positional: list[list[list]] = [[[] for _ in range(arity)] for _ in range(n)]
            for idx, args in enumerate(tuples(n, arity)):
                val = table[idx]
                ctuple = tuple(colors[x] for x in args)
                incoming[val].append(ctuple)
                for pos, x in enumerate(args):
                    positional[x][pos].append((ctuple, colors[val]))
            for a in range(n):
                profile[a].append(tuple(sorted(incoming[a])))
                profile[a].append(tuple(tuple(sorted(p)) for p in positional[a]))
        for a in range(n):
            sigs.append(tuple(profile[a]))
        new = _rank(sigs)
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _encode(alg: Algebra, perm: Sequence[int], marks: Sequence[int] | None) -> bytes:
    p = permute(alg, perm)
    ints = [p.size]
    for sym in p.signature.names:
        ints.extend(p.tables[sym])
    if marks is not None:
        relabelled = [0] * alg.size
        for x, m in enumerate(marks):
            relabelled[perm[x]] = m
        ints.extend(relabelled)
    head = repr(tuple(alg.signature.symbols)).encode()
    return head + b"|" + struct.pack(f">{len(ints)}I", *ints)


def canonical_form(alg: Algebra, marks: Sequence[int] | None = None,
                   limits: Limits | None = None) -> CanonicalForm:
    """Minimal table encoding over the leaves of a refine-and-individualize tree.

    Colour refinement is isomorphism invariant and so is the cell chosen for
    individualization, hence two algebras (with their ``marks`` colouring)
    get the same encoding iff they are isomorphic.
    """
    limits = resolve(limits)
    n = alg.size
    ops = [(s, a, alg.tables[s]) for s, a in alg.signature]
    init = []
    for x in range(n):
        key = [marks[x] if marks is not None else 0]
        key.append(tuple(alg.constant(c) == x for c in alg.signature.constants))
        init.append(tuple(key))
    best: list = [None, None]
    nodes = [0]

    def search(colors: list[int]) -> None:
        nodes[0] += 1
        if nodes[0] > limits.max_search_nodes:
            raise ResourceLimitExceeded("canonical form search nodes", limits.max_search_nodes, nodes[0])
        colors = _refine(alg, colors, ops)
        if len(set(colors)) == n:
            enc = _encode(alg, colors, marks)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, tuple(colors)
            return
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        cell = min(c for c, k in counts.items() if k > 1)
        for v in range(n):
            if colors[v] == cell:
                search(_rank([(c, 0 if x == v else 1) for x, c in enumerate(colors)]))

    search(_rank(init))
    return CanonicalForm(best[1], best[0])


def is_isomorphic(a: Algebra, b: Algebra, limits: Limits | None = None) -> bool:
    if a.signature != b.signature or a.size != b.size:
        return False
    return canonical_form(a, limits=limits).encoding == canonical_form(b, limits=limits).encoding


# -- classes up to isomorphism ------------------------------------------


@dataclass
class ClassMember:
    algebra: Algebra
    provenance: str
    encoding: bytes


class AlgebraClass:
    """Finite set of algebras up to isomorphism, ordered by canonical encoding."""

    def __init__(self, members: Iterable[tuple[Algebra, str]] = (), limits: Limits | None = None):
        self._members: dict[bytes, ClassMember] = {}
        self._limits = limits
        for alg, prov in members:
            self.add(alg, prov)

    def add(self, alg: Algebra, provenance: str) -> bool:
        cf = canonical_form(alg, limits=self._limits)
        if cf.encoding in self._members:
            return False
        canon = cf.apply(alg)
        canon.name = alg.name
        self._members[cf.encoding] = ClassMember(canon, provenance, cf.encoding)
        return True

    @property
    def members(self) -> list[ClassMember]:
        return [self._members[k] for k in sorted(self._members)]

    @property
    def algebras(self) -> list[Algebra]:
        return [m.algebra for m in self.members]

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Algebra]:
        return iter(self.algebras)

    def __contains__(self, alg: object) -> bool:
        if not isinstance(alg, Algebra):
            return False
        return canonical_form(alg, limits=self._limits).encoding in self._members

    def filter(self, pred) -> "AlgebraClass":
        out = AlgebraClass(limits=self._limits)
        for m in self.members:
            if pred(m.algebra):
                out._members[m.encoding] = m
        return out

    def __repr__(self) -> str:
        return f"AlgebraClass(sizes={[m.algebra.size for m in self.members]})"


def _label(alg: Algebra, i: int) -> str:
    return alg.name or f"F{i}"


def class_IS(algebras: Sequence[Algebra], limits: Limits | None = None) -> AlgebraClass:
    out = AlgebraClass(limits=limits)
    for i, alg in enumerate(algebras):
        for sub in subuniverses(alg, limits):
            name = alg.name if sub.is_full else None
            out.add(sub.algebra(name=name), f"subalgebra {list(sub.members)} of {_label(alg, i)}")
    return out


def class_HS(algebras: Sequence[Algebra], limits: Limits | None = None) -> AlgebraClass:
    sub = class_IS(algebras, limits)
    out = AlgebraClass(limits=limits)
    for m in sub.members:
        for theta in congruences(m.algebra, limits):
            q, _ = quotient(m.algebra, theta, name=m.algebra.name if theta.is_diagonal else None)
            prov = m.provenance if theta.is_diagonal else f"quotient of ({m.provenance}) by {theta!r}"
            out.add(q, prov)
    return out
