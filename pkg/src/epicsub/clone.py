"""Clone closures: free algebras and searches for terms with prescribed values.

A k-ary term operation of a class is recorded by its values on a chosen
list of k-tuples of each member (the *coordinates*).  Taking every k-tuple
gives the free algebra of the class on k generators; taking only the tuples
an identity constrains gives a much smaller subpower in which a term with
the required behaviour exists iff the target vector is reached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import Algebra, Apply, Term, Var, tuples
from .limits import Limits, ResourceLimitExceeded, resolve


def _common_signature(algebras: Sequence[Algebra]):
    if not algebras:
        raise ValueError("need at least one algebra")
    sig = algebras[0].signature
    for alg in algebras[1:]:
        algebras[0].check_compatible(alg)
    return sig


@dataclass
class Closure:
    algebras: tuple[Algebra, ...]
    arity: int
    coords: tuple[tuple[tuple[int, ...], ...], ...]
    values: np.ndarray
    parents: list
    generators: tuple[int, ...]
    found: int | None = None
    _terms: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.parents)

    def term(self, i: int) -> Term:
        if i in self._terms:
            return self._terms[i]
        kind, data = self.parents[i]
        if kind == "var":
            t: Term = Var(data)
        else:
            t = Apply(kind, tuple(self.term(j) for j in data))
        self._terms[i] = t
        return t

    def element(self, i: int) -> tuple[tuple[int, ...], ...]:
        """Values of element ``i`` split per member."""
        out, start = [], 0
        for c in self.coords:
            out.append(tuple(int(v) for v in self.values[i, start:start + len(c)]))
            start += len(c)
        return tuple(out)


def clone_closure(algebras: Sequence[Algebra], k: int,
                  coords: Sequence[Sequence[tuple[int, ...]]] | None = None,
                  target: Sequence[int] | None = None,
                  limits: Limits | None = None) -> Closure:
    """Close the k projections (restricted to ``coords``) under all operations.

    Elements are numbered by first discovery: generators, then constants,
    then rounds in which every operation is applied (in signature order) to
    all argument tuples involving an element from the previous round.  With
    ``target`` the closure stops as soon as that vector appears.
    """
    algebras = tuple(algebras)
    sig = _common_signature(algebras)
    limits = resolve(limits)
    if k < 0:
        raise ValueError("generator count must be nonnegative")
    if any(alg.size > 256 for alg in algebras):
        raise ValueError("clone closure supports algebras of size at most 256")
    if coords is None:
        coords = [list(tuples(alg.size, k)) for alg in algebras]
    coords = tuple(tuple(tuple(c) for c in block) for block in coords)
    if len(coords) != len(algebras):
        raise ValueError("one coordinate list per algebra required")
    widths = [len(c) for c in coords]
    width = sum(widths)
    # rows are uint8, zero-padded to whole 64-bit words for hashing
    padded = max(8, -(-width // 8) * 8)
    slices = []
    start = 0
    for w in widths:
        slices.append(slice(start, start + w))
        start += w

    def row(values) -> np.ndarray:
        out = np.zeros(padded, dtype=np.uint8)
        out[:width] = values
        return out

    rows: list[np.ndarray] = []
    parents: list = []
    index: dict[bytes, int] = {}
    goal = None if target is None else row(np.asarray(target)).tobytes()
    found: list[int | None] = [None]
    seen = _RowIndex(padded // 8)
    gens: list[int] = []

    def add(vec: np.ndarray, parent) -> int:
        key = vec.tobytes()
        i = index.get(key)
        if i is not None:
            return i
        i = len(parents)
        if i >= limits.max_closure_size:
            raise ResourceLimitExceeded("closure size", limits.max_closure_size, i)
        index[key] = i
        rows.append(vec)
        parents.append(parent)
        seen.pending += 1
        if goal is not None and found[0] is None and key == goal:
            found[0] = i
        return i

    def finish() -> Closure:
        values = (np.stack(rows)[:, :width].astype(np.int64) if rows
                  else np.zeros((0, width), np.int64))
        return Closure(algebras, k, coords, values, parents, tuple(gens), found[0])

    for j in range(k):
        gens.append(add(row([t[j] for block in coords for t in block]), ("var", j)))
    if found[0] is not None:
        return finish()
    for sym in sig.constants:
        add(row([alg.constant(sym) for alg, w in zip(algebras, widths) for _ in range(w)]), (sym, ()))
        if found[0] is not None:
            return finish()

    ops = [(s, a) for s, a in sig if a > 0]
    sizes = [alg.size for alg in algebras]
    done = 0
    while done < len(parents):
        cur = len(parents)
        mat = np.stack(rows[:cur]).astype(np.int64)
        for sym, arity in ops:
            tables = [np.asarray(alg.np_tables[sym], dtype=np.uint8) for alg in algebras]
            heads = itertools.product(range(cur), repeat=arity - 1)
            for lo, group in _head_batches(heads, done, cur):
                limits.check_time()
                g = len(group)
                span = cur - lo
                hmat = np.array(group, dtype=np.int64).reshape(g, arity - 1)
                result = np.zeros((g * span, padded), dtype=np.uint8)
                for b, sl in enumerate(slices):
                    n = sizes[b]
                    idx = np.zeros((g, sl.stop - sl.start), dtype=np.int64)
                    for p in range(arity - 1):
                        idx = idx * n + mat[hmat[:, p], sl]
                    full = idx[:, None, :] * n + mat[None, lo:cur, sl]
                    result[:, sl] = tables[b][full].reshape(g * span, -1)
                seen.sync(rows)
                for r in np.flatnonzero(~seen.contains(result)):
                    if result[r].tobytes() in index:
                        continue
                    add(result[r].copy(), (sym, group[r // span] + (lo + int(r % span),)))
                    if found[0] is not None:
                        return finish()
        done = cur
    return finish()


def _head_batches(heads, done: int, cur: int, batch_rows: int = 1 << 15):
    """Group consecutive argument heads sharing the same tail start."""
    group: list[tuple[int, ...]] = []
    group_lo = None
    for head in heads:
        lo = 0 if any(h >= done for h in head) else done
        if lo >= cur:
            continue
        if group and (lo != group_lo or len(group) * (cur - lo) >= batch_rows):
            yield group_lo, group
            group = []
        group_lo = lo
        group.append(head)
    if group:
        yield group_lo, group


class _RowIndex:
    """Sorted 64-bit row hashes; a hit is confirmed by comparing the stored row."""

    def __init__(self, words: int):
        rng = np.random.default_rng(0x5EED)
        self.weights = rng.integers(1, 2**63, size=words, dtype=np.uint64) | np.uint64(1)
        self.hashes = np.zeros(0, dtype=np.uint64)
        self.order = np.zeros(0, dtype=np.int64)
        self.words = None
        self.pending = 0

    def _hash(self, words: np.ndarray) -> np.ndarray:
        h = words * self.weights
        h ^= h >> np.uint64(29)
        return h.sum(axis=1, dtype=np.uint64)

    def sync(self, rows: list[np.ndarray]) -> None:
        if self.pending < 64:
            return
        self.words = np.stack(rows).view(np.uint64)
        h = self._hash(self.words)
        self.order = np.argsort(h, kind="stable")
        self.hashes = h[self.order]
        self.pending = 0

    def contains(self, batch: np.ndarray) -> np.ndarray:
        out = np.zeros(len(batch), dtype=bool)
        if self.hashes.size == 0:
            return out
        words = batch.view(np.uint64)
        h = self._hash(words)
        pos = np.minimum(np.searchsorted(self.hashes, h), self.hashes.size - 1)
        hit = np.flatnonzero(self.hashes[pos] == h)
        if hit.size:
            same = (self.words[self.order[pos[hit]]] == words[hit]).all(axis=1)
            out[hit[same]] = True
        return out


@dataclass
class FreeAlgebra:
    algebra: Algebra
    generators: tuple[int, ...]
    closure: Closure

    def term(self, i: int) -> Term:
        return self.closure.term(i)

    def __len__(self) -> int:
        return self.algebra.size


def free_algebra(algebras: Sequence[Algebra], k: int, limits: Limits | None = None) -> FreeAlgebra:
    """The k-generated free algebra of the variety generated by ``algebras``.

    Realized as the subalgebra of the product of the ``C^(C^k)`` generated by
    the projections; element ``i`` is the term operation ``closure.term(i)``.
    """
    sig = _common_signature(list(algebras))
    clo = clone_closure(algebras, k, limits=limits)
    m = len(clo)
    if m == 0:
        raise ValueError("free algebra on 0 generators without constants is empty")
    index = {clo.values[i].tobytes(): i for i in range(m)}
    tables = {}
    for sym, arity in sig:
        table = []
        for args in tuples(m, arity):
            vec = _apply(clo, sym, args)
            table.append(index[vec.tobytes()])
        tables[sym] = table
    alg = Algebra(sig, m, tables, name=f"F({k})")
    return FreeAlgebra(alg, clo.generators, clo)


def _apply(clo: Closure, sym: str, args: Sequence[int]) -> np.ndarray:
    out = []
    start = 0
    for alg, c in zip(clo.algebras, clo.coords):
        sl = slice(start, start + len(c))
        idx = np.zeros(len(c), dtype=np.int64)
        for a in args:
            idx = idx * alg.size + clo.values[a, sl]
        out.append(alg.np_tables[sym][idx])
        start += len(c)
    return np.concatenate(out) if out else np.zeros(0, np.int64)


def interpolate(algebras: Sequence[Algebra], k: int,
                partial: Sequence[Mapping[tuple[int, ...], int]],
                limits: Limits | None = None) -> Term | None:
    """A k-ary term taking the prescribed value at every listed tuple, or None."""
    coords = [sorted(p) for p in partial]
    target = [p[t] for p, block in zip(partial, coords) for t in block]
    clo = clone_closure(algebras, k, coords=coords, target=target, limits=limits)
    if clo.found is None:
        return None
    return clo.term(clo.found)


def nu_requirements(alg: Algebra, n: int) -> dict[tuple[int, ...], int]:
    req: dict[tuple[int, ...], int] = {}
    for x in alg.universe:
        req[(x,) * n] = x
        for y in alg.universe:
            if y == x:
                continue
            for i in range(n):
                req[(x,) * i + (y,) + (x,) * (n - i - 1)] = x
    return req


def pixley_requirements(alg: Algebra) -> dict[tuple[int, ...], int]:
    req: dict[tuple[int, ...], int] = {}
    for x in alg.universe:
        for y in alg.universe:
            req[(x, y, y)] = x
            req[(x, y, x)] = x
            req[(y, y, x)] = x
    return req


def find_nu_term(algebras: Sequence[Algebra], n: int = 3, limits: Limits | None = None) -> Term | None:
    if n < 3:
        raise ValueError("near-unanimity terms need arity at least 3")
    return interpolate(algebras, n, [nu_requirements(a, n) for a in algebras], limits)


def find_majority_term(algebras: Sequence[Algebra], limits: Limits | None = None) -> Term | None:
    return find_nu_term(algebras, 3, limits)


def find_pixley_term(algebras: Sequence[Algebra], limits: Limits | None = None) -> Term | None:
    return interpolate(algebras, 3, [pixley_requirements(a) for a in algebras], limits)
