"""Signatures, finite algebras given by operation tables, and terms."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __init__(self, symbols: Iterable[tuple[str, int]]):
        symbols = tuple((str(name), int(arity)) for name, arity in symbols)
        seen = set()
        for name, arity in symbols:
            if not _NAME.match(name):
                raise SignatureError(f"invalid symbol name {name!r}")
            if name in seen:
                raise SignatureError(f"duplicate symbol {name!r}")
            if arity < 0:
                raise SignatureError(f"negative arity for {name!r}")
            seen.add(name)
        object.__setattr__(self, "symbols", symbols)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, name: object) -> bool:
        return any(name == s for s, _ in self.symbols)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.symbols)

    def arity(self, name: str) -> int:
        for s, a in self.symbols:
            if s == name:
                return a
        raise SignatureError(f"unknown symbol {name!r}")

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(s for s, a in self.symbols if a == 0)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{s}/{a}" for s, a in self.symbols) + ")"


class Algebra:
    """A finite algebra on the universe ``0..size-1``.

    ``tables[name]`` is the row-major table of the operation: the value at
    ``(a1, ..., ak)`` sits at index ``a1*n^(k-1) + ... + ak``.
    """

    def __init__(self, signature: Signature | Iterable[tuple[str, int]], size: int,
                 tables: Mapping[str, Sequence[int]], name: str | None = None):
        if not isinstance(signature, Signature):
            signature = Signature(signature)
        if size < 1:
            raise ValueError("algebra size must be positive")
        extra = set(tables) - set(signature.names)
        if extra:
            raise SignatureError(f"tables for unknown symbols {sorted(extra)}")
        fixed = {}
        for sym, arity in signature:
            if sym not in tables:
                raise SignatureError(f"missing table for {sym!r}")
            table = tuple(int(v) for v in tables[sym])
            if len(table) != size ** arity:
                raise ValueError(
                    f"table for {sym!r} has length {len(table)}, expected {size ** arity}")
            for v in table:
                if not 0 <= v < size:
                    raise ValueError(f"table entry {v} for {sym!r} out of range 0..{size - 1}")
            fixed[sym] = table
        self.signature = signature
        self.size = size
        self.tables = fixed
        self.name = name

    def op(self, sym: str, *args: int) -> int:
        idx = 0
        n = self.size
        for a in args:
            idx = idx * n + a
        return self.tables[sym][idx]

    def constant(self, sym: str) -> int:
        return self.tables[sym][0]

    @property
    def universe(self) -> range:
        return range(self.size)

    @cached_property
    def np_tables(self) -> dict[str, np.ndarray]:
        return {s: np.asarray(t, dtype=np.int64) for s, t in self.tables.items()}

    def _key(self):
        return (self.signature, self.size, tuple(self.tables[s] for s in self.signature.names))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Algebra) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Algebra{label} size={self.size} signature={self.signature}>"

    def same_signature(self, other: "Algebra") -> bool:
        return self.signature == other.signature

    def check_compatible(self, other: "Algebra") -> None:
        if self.signature != other.signature:
            raise SignatureError(
                f"signature mismatch: {self.signature} vs {other.signature}")


def tuples(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples over 0..n-1 in row-major order."""
    return itertools.product(range(n), repeat=k)


def product(a: Algebra, b: Algebra, name: str | None = None) -> Algebra:
    """Direct product; the pair (i, j) is coded as ``i*|b| + j``."""
    a.check_compatible(b)
    nb = b.size
    size = a.size * nb
    tables = {}
    for sym, arity in a.signature:
        ta, tb = a.tables[sym], b.tables[sym]
        table = []
        for args in tuples(size, arity):
            ia = ib = 0
            for x in args:
                ia = ia * a.size + x // nb
                ib = ib * nb + x % nb
            table.append(ta[ia] * nb + tb[ib])
        tables[sym] = table
    if name is None and a.name and b.name:
        name = f"{a.name}x{b.name}"
    return Algebra(a.signature, size, tables, name=name)


def power(a: Algebra, k: int) -> Algebra:
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    if k == 0:
        return Algebra(a.signature, 1, {s: [0] for s in a.signature.names})
    result = a
    for _ in range(k - 1):
        result = product(result, a)
    return result


def permute(alg: Algebra, perm: Sequence[int]) -> Algebra:
    """Relabel element ``x`` as ``perm[x]``."""
    n = alg.size
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of the universe")
    inv = [0] * n
    for x, y in enumerate(perm):
        inv[y] = x
    tables = {}
    for sym, arity in alg.signature:
        t = alg.tables[sym]
        new = []
        for args in tuples(n, arity):
            idx = 0
            for y in args:
                idx = idx * n + inv[y]
            new.append(perm[t[idx]])
        tables[sym] = new
    return Algebra(alg.signature, n, tables, name=alg.name)


def induced(alg: Algebra, members: Sequence[int], name: str | None = None) -> Algebra:
    """The subalgebra on a closed subset, relabelled by position in ``members``."""
    pos = {m: i for i, m in enumerate(members)}
    tables = {}
    for sym, arity in alg.signature:
        table = []
        for args in itertools.product(members, repeat=arity):
            v = alg.op(sym, *args)
            if v not in pos:
                raise ValueError(f"subset not closed under {sym!r}")
            table.append(pos[v])
        tables[sym] = table
    return Algebra(alg.signature, len(members), tables, name=name)


# -- terms ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}(" + ",".join(str(a) for a in self.args) + ")"


Term = Var | Apply


def term_variables(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for s in t.args:
        out |= term_variables(s)
    return out


def check_term(t: Term, signature: Signature, nvars: int) -> None:
    if isinstance(t, Var):
        if not 0 <= t.index < nvars:
            raise ValueError(f"variable x{t.index} outside 0..{nvars - 1}")
        return
    if signature.arity(t.symbol) != len(t.args):
        raise SignatureError(
            f"{t.symbol!r} applied to {len(t.args)} arguments, arity is {signature.arity(t.symbol)}")
    for s in t.args:
        check_term(s, signature, nvars)


def parse_term(text: str, signature: Signature, variables: Sequence[str] | None = None) -> Term:
    """Parse ``join(meet(x,y),z)``-style terms.

    Bare identifiers are constants when they are 0-ary symbols, otherwise
    variables: ``x0, x1, ...`` by default, or positions in ``variables``.
    """
    tokens = re.findall(r"[A-Za-z_][A-Za-z0-9_]*|[(),]|\S", text)
    pos = 0

    def var_index(name: str) -> int | None:
        if variables is not None:
            return list(variables).index(name) if name in variables else None
        m = re.fullmatch(r"x(\d+)", name)
        return int(m.group(1)) if m else None

    def parse() -> Term:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError(f"unexpected end of term in {text!r}")
        tok = tokens[pos]
        pos += 1
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            args = []
            if tokens[pos] == ")":
                pos += 1
            else:
                while True:
                    args.append(parse())
                    if tokens[pos] == ",":
                        pos += 1
                        continue
                    if tokens[pos] == ")":
                        pos += 1
                        break
                    raise ValueError(f"unexpected {tokens[pos]!r} in {text!r}")
            return Apply(tok, tuple(args))
        idx = var_index(tok)
        if idx is not None and not (tok in signature and signature.arity(tok) == 0):
            return Var(idx)
        if tok in signature and signature.arity(tok) == 0:
            return Apply(tok, ())
        raise ValueError(f"unknown identifier {tok!r} in {text!r}")

    t = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing input in term {text!r}")
    check_term(t, signature, max(term_variables(t), default=-1) + 1)
    return t


def evaluate(alg: Algebra, t: Term, args: Sequence[int]) -> int:
    for a in args:
        if not 0 <= a < alg.size:
            raise ValueError(f"element {a} out of range for algebra of size {alg.size}")
    nvars = max(term_variables(t), default=-1) + 1
    if nvars > len(args):
        raise ValueError(f"term uses {nvars} variables, got {len(args)} arguments")
    return _eval(alg, t, args)


def _eval(alg: Algebra, t: Term, args: Sequence[int]) -> int:
    if isinstance(t, Var):
        return args[t.index]
    return alg.op(t.symbol, *(_eval(alg, s, args) for s in t.args))


def term_operation(alg: Algebra, t: Term, nvars: int) -> tuple[int, ...]:
    """Row-major table of the ``nvars``-ary term operation."""
    check_term(t, alg.signature, nvars)
    return tuple(_eval(alg, t, args) for args in tuples(alg.size, nvars))


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    nvars: int

    def __post_init__(self):
        for side in (self.lhs, self.rhs):
            if term_variables(side) and max(term_variables(side)) >= self.nvars:
                raise ValueError("identity uses undeclared variables")

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


def holds(alg: Algebra, identity: Identity) -> bool:
    check_term(identity.lhs, alg.signature, identity.nvars)
    check_term(identity.rhs, alg.signature, identity.nvars)
    return all(_eval(alg, identity.lhs, args) == _eval(alg, identity.rhs, args)
               for args in tuples(alg.size, identity.nvars))


def nu_identities(t: Term, n: int) -> list[Identity]:
    """t(x,..,x,y,x,..,x) = x for each position of y; x is x0, y is x1."""
    x, y = Var(0), Var(1)
    out = []
    for i in range(n):
        args = tuple(y if j == i else x for j in range(n))
        out.append(Identity(substitute(t, args), x, 2))
    return out


def pixley_identities(t: Term) -> list[Identity]:
    x, y = Var(0), Var(1)
    return [Identity(substitute(t, (x, y, y)), x, 2),
            Identity(substitute(t, (x, y, x)), x, 2),
            Identity(substitute(t, (y, y, x)), x, 2)]


def substitute(t: Term, values: Sequence[Term]) -> Term:
    if isinstance(t, Var):
        return values[t.index]
    return Apply(t.symbol, tuple(substitute(s, values) for s in t.args))


def is_nu_term(algebras: Sequence[Algebra], t: Term, n: int) -> bool:
    if n < 3:
        raise ValueError("near-unanimity terms need arity at least 3")
    for alg in algebras:
        check_term(t, alg.signature, n)
    return all(holds(alg, ident) for alg in algebras for ident in nu_identities(t, n))


def is_pixley_term(algebras: Sequence[Algebra], t: Term) -> bool:
    for alg in algebras:
        check_term(t, alg.signature, 3)
    return all(holds(alg, ident) for alg in algebras for ident in pixley_identities(t))
