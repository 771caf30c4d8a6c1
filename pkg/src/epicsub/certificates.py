"""Defining-formula certificates for epic substructures.

A Δ-certificate for A ≤ B names every element of B by a variable (inputs
for A, outputs for B∖A) and lists one flat equation per table cell of B.
Its solutions in C are exactly the homomorphisms B -> C, so it defines a
function of its inputs in a class iff A is epic in B relative to that class.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .algebra import Algebra, Signature, Term, Var, parse_term, product, tuples
from .clone import interpolate
from .homs import Constraint, solve
from .limits import Limits
from .structure import Subuniverse, is_closed, subuniverses


class NotAFunction(ValueError):
    pass


@dataclass(frozen=True)
class FlatEquation:
    """``symbol(z_args...) = z_result``"""
    symbol: str
    args: tuple[int, ...]
    result: int


@dataclass(frozen=True)
class DeltaCertificate:
    elements: tuple[int, ...]
    n_inputs: int
    equations: tuple[FlatEquation, ...]

    @property
    def inputs(self) -> tuple[int, ...]:
        return self.elements[:self.n_inputs]

    @property
    def outputs(self) -> tuple[int, ...]:
        return self.elements[self.n_inputs:]

    @property
    def n_vars(self) -> int:
        return len(self.elements)

    def var_name(self, i: int) -> str:
        return f"x{i}" if i < self.n_inputs else f"y{i - self.n_inputs}"


@dataclass(frozen=True)
class PPFormula:
    """∃z̄ ⋀ equations, over variables numbered inputs, then outputs, then z̄."""
    n_inputs: int
    n_outputs: int
    n_exist: int
    equations: tuple[FlatEquation, ...]
    equalities: tuple[tuple[int, int], ...] = ()
    names: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n_vars(self) -> int:
        return self.n_inputs + self.n_outputs + self.n_exist

    def var_name(self, i: int) -> str:
        if i < len(self.names):
            return self.names[i]
        return f"v{i}"

    def __str__(self) -> str:
        parts = [f"{e.symbol}(" + ",".join(self.var_name(a) for a in e.args) + f")={self.var_name(e.result)}"
                 for e in self.equations]
        parts += [f"{self.var_name(a)}={self.var_name(b)}" for a, b in self.equalities]
        ex = [self.var_name(i) for i in range(self.n_inputs + self.n_outputs, self.n_vars)]
        body = " & ".join(parts)
        return (f"exists {','.join(ex)}. " if ex else "") + body


def delta_formula(b: Algebra, a: Subuniverse | Iterable[int]) -> DeltaCertificate:
    """Table equations of B, with A's elements as inputs and B∖A as outputs."""
    members = sorted(set(a.members if isinstance(a, Subuniverse) else a))
    rest = [x for x in b.universe if x not in set(members)]
    elements = tuple(members + rest)
    var = {e: i for i, e in enumerate(elements)}
    eqs = []
    for sym, arity in b.signature:
        for args in tuples(b.size, arity):
            eqs.append(FlatEquation(sym, tuple(var[x] for x in args), var[b.op(sym, *args)]))
    return DeltaCertificate(elements, len(members), tuple(eqs))


def pp_formula(signature: Signature, inputs: Sequence[str], outputs: Sequence[str],
               equations: Sequence[tuple[str, str]]) -> PPFormula:
    """Flatten term equations ``lhs = rhs`` into a pp formula.

    Each compound subterm gets a fresh existential variable.
    """
    names = list(inputs) + list(outputs)
    flat: list[FlatEquation] = []
    equalities: list[tuple[int, int]] = []

    def fresh() -> int:
        names.append(f"z{len(names) - len(inputs) - len(outputs)}")
        return len(names) - 1

    def flatten(t: Term, into: int | None = None) -> int:
        if isinstance(t, Var):
            if into is not None and into != t.index:
                equalities.append((t.index, into))
                return into
            return t.index
        args = tuple(flatten(s) for s in t.args)
        res = fresh() if into is None else into
        flat.append(FlatEquation(t.symbol, args, res))
        return res

    declared = list(inputs) + list(outputs)
    for lhs, rhs in equations:
        l = parse_term(lhs, signature, declared)
        r = parse_term(rhs, signature, declared)
        if isinstance(r, Var):
            flatten(l, r.index)
        elif isinstance(l, Var):
            flatten(r, l.index)
        else:
            flatten(r, flatten(l))
    n_fixed = len(inputs) + len(outputs)
    return PPFormula(len(inputs), len(outputs), len(names) - n_fixed, tuple(flat),
                     tuple(equalities), tuple(names))


def parse_pp(text: str, signature: Signature, inputs: Sequence[str], outputs: Sequence[str]) -> PPFormula:
    """``meet(x,y)=bot & join(x,y)=top`` with declared input/output names."""
    pairs = []
    for part in re.split(r"&", text):
        part = part.strip()
        if not part:
            continue
        if part.count("=") != 1:
            raise ValueError(f"expected one '=' in {part!r}")
        lhs, rhs = part.split("=")
        pairs.append((lhs.strip(), rhs.strip()))
    return pp_formula(signature, inputs, outputs, pairs)


# -- solving -------------------------------------------------------------


Formula = DeltaCertificate | PPFormula


def _io(cert: Formula) -> tuple[int, int]:
    if isinstance(cert, DeltaCertificate):
        return cert.n_inputs, cert.n_vars - cert.n_inputs
    return cert.n_inputs, cert.n_outputs


def solutions(cert: Formula, alg: Algebra, fixed: Mapping[int, int] | None = None,
              limits: Limits | None = None) -> list[tuple[int, ...]]:
    cons = [Constraint(e.symbol, e.args, e.result) for e in cert.equations]
    eqs = cert.equalities if isinstance(cert, PPFormula) else ()
    return solve(cert.n_vars, cons, alg, fixed=fixed, equalities=eqs, limits=limits)


def partial_function(cert: Formula, alg: Algebra, limits: Limits | None = None) -> dict:
    """[cert]^alg as a dict inputs -> outputs; raises NotAFunction."""
    k, m = _io(cert)
    out: dict[tuple[int, ...], tuple[int, ...]] = {}
    for s in solutions(cert, alg, limits=limits):
        x, y = s[:k], s[k:k + m]
        if out.setdefault(x, y) != y:
            raise NotAFunction(f"inputs {x} have outputs {out[x]} and {y}")
    return out


def function_violation(cert: Formula, targets: Iterable[Algebra], limits: Limits | None = None):
    """First (target index, inputs, outputs, other outputs) showing cert is not a function."""
    k, m = _io(cert)
    for i, c in enumerate(targets):
        seen: dict[tuple[int, ...], tuple[int, ...]] = {}
        for s in solutions(cert, c, limits=limits):
            x, y = s[:k], s[k:k + m]
            prev = seen.setdefault(x, y)
            if prev != y:
                return i, x, prev, y
    return None


def defines_function(cert: Formula, targets: Iterable[Algebra], limits: Limits | None = None) -> bool:
    return function_violation(cert, targets, limits) is None


def apply_formula(cert: Formula, alg: Algebra, args: Sequence[int],
                  limits: Limits | None = None) -> tuple[int, ...] | None:
    """The unique outputs at ``args``, or None where the partial function is undefined."""
    k, m = _io(cert)
    if len(args) != k:
        raise ValueError(f"expected {k} arguments, got {len(args)}")
    sols = solutions(cert, alg, fixed=dict(enumerate(args)), limits=limits)
    outs = {s[k:k + m] for s in sols}
    if not outs:
        return None
    if len(outs) > 1:
        raise NotAFunction(f"several outputs {sorted(outs)} at {tuple(args)}")
    return outs.pop()


# -- witness verification ------------------------------------------------


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    reason: str
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_witness(b: Algebra, a: Iterable[int], cert: DeltaCertificate,
                   targets: Iterable[Algebra], limits: Limits | None = None) -> WitnessCheck:
    """Check both halves of a Δ-certificate: it holds in B at the named
    elements, and it defines a function in every target."""
    a = set(a.members if isinstance(a, Subuniverse) else a)
    sig = b.signature
    nv = cert.n_vars
    if not 0 <= cert.n_inputs <= nv:
        return WitnessCheck(False, "malformed", "input count out of range")
    for e in cert.equations:
        if e.symbol not in sig:
            return WitnessCheck(False, "malformed", f"unknown symbol {e.symbol!r}")
        if sig.arity(e.symbol) != len(e.args):
            return WitnessCheck(False, "malformed", f"wrong arity for {e.symbol!r}")
        if any(not 0 <= v < nv for v in e.args + (e.result,)):
            return WitnessCheck(False, "malformed", "variable index out of range")
    if not a or any(not 0 <= x < b.size for x in a) or not is_closed(b, a):
        return WitnessCheck(False, "subuniverse-not-closed")
    if any(not 0 <= x < b.size for x in cert.elements):
        return WitnessCheck(False, "element-out-of-range")
    if len(set(cert.elements)) != nv:
        return WitnessCheck(False, "duplicate-element")
    bad = [x for x in cert.inputs if x not in a]
    if bad:
        return WitnessCheck(False, "input-not-in-subuniverse", f"elements {bad}")
    if set(cert.outputs) != set(b.universe) - a:
        return WitnessCheck(False, "outputs-not-complement")
    el = cert.elements
    for e in cert.equations:
        if b.op(e.symbol, *(el[v] for v in e.args)) != el[e.result]:
            return WitnessCheck(False, "equation-fails",
                                f"{e.symbol}({','.join(cert.var_name(v) for v in e.args)})={cert.var_name(e.result)}")
    targets = list(targets)
    for t in targets:
        b.check_compatible(t)
    v = function_violation(cert, targets, limits)
    if v is not None:
        i, x, y1, y2 = v
        return WitnessCheck(False, "not-a-function", f"target {i}: inputs {x} give {y1} and {y2}")
    return WitnessCheck(True, "ok")


# -- serialization -------------------------------------------------------


def format_certificate(cert: DeltaCertificate) -> str:
    lines = ["delta-certificate"]
    lines.append("inputs " + " ".join(f"{cert.var_name(i)}={e}" for i, e in enumerate(cert.inputs)))
    lines.append("outputs " + " ".join(f"{cert.var_name(i + cert.n_inputs)}={e}"
                                       for i, e in enumerate(cert.outputs)))
    for e in cert.equations:
        lines.append(f"{e.symbol}(" + ",".join(cert.var_name(v) for v in e.args)
                     + f")={cert.var_name(e.result)}")
    return "\n".join(lines) + "\n"


_EQ = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\(([^)]*)\)=([xy]\d+)$")


def parse_certificate(text: str) -> DeltaCertificate:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "delta-certificate":
        raise ValueError("line 1: expected 'delta-certificate'")

    def names(line: str, keyword: str, prefix: str, lineno: int) -> list[int]:
        parts = line.split()
        if not parts or parts[0] != keyword:
            raise ValueError(f"line {lineno}: expected '{keyword}'")
        out = []
        for j, p in enumerate(parts[1:]):
            m = re.fullmatch(rf"{prefix}(\d+)=(\d+)", p)
            if not m or int(m.group(1)) != j:
                raise ValueError(f"line {lineno}: bad binding {p!r}")
            out.append(int(m.group(2)))
        return out

    if len(lines) < 3:
        raise ValueError("certificate truncated")
    ins = names(lines[1], "inputs", "x", 2)
    outs = names(lines[2], "outputs", "y", 3)
    n = len(ins)

    def var(tok: str, lineno: int) -> int:
        m = re.fullmatch(r"([xy])(\d+)", tok.strip())
        if not m:
            raise ValueError(f"line {lineno}: bad variable {tok!r}")
        i = int(m.group(2))
        return i if m.group(1) == "x" else n + i

    eqs = []
    for lineno, line in enumerate(lines[3:], start=4):
        m = _EQ.match(line.replace(" ", ""))
        if not m:
            raise ValueError(f"line {lineno}: bad equation {line!r}")
        args = tuple(var(t, lineno) for t in m.group(2).split(",")) if m.group(2) else ()
        eqs.append(FlatEquation(m.group(1), args, var(m.group(3), lineno)))
    return DeltaCertificate(tuple(ins + outs), n, tuple(eqs))


# -- term interpolation --------------------------------------------------


def find_interpolating_term(algebras: Sequence[Algebra], phi: PPFormula,
                            limits: Limits | None = None) -> Term | None:
    """A term agreeing with [phi] wherever it is defined, on every member."""
    if phi.n_outputs != 1:
        raise ValueError("interpolation needs a single output variable")
    partial = []
    for alg in algebras:
        partial.append({x: y[0] for x, y in partial_function(phi, alg, limits).items()})
    return interpolate(algebras, phi.n_inputs, partial, limits)


def closure_violation(algebras: Sequence[Algebra], phi: PPFormula, limits: Limits | None = None):
    """Look for S ≤ A×B (A, B members) not closed under [phi]^A × [phi]^B.

    Returns (i, j, subuniverse, arguments, value) or None.
    """
    fns = [partial_function(phi, alg, limits) for alg in algebras]
    k = phi.n_inputs
    for (i, a), (j, b) in itertools.product(enumerate(algebras), repeat=2):
        p = product(a, b)
        nb = b.size
        for s in subuniverses(p, limits):
            members = set(s.members)
            for args in itertools.product(s.members, repeat=k):
                ya = fns[i].get(tuple(x // nb for x in args))
                yb = fns[j].get(tuple(x % nb for x in args))
                if ya is None or yb is None:
                    continue
                v = ya[0] * nb + yb[0]
                if v not in members:
                    return i, j, s, args, v
    return None


def mutate(cert: DeltaCertificate, **changes) -> DeltaCertificate:
    return replace(cert, **changes)
