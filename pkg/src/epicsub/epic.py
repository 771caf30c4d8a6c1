"""Epic substructure tests and the surjective-epimorphism decision procedures."""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .algebra import Algebra, product
from .certificates import DeltaCertificate, delta_formula, format_certificate, verify_witness
from .clone import find_nu_term, find_pixley_term
from .homs import homs_grouped_by_restriction
from .limits import Limits, ResourceLimitExceeded
from .quasivariety import q_rsi_class
from .structure import (AlgebraClass, ClassMember, Subuniverse, canonical_form, class_HS, class_IS,
                        congruences, is_fsi, is_si, maximal_proper_subuniverses, subuniverses)

MODES = ("quasivariety", "variety", "arithmetical")
S_CLASSES = ("qrsi", "is")


@dataclass
class EpicQuery:
    b: Algebra
    a: Subuniverse
    targets: Sequence[Algebra]

    def __post_init__(self):
        if self.a.parent is not self.b and self.a.parent != self.b:
            raise ValueError("subuniverse does not belong to B")


@dataclass
class Counterexample:
    target: int
    g: tuple[int, ...]
    g2: tuple[int, ...]
    element: int


@dataclass
class EpicResult:
    epic: bool
    counterexample: Counterexample | None
    hom_calls: int

    def __bool__(self) -> bool:
        return self.epic


def is_epic(b: Algebra, a: Iterable[int] | Subuniverse, targets: Sequence[Algebra],
            limits: Limits | None = None) -> EpicResult:
    """A is epic in B relative to ``targets``: homs B -> C agreeing on A agree everywhere."""
    members = a.members if isinstance(a, Subuniverse) else tuple(sorted(set(a)))
    calls = 0
    for i, c in enumerate(targets):
        b.check_compatible(c)
        calls += 1
        groups = homs_grouped_by_restriction(b, c, members, limits)
        if groups.split is not None:
            g, g2, x = groups.split
            return EpicResult(False, Counterexample(i, g, g2, x), calls)
    return EpicResult(True, None, calls)


def check_query(q: EpicQuery, limits: Limits | None = None) -> EpicResult:
    return is_epic(q.b, q.a, q.targets, limits)


# -- scanning for proper epic pairs -------------------------------------


@dataclass
class Candidate:
    b: Algebra
    a: Subuniverse
    provenance: str
    products_built: int
    subalgebras_scanned: int


@dataclass
class EpicWitness:
    b: Algebra
    a: Subuniverse
    provenance: str
    certificate: DeltaCertificate


@dataclass
class ScanStats:
    products_built: int = 0
    subalgebras_scanned: int = 0
    pairs_checked: int = 0
    hom_calls: int = 0

    def as_dict(self) -> dict:
        return dict(products_built=self.products_built, subalgebras_scanned=self.subalgebras_scanned,
                    pairs_checked=self.pairs_checked, hom_calls=self.hom_calls)


def _candidates_from(bs: Iterator[tuple[Algebra, str, int]], limits: Limits | None,
                    progress: ScanStats) -> Iterator[Candidate]:
    """Maximal proper subuniverses of each new B, deduplicated up to marked isomorphism."""
    seen_b: set[bytes] = set()
    seen_pair: set[bytes] = set()
    for balg, prov, built in bs:
        progress.products_built = built
        enc = canonical_form(balg, limits=limits).encoding
        if enc in seen_b:
            continue
        seen_b.add(enc)
        progress.subalgebras_scanned = len(seen_b)
        for sub in maximal_proper_subuniverses(balg, limits):
            marks = [1 if x in sub else 0 for x in balg.universe]
            key = canonical_form(balg, marks=marks, limits=limits).encoding
            if key in seen_pair:
                continue
            seen_pair.add(key)
            yield Candidate(balg, sub, prov, built, len(seen_b))


def _product_subalgebras(members: Sequence[Algebra], fold: int, limits: Limits | None):
    built = 0
    for combo in itertools.combinations_with_replacement(range(len(members)), fold):
        p = reduce(product, [members[i] for i in combo])
        built += 1
        for sub in subuniverses(p, limits):
            yield sub.algebra(), f"subalgebra {list(sub.members)} of S[{']xS['.join(map(str, combo))}]", built


def _class_subalgebras(members: Sequence[Algebra]):
    for i, m in enumerate(members):
        yield m, f"S[{i}]", 0


def _scan(cands: Iterator[Candidate], targets: Sequence[Algebra], limits: Limits | None,
          threads: int, stats: ScanStats) -> EpicWitness | None:
    threads = max(1, threads)
    chunk = 1 if threads == 1 else threads * 2
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while True:
            batch = list(itertools.islice(cands, chunk))
            if not batch:
                break
            if pool is None:
                results = [is_epic(c.b, c.a, targets, limits) for c in batch]
            else:
                results = list(pool.map(lambda c: is_epic(c.b, c.a, targets, limits), batch))
            for cand, res in zip(batch, results):
                stats.pairs_checked += 1
                stats.hom_calls += res.hom_calls
                if res.epic:
                    stats.products_built = cand.products_built
                    stats.subalgebras_scanned = cand.subalgebras_scanned
                    return EpicWitness(cand.b, cand.a, cand.provenance, delta_formula(cand.b, cand.a))
    finally:
        if pool is not None:
            pool.shutdown()
    return None


def find_proper_epic(s: AlgebraClass | Sequence[Algebra], fold: int = 2, limits: Limits | None = None,
                     threads: int = 1, stats: ScanStats | None = None) -> EpicWitness | None:
    """First (B, A) with B in S(fold-fold products of S), A a maximal proper
    subuniverse epic in B relative to S; None after an exhaustive scan."""
    if fold < 2:
        raise ValueError("fold must be at least 2")
    members = s.algebras if isinstance(s, AlgebraClass) else list(s)
    stats = ScanStats() if stats is None else stats
    if not members:
        return None
    progress = ScanStats()
    cands = _candidates_from(_product_subalgebras(members, fold, limits), limits, progress)
    witness = _scan(cands, members, limits, threads, stats)
    if witness is None:
        stats.products_built = progress.products_built
        stats.subalgebras_scanned = progress.subalgebras_scanned
    return witness


def find_proper_epic_within(s: AlgebraClass | Sequence[Algebra], limits: Limits | None = None,
                            threads: int = 1, stats: ScanStats | None = None) -> EpicWitness | None:
    """Same scan with B ranging over the members of S themselves (targets S)."""
    members = s.algebras if isinstance(s, AlgebraClass) else list(s)
    stats = ScanStats() if stats is None else stats
    progress = ScanStats()
    cands = _candidates_from(_class_subalgebras(members), limits, progress)
    witness = _scan(cands, members, limits, threads, stats)
    if witness is None:
        stats.subalgebras_scanned = progress.subalgebras_scanned
    return witness


# -- decision ------------------------------------------------------------


@dataclass
class RunConfig:
    mode: str = "quasivariety"
    nu_arity: int = 3
    fold: int | None = None
    s_class: str = "qrsi"
    limits: Limits = field(default_factory=Limits)
    threads: int = 1
    cache_dir: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.s_class not in S_CLASSES:
            raise ValueError(f"s_class must be one of {S_CLASSES}")
        if self.nu_arity < 3:
            raise ValueError("nu_arity must be at least 3")
        if self.fold is not None and self.fold < 2:
            raise ValueError("fold must be at least 2")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    @property
    def effective_fold(self) -> int:
        return self.fold if self.fold is not None else self.nu_arity - 1


@dataclass
class DecisionReport:
    mode: str
    verdict: str
    term: str | None = None
    term_kind: str | None = None
    s_class: list[ClassMember] = field(default_factory=list)
    s_choice: str | None = None
    fold: int | None = None
    witness: EpicWitness | None = None
    witness_verified: bool | None = None
    statistics: dict = field(default_factory=dict)
    limits_hit: list[str] = field(default_factory=list)
    reason: str | None = None
    conditional: str | None = None

    @property
    def exit_code(self) -> int:
        return {"surjective": 0, "not-surjective": 1, "inapplicable": 2}.get(self.verdict, 3)


def _tables_json(alg: Algebra) -> dict:
    return {"size": alg.size, "signature": [[s, a] for s, a in alg.signature],
            "tables": {s: list(alg.tables[s]) for s in alg.signature.names}, "name": alg.name}


def _from_json(d: dict) -> Algebra:
    return Algebra([tuple(x) for x in d["signature"]], d["size"], d["tables"], name=d.get("name"))


def _cache_key(algebras: Sequence[Algebra], config: RunConfig) -> str:
    blob = json.dumps({"f": [_tables_json(a) for a in algebras], "mode": config.mode,
                       "n": config.nu_arity, "s": config.s_class}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _build_class(algebras: Sequence[Algebra], config: RunConfig):
    """The hypothesis term and the class S for the configured mode."""
    limits = config.limits
    if config.mode == "arithmetical":
        t = find_pixley_term(algebras, limits)
        kind = "pixley"
    else:
        t = find_nu_term(algebras, config.nu_arity, limits)
        kind = f"near-unanimity/{config.nu_arity}"
    if t is None:
        return kind, None, None, None
    reason = None
    if config.mode == "quasivariety":
        s = q_rsi_class(algebras, limits) if config.s_class == "qrsi" else class_IS(algebras, limits)
    elif config.mode == "variety":
        s = class_HS(algebras, limits).filter(lambda a: is_si(a, congruences(a, limits)))
    else:
        s = class_HS(algebras, limits).filter(lambda a: is_fsi(a, congruences(a, limits)))
        for m in s.members:
            for sub in subuniverses(m.algebra, limits):
                if len(sub) >= 2 and not is_fsi(sub.algebra(), congruences(sub.algebra(), limits)):
                    reason = (f"FSI class not closed under subalgebras: subuniverse "
                              f"{list(sub.members)} of ({m.provenance}) is not FSI")
                    break
            if reason:
                break
    return kind, str(t), s, reason


def _load_or_build(algebras: Sequence[Algebra], config: RunConfig):
    if not config.cache_dir:
        return _build_class(algebras, config)
    path = Path(config.cache_dir) / f"{_cache_key(algebras, config)}.json"
    if path.exists():
        d = json.loads(path.read_text())
        s = None
        if d["s"] is not None:
            s = AlgebraClass()
            for m in d["s"]:
                s._members[bytes.fromhex(m["encoding"])] = ClassMember(
                    _from_json(m["algebra"]), m["provenance"], bytes.fromhex(m["encoding"]))
        return d["kind"], d["term"], s, d["reason"]
    kind, term, s, reason = _build_class(algebras, config)
    os.makedirs(config.cache_dir, exist_ok=True)
    payload = {"kind": kind, "term": term, "reason": reason,
               "s": None if s is None else [{"algebra": _tables_json(m.algebra), "provenance": m.provenance,
                                             "encoding": m.encoding.hex()} for m in s.members]}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True))
    tmp.replace(path)
    return kind, term, s, reason


def decide_surjective_epis(algebras: Sequence[Algebra], config: RunConfig | None = None,
                           **overrides) -> DecisionReport:
    """Decide whether the (quasi)variety generated by ``algebras`` has surjective epimorphisms."""
    if config is None:
        config = RunConfig(**overrides)
    elif overrides:
        raise TypeError("pass either a RunConfig or keyword overrides")
    algebras = list(algebras)
    if not algebras:
        raise ValueError("need at least one generating algebra")
    for a in algebras[1:]:
        algebras[0].check_compatible(a)
    config.limits.start()
    report = DecisionReport(config.mode, "unknown")
    stats = ScanStats()
    try:
        kind, term, s, reason = _load_or_build(algebras, config)
        report.term_kind = kind
        report.term = term
        if term is None:
            report.verdict = "inapplicable"
            report.reason = f"no {kind} term in the clone of the generators"
            return report
        if reason is not None:
            report.verdict = "inapplicable"
            report.reason = reason
            return report
        report.s_class = s.members
        if config.mode == "arithmetical":
            report.s_choice = "fsi"
            report.conditional = "conditional on FSI-universality surrogate (subalgebras of FSI members of HS(F) are FSI)"
            witness = find_proper_epic_within(s, config.limits, config.threads, stats)
        else:
            report.s_choice = config.s_class if config.mode == "quasivariety" else "si"
            report.fold = config.effective_fold
            witness = find_proper_epic(s, report.fold, config.limits, config.threads, stats)
    except ResourceLimitExceeded as exc:
        report.verdict = "unknown"
        report.limits_hit.append(str(exc))
        report.statistics = stats.as_dict()
        return report
    report.statistics = stats.as_dict()
    if witness is None:
        report.verdict = "surjective"
    else:
        report.verdict = "not-surjective"
        report.witness = witness
        check = verify_witness(witness.b, witness.a, witness.certificate, s.algebras, config.limits)
        report.witness_verified = check.ok
        if not check.ok:
            raise AssertionError(f"witness failed verification: {check.reason} {check.detail}")
    return report


def report_dict(report: DecisionReport, emit_algebra) -> dict:
    """Machine-readable report; ``emit_algebra`` renders an algebra document."""
    d = {
        "mode": report.mode,
        "verdict": report.verdict,
        "exit_code": report.exit_code,
        "term": report.term,
        "term_kind": report.term_kind,
        "s_choice": report.s_choice,
        "fold": report.fold,
        "s_class": [{"provenance": m.provenance, "algebra": emit_algebra(m.algebra)} for m in report.s_class],
        "statistics": report.statistics,
        "limits_hit": report.limits_hit,
        "reason": report.reason,
        "conditional": report.conditional,
        "witness": None,
    }
    if report.witness is not None:
        w = report.witness
        d["witness"] = {
            "provenance": w.provenance,
            "b": emit_algebra(w.b),
            "a": list(w.a.members),
            "certificate": format_certificate(w.certificate),
            "verified": report.witness_verified,
        }
    return d
