import random
from pathlib import Path

import pytest

from epicsub.algebra import Signature
from epicsub.library import random_algebra, standard_algebras

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

SIGS = [
    Signature([("f", 2)]),
    Signature([("f", 1), ("c", 0)]),
    Signature([("f", 2), ("g", 1)]),
    Signature([("m", 3)]),
    Signature([("f", 1), ("g", 1)]),
]


def small_corpus(seed: int = 7, n_random: int = 30):
    """Standard algebras of size <= 4 plus seeded random ones of size <= 3."""
    rng = random.Random(seed)
    out = [a for a in standard_algebras().values() if a.size <= 4]
    for i in range(n_random):
        out.append(random_algebra(rng.choice(SIGS), rng.randint(1, 3), rng, name=f"r{i}"))
    return out


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture(scope="session")
def corpus_files():
    return sorted(CORPUS.glob("*.alg"))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def record():
    """Log one PASS/FAIL line per acceptance criterion; shown in the terminal summary."""
    def _record(number: int, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
