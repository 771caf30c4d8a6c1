"""Explicit resource limits shared by the enumerations."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


class ResourceLimitExceeded(RuntimeError):
    """Raised when a search is truncated; ``partial`` holds what was reached."""

    def __init__(self, what: str, limit, partial=None):
        super().__init__(f"{what} limit exceeded (limit={limit}, reached={partial})")
        self.what = what
        self.limit = limit
        self.partial = partial


@dataclass
class Limits:
    max_closure_size: int = 200_000
    max_subalgebras: int = 100_000
    max_search_nodes: int = 5_000_000
    time_budget: float | None = None
    _deadline: float | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        for name in ("max_closure_size", "max_subalgebras", "max_search_nodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")

    def start(self) -> "Limits":
        if self.time_budget is not None:
            self._deadline = time.monotonic() + self.time_budget
        return self

    def check_time(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimitExceeded("time", self.time_budget)


DEFAULT_LIMITS = Limits()


def resolve(limits: Limits | None) -> Limits:
    return DEFAULT_LIMITS if limits is None else limits
