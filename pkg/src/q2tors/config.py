"""Effort budgets and seeds.

Limits live in a context variable so that a CLI run (or a test) can tighten
them without threading parameters through every call.
"""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses


@dataclasses.dataclass(frozen=True)
class Limits:
    trial_bound: int = 10**6
    rho_iterations: int = 200_000
    candidate_cap: int = 2**12
    subset_cap: int = 2_000_000
    seed: int = 20240601


_limits: contextvars.ContextVar[Limits] = contextvars.ContextVar("q2tors_limits", default=Limits())


def limits() -> Limits:
    return _limits.get()


@contextlib.contextmanager
def using(**changes):
    """Temporarily override fields of the active Limits."""
    token = _limits.set(dataclasses.replace(_limits.get(), **changes))
    try:
        yield _limits.get()
    finally:
        _limits.reset(token)
