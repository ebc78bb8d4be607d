"""Thread-count policy shared by the heavy loops."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

from .errors import ConfigurationError

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "FRACLAB_THREADS"


def thread_count() -> int:
    """Worker count from ``FRACLAB_THREADS`` (default 1)."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{ENV_VAR} must be an integer >= 1, got {raw!r}") from None
    if value < 1:
        raise ConfigurationError(f"{ENV_VAR} must be an integer >= 1, got {value}")
    return value


def ordered_map(func: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """``[func(i) for i in items]``, spread over threads; result order is fixed.

    Work is split the same way regardless of the thread count, so results
    are bit-identical for any setting.
    """
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
