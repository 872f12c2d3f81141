"""Caps and runtime settings.

All size caps live here so that every module refuses oversized input the
same way, and so the CLI can report them.
"""

from __future__ import annotations

import logging
import os
import typing as t
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from matchfair.errors import ConfigError

logger = logging.getLogger(__name__)

MAX_VARIABLES: t.Final = 20
"""Largest ``num_vars`` accepted by vertex enumeration without override."""

MAX_ROWS: t.Final = 60
"""Largest row count accepted by vertex enumeration without override."""

MAX_ODD_SET_VERTICES: t.Final = 10
"""Largest vertex count for which odd-set rows are enumerated."""

MAX_EXISTENCE_SIDE: t.Final = 4
"""Largest two-sided ``n`` accepted by the existence decision."""

MAX_EXISTENCE_VERTICES: t.Final = 6
"""Largest non-bipartite ``m`` accepted by the existence decision."""

MAX_GRID_SIDE: t.Final = 3
MAX_GRID_DENOMINATOR: t.Final = 6

PRUNE_THRESHOLD: t.Final = 20_000
"""Number of candidate tight sets above which vertex enumeration prunes
empty faces with a feasibility LP before descending."""

CACHE_SIZE: t.Final = 64
"""Instances whose constraint systems are kept, per cached builder."""

THREADS_ENV: t.Final = "MATCHFAIR_THREADS"


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment.

    Examples
    --------
    >>> Settings.from_env({}).workers
    1
    >>> Settings.from_env({"MATCHFAIR_THREADS": "4"}).workers
    4
    >>> Settings.from_env({"MATCHFAIR_THREADS": "zero"})
    Traceback (most recent call last):
    ...
    matchfair.errors.ConfigError: MATCHFAIR_THREADS must be a positive integer, not 'zero'
    """

    workers: int = 1

    @classmethod
    def from_env(cls, environ: t.Mapping[str, str] | None = None) -> t.Self:
        env = os.environ if environ is None else environ

        if (raw := env.get(THREADS_ENV)) is None:
            return cls()

        if not raw.isdigit() or int(raw) < 1:
            msg = f"{THREADS_ENV} must be a positive integer, not {raw!r}"
            raise ConfigError(msg)

        return cls(workers=int(raw))


def parallel_map[T, R](
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: int | None = None,
) -> list[R]:
    """Map ``fn`` over ``items``, preserving input order.

    With a single worker (the default unless ``MATCHFAIR_THREADS`` says
    otherwise) this is a plain ``map``.  Otherwise a thread pool is used;
    results still come back in input order, so callers merge
    deterministically regardless of completion order.  If the caller is
    interrupted while waiting (a ``DeadlineExceeded`` from the CLI's
    alarm, say), queued calls are cancelled and the pool is not joined.

    Examples
    --------
    >>> parallel_map(lambda k: k * k, range(5), workers=1)
    [0, 1, 4, 9, 16]
    >>> parallel_map(lambda k: k * k, range(5), workers=3)
    [0, 1, 4, 9, 16]
    """
    n = Settings.from_env().workers if workers is None else workers

    if n <= 1:
        return list(map(fn, items))

    from concurrent.futures import ThreadPoolExecutor

    logger.debug("mapping with %d worker threads", n)

    pool = ThreadPoolExecutor(max_workers=n)

    try:
        futures = [pool.submit(fn, item) for item in items]
        results = [future.result() for future in futures]
    except BaseException:
        pool.shutdown(wait=False, cancel_futures=True)
        raise

    pool.shutdown()

    return results
