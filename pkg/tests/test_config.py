import threading

import pytest

from matchfair.config import Settings, parallel_map
from matchfair.errors import ConfigError


def test_parallel_map_keeps_input_order() -> None:
    assert parallel_map(str, range(12), workers=4) == [str(k) for k in range(12)]


def test_failure_cancels_queued_calls() -> None:
    started: list[int] = []
    release = threading.Event()

    def work(k: int) -> int:
        if k == 0:
            raise ValueError("boom")

        started.append(k)
        release.wait(5)

        return k

    try:
        with pytest.raises(ValueError, match="boom"):
            parallel_map(work, range(10), workers=2)
    finally:
        release.set()

    assert len(started) <= 2


@pytest.mark.parametrize("raw", ["0", "-1", "two", ""])
def test_thread_count_must_be_positive(raw: str) -> None:
    with pytest.raises(ConfigError, match="MATCHFAIR_THREADS"):
        Settings.from_env({"MATCHFAIR_THREADS": raw})
