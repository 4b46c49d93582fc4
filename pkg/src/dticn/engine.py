"""Deterministic discrete-event engine.

Events pop in (time, sequence) order; the sequence counter breaks ties in
scheduling order, which makes every run a pure function of its inputs.
Callbacks may only schedule at or after the current time.
"""

from __future__ import annotations

import heapq
from typing import Any, Callable

_EPS = 1e-9


class Engine:
    def __init__(self, start: float = 0.0) -> None:
        self.now = start
        self._seq = 0
        self._heap: list[tuple[float, int, Callable[..., None], tuple[Any, ...]]] = []

    def schedule(self, time: float, fn: Callable[..., None], *args: Any) -> None:
        if time < self.now - _EPS:
            raise ValueError(f"cannot schedule into the past: {time} < {self.now}")
        self._seq += 1
        heapq.heappush(self._heap, (time, self._seq, fn, args))

    def schedule_in(self, delay: float, fn: Callable[..., None], *args: Any) -> None:
        self.schedule(self.now + delay, fn, *args)

    def run(self, until: float | None = None) -> None:
        """Process events in order until the queue drains or ``until`` passes."""
        while self._heap:
            time, _, fn, args = self._heap[0]
            if until is not None and time > until:
                break
            heapq.heappop(self._heap)
            self.now = max(self.now, time)
            fn(*args)

    def pending(self) -> int:
        return len(self._heap)
