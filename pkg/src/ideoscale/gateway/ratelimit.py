from __future__ import annotations

import threading
import time
from collections import deque
from typing import Callable


class RateLimiter:
    """Sliding-window limiter shared by all workers.

    Admits at most ``limit`` acquisitions in any ``window`` seconds. A plain
    token bucket with capacity ``limit`` can admit up to twice that inside one
    window, so the admission log is kept explicitly.
    """

    def __init__(self, limit: int, window: float = 60.0,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if limit < 1:
            raise ValueError("limit must be >= 1")
        self.limit = limit
        self.window = window
        self._clock = clock
        self._sleep = sleep
        self._admitted: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._admitted and now - self._admitted[0] >= self.window:
                    self._admitted.popleft()
                if len(self._admitted) < self.limit:
                    self._admitted.append(now)
                    return
                wait = self._admitted[0] + self.window - now
            # A floor keeps float rounding from spinning on a zero wait.
            self._sleep(max(wait, 1e-6))
