"""Process-wide request limiter: bounded in-flight calls plus a sliding
requests-per-minute window. Shared by chat, embedding, and search traffic."""

from __future__ import annotations

import threading
import time
from collections import deque
from typing import Callable


class RequestLimiter:
    def __init__(
        self,
        max_in_flight: int,
        requests_per_minute: int,
        *,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self._semaphore = threading.BoundedSemaphore(max(1, max_in_flight))
        self._rpm = max(1, requests_per_minute)
        self._window: deque[float] = deque()
        self._lock = threading.Lock()
        self._clock = clock
        self._sleep = sleep

    def _reserve_slot(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._window and now - self._window[0] >= 60.0:
                    self._window.popleft()
                if len(self._window) < self._rpm:
                    self._window.append(now)
                    return
                wait = 60.0 - (now - self._window[0])
            self._sleep(max(wait, 0.01))

    def __enter__(self) -> "RequestLimiter":
        self._semaphore.acquire()
        try:
            self._reserve_slot()
        except BaseException:
            self._semaphore.release()
            raise
        return self

    def __exit__(self, *exc_info: object) -> None:
        self._semaphore.release()
