"""Brute-force primality checking with progress reporting and cancellation.

The check divides by every k from 2 through n/2 — deliberately naive, which
is what makes it a useful long-running workload. It can run in three modes:
inline on the loop thread (freezes everything else until done), chunked into
small units interleaved with other loop events, or as a background task on an
executor. Progress is published as an integer percentage, only when the value
actually changes, which preserves the observable percent sequence while
keeping the event queue out of trouble for large inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .reactor import EventLoop
from .tasks import (
    DEFAULT_CHUNK_BUDGET,
    AsyncTask,
    Done,
    TaskExecutor,
    TaskHandle,
    WorkChunker,
    run_chunked,
)

log = logging.getLogger(__name__)

CHECKING = "checking"
PRIME = "prime"
COMPOSITE = "composite"
NEUTRAL = "neutral"


class Verdict(Enum):
    PRIME = "prime"
    COMPOSITE = "composite"
    CANCELLED = "cancelled"


@dataclass(frozen=True)
class PrimeResult:
    verdict: Verdict
    iterations: int

    @property
    def is_prime(self) -> bool:
        return self.verdict is Verdict.PRIME


class RunMode(Enum):
    FOREGROUND = "foreground"
    CHUNKED = "chunked"
    ASYNC = "async"


def _next_publish_k(pct: int, half: int) -> int:
    # smallest k with k*100//half > pct
    return ((pct + 1) * half + 99) // 100


def is_prime(n: int, cancel_probe: Optional[Callable[[], bool]] = None,
             progress_sink: Optional[Callable[[int], None]] = None) -> PrimeResult:
    """Trial division by k = 2..n/2; cancellation is polled every iteration.

    Values below two are composite immediately. The returned iteration count
    is the number of loop entries: a completed prime run makes exactly
    n/2 - 1 of them.
    """
    if n < 0:
        raise ValueError("candidate must be >= 0")
    if n < 2:
        return PrimeResult(Verdict.COMPOSITE, 0)
    half = n // 2
    if cancel_probe is None and progress_sink is None:
        # bare loop kept free of per-iteration probe overhead
        for k in range(2, half + 1):
            if n % k == 0:
                return PrimeResult(Verdict.COMPOSITE, k - 1)
        return PrimeResult(Verdict.PRIME, max(half - 1, 0))
    next_pub = 2 if progress_sink is not None else half + 1
    for k in range(2, half + 1):
        if cancel_probe is not None and cancel_probe():
            return PrimeResult(Verdict.CANCELLED, k - 2)
        if n % k == 0:
            return PrimeResult(Verdict.COMPOSITE, k - 1)
        if k >= next_pub:
            pct = k * 100 // half
            progress_sink(pct)
            next_pub = _next_publish_k(pct, half)
    return PrimeResult(Verdict.PRIME, max(half - 1, 0))


class _ChunkedCheck:
    """One divisor test per step, mirroring is_prime's loop exactly."""

    def __init__(self, n: int, on_percent: Callable[[int], None]):
        self.n = n
        self.half = n // 2
        self.k = 2
        self._next_pub = 2
        self._on_percent = on_percent

    def step(self) -> Optional[Done]:
        n = self.n
        if n < 2:
            return Done(PrimeResult(Verdict.COMPOSITE, 0))
        k = self.k
        if k > self.half:
            return Done(PrimeResult(Verdict.PRIME, max(self.half - 1, 0)))
        if n % k == 0:
            return Done(PrimeResult(Verdict.COMPOSITE, k - 1))
        if k >= self._next_pub:
            pct = k * 100 // self.half
            self._on_percent(pct)
            self._next_pub = _next_publish_k(pct, self.half)
        self.k = k + 1
        return None


class NoFreeSlot(RuntimeError):
    """Every progress slot is occupied by a running check."""


@dataclass
class PrimeSlot:
    percent: int = 0
    status: str = NEUTRAL

    def as_dict(self) -> dict:
        return {"percent": self.percent, "status": self.status}


class PrimeChecker:
    """Multi-slot prime-check surface; all entry points are loop-confined.

    Each check claims the first slot not currently busy, drives its percent
    and status, and releases it at the terminal: prime/composite for a
    completed run, neutral (with the percent frozen where it was) for a
    cancelled one.
    """

    def __init__(self, loop: EventLoop, executor: TaskExecutor, *,
                 slots: int = 4, chunk_budget: int = DEFAULT_CHUNK_BUDGET,
                 view_sink: Optional[Callable[[list[dict]], None]] = None):
        self._loop = loop
        self._executor = executor
        self.slots = [PrimeSlot() for _ in range(slots)]
        self._chunk_budget = chunk_budget
        self._view_sink = view_sink or (lambda _slots: None)
        self._active: dict[int, TaskHandle] = {}

    def view(self) -> list[dict]:
        return [slot.as_dict() for slot in self.slots]

    def _emit(self) -> None:
        self._view_sink(self.view())

    def _claim_slot(self) -> int:
        for index, slot in enumerate(self.slots):
            if slot.status != CHECKING:
                return index
        raise NoFreeSlot(f"all {len(self.slots)} slots are busy")

    def _mark_checking(self, index: int) -> None:
        slot = self.slots[index]
        slot.percent = 0
        slot.status = CHECKING
        self._emit()

    def _set_percent(self, index: int, pct: int) -> None:
        self.slots[index].percent = pct
        self._emit()

    def _settle(self, index: int, result: Optional[PrimeResult]) -> None:
        if result is None or result.verdict is Verdict.CANCELLED:
            self.slots[index].status = NEUTRAL
        else:
            self.slots[index].status = PRIME if result.is_prime else COMPOSITE
        self._active.pop(index, None)
        self._emit()

    def check(self, n: int, mode: RunMode) -> TaskHandle:
        """Start a check; returns its handle (already terminal for foreground)."""
        self._loop.require_loop_thread()
        if n < 0:
            raise ValueError("candidate must be >= 0")
        index = self._claim_slot()

        if mode is RunMode.FOREGROUND:
            self._mark_checking(index)
            handle = TaskHandle(
                self._loop,
                on_post=lambda result: self._settle(index, result),
                on_cancelled=lambda result: self._settle(index, None),
            )
            handle._mark_running_unless_cancelled()
            result = is_prime(n, None, lambda pct: self._set_percent(index, pct))
            handle._finish(handle.cancel_requested, result, inline=True)
            return handle

        if mode is RunMode.CHUNKED:
            self._mark_checking(index)
            chunker = WorkChunker(
                _ChunkedCheck(n, lambda pct: self._set_percent(index, pct)).step,
                budget=self._chunk_budget,
                on_done=lambda result: self._settle(index, result),
                on_cancelled=lambda result: self._settle(index, None),
            )
            handle = run_chunked(chunker, self._loop)
            self._active[index] = handle
            return handle

        task = AsyncTask(
            lambda params, handle: is_prime(params, handle.is_cancelled,
                                            handle.publish_progress),
            on_pre=lambda: self._mark_checking(index),
            on_progress=lambda pct: self._set_percent(index, pct),
            on_post=lambda result: self._settle(index, result),
            on_cancelled=lambda result: self._settle(index, None),
        )
        handle = task.execute_on(self._executor, n, self._loop)
        self._active[index] = handle
        return handle

    def cancel_all(self) -> int:
        """Request cancellation of every ongoing check; returns requests accepted."""
        self._loop.require_loop_thread()
        accepted = 0
        for handle in list(self._active.values()):
            if handle.cancel():
                accepted += 1
        return accepted
