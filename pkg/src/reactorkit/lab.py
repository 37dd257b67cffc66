"""Lost-update demonstrations on a shared counter, plus an interleaving enumerator.

The unsafe increment splits a read-modify-write into a fetch and a set with an
optional yield in between, so two threads can overwrite each other's update.
The safe variant holds a lock across both steps. The enumerator produces every
order-preserving merge of two fetch/set step programs and simulates the final
counter delta for each, without spawning real threads.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

FETCH = "fetch"
SET = "set"

MAX_COMBINED_STEPS = 16


def scheduler_yield() -> None:
    """Give the scheduler a chance to switch threads between fetch and set."""
    time.sleep(0)


class SharedCounter:
    """An integer shared across threads, with unsafe and lock-guarded increments."""

    def __init__(self, value: int = 0, delay_hook: Optional[Callable[[], None]] = None):
        self.shared = value
        self.lock = threading.Lock()
        self.delay_hook = delay_hook

    def _fetch_delay_set(self) -> None:
        local = self.shared
        if self.delay_hook is not None:
            self.delay_hook()
        self.shared = local + 1

    def increment_unsafe(self) -> None:
        self._fetch_delay_set()

    def increment_safe(self) -> None:
        with self.lock:
            self._fetch_delay_set()


def run_concurrently(action: Callable[[], None], thread_count: int) -> None:
    """Run ``action`` once on each of ``thread_count`` fresh threads; join all."""
    if thread_count < 1:
        raise ValueError("thread_count must be >= 1")
    threads = [threading.Thread(target=action) for _ in range(thread_count)]
    for t in threads:
        t.start()
    for t in threads:
        try:
            t.join()
        except KeyboardInterrupt:
            raise RuntimeError("interrupted during join")


@dataclass(frozen=True)
class Step:
    label: str
    kind: str  # FETCH or SET


@dataclass(frozen=True)
class StepProgram:
    """Ordered fetch/set steps of one thread; one local register shared by them."""

    steps: tuple[Step, ...]

    @classmethod
    def increment(cls, thread_id: int, count: int = 1) -> "StepProgram":
        """Build ``count`` back-to-back fetch/set increments for one thread.

        Single increments get the labels f<tid>, s<tid>; repeats are suffixed.
        """
        steps = []
        for i in range(count):
            suffix = "" if count == 1 else f".{i + 1}"
            steps.append(Step(f"f{thread_id}{suffix}", FETCH))
            steps.append(Step(f"s{thread_id}{suffix}", SET))
        return cls(tuple(steps))

    @classmethod
    def empty(cls) -> "StepProgram":
        return cls(())


@dataclass(frozen=True)
class InterleavingResult:
    schedule: tuple[str, ...]
    final_delta: int


def _simulate(merged: list[tuple[int, Step]]) -> int:
    shared = 0
    local = {0: 0, 1: 0}
    for owner, step in merged:
        if step.kind == FETCH:
            local[owner] = shared
        else:
            shared = local[owner] + 1
    return shared


def enumerate_interleavings(program_a: StepProgram,
                            program_b: StepProgram) -> list[InterleavingResult]:
    """Every order-preserving merge of the two programs, with its simulated delta.

    Steps are treated as atomic and sequentially consistent. The schedule count
    is binomial(m+n, m), so combined size is capped at MAX_COMBINED_STEPS.
    """
    m, n = len(program_a.steps), len(program_b.steps)
    if m + n > MAX_COMBINED_STEPS:
        raise ValueError(f"combined steps {m + n} exceed cap {MAX_COMBINED_STEPS}")
    results = []
    for a_slots in combinations(range(m + n), m):
        a_slot_set = set(a_slots)
        merged: list[tuple[int, Step]] = []
        ia = ib = 0
        for pos in range(m + n):
            if pos in a_slot_set:
                merged.append((0, program_a.steps[ia]))
                ia += 1
            else:
                merged.append((1, program_b.steps[ib]))
                ib += 1
        schedule = tuple(step.label for _, step in merged)
        results.append(InterleavingResult(schedule, _simulate(merged)))
    return results


def race_histogram(threads: int, trials: int,
                   delay_hook: Optional[Callable[[], None]] = scheduler_yield) -> dict[int, int]:
    """Observed delta histogram for ``trials`` runs of unsafe concurrent increments."""
    histogram: dict[int, int] = {}
    for _ in range(trials):
        counter = SharedCounter(0, delay_hook=delay_hook)
        run_concurrently(counter.increment_unsafe, threads)
        histogram[counter.shared] = histogram.get(counter.shared, 0) + 1
    return dict(sorted(histogram.items()))
