"""Asynchronous tasks with progress reporting and cooperative cancellation.

An AsyncTask bundles the lifecycle callbacks: ``on_pre`` runs synchronously on
the loop thread before the background body is handed to an executor; the body
runs on a worker thread with access to ``publish_progress`` and
``is_cancelled`` through its TaskHandle; progress and exactly one terminal
callback (``on_post`` or ``on_cancelled``) are posted back to the loop.

Cancellation is cooperative only: ``cancel`` sets a flag the body is expected
to poll; nothing is interrupted forcibly.

WorkChunker is the single-threaded alternative: the work is split into small
units that run on the loop thread itself, each unit re-enqueueing its
successor so queued events can interleave.
"""

from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional

from .reactor import EnqueueOnClosed, EventLoop

log = logging.getLogger(__name__)

DEFAULT_POOL_SIZE = 2
DEFAULT_CHUNK_BUDGET = 1000


class TaskState(Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    CANCELLED = "cancelled"


class AlreadyExecuted(RuntimeError):
    """A task object may be executed at most once."""


class ExecutorShutDown(RuntimeError):
    """submit called on an executor that has been shut down."""


class TaskExecutor:
    """Fixed set of worker threads draining a FIFO of task bodies.

    Serial is a pool of one: at most one body executes at any instant, in
    submission order. Shutdown drains nothing: queued-but-unstarted entries
    get their drop callback (tasks turn that into ``on_cancelled``); bodies
    already running finish cooperatively.
    """

    def __init__(self, workers: int, name: str = "executor"):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self._cond = threading.Condition()
        self._queue: deque[tuple[Callable[[], None], Optional[Callable[[], None]]]] = deque()
        self._shutdown = False
        self._threads = [
            threading.Thread(target=self._worker, name=f"{name}-{i}", daemon=True)
            for i in range(workers)
        ]
        for t in self._threads:
            t.start()

    @classmethod
    def serial(cls) -> "TaskExecutor":
        return cls(1, name="serial")

    @classmethod
    def pool(cls, size: int = DEFAULT_POOL_SIZE) -> "TaskExecutor":
        return cls(size, name="pool")

    @property
    def size(self) -> int:
        return len(self._threads)

    def submit(self, job: Callable[[], None],
               on_dropped: Optional[Callable[[], None]] = None) -> None:
        with self._cond:
            if self._shutdown:
                raise ExecutorShutDown("executor has been shut down")
            self._queue.append((job, on_dropped))
            self._cond.notify()

    def shutdown(self, wait: bool = True) -> None:
        with self._cond:
            if self._shutdown:
                dropped = []
            else:
                self._shutdown = True
                dropped = list(self._queue)
                self._queue.clear()
            self._cond.notify_all()
        for _, on_dropped in dropped:
            if on_dropped is not None:
                on_dropped()
        if wait:
            me = threading.current_thread()
            for t in self._threads:
                if t is not me:
                    t.join()

    def _worker(self) -> None:
        while True:
            with self._cond:
                while not self._queue and not self._shutdown:
                    self._cond.wait()
                if self._shutdown:
                    return
                job, _ = self._queue.popleft()
            try:
                job()
            except Exception:
                log.exception("task body escaped its wrapper")


class TaskHandle:
    """State and control surface of one executed task.

    Transitions: PENDING -> RUNNING -> {DONE, CANCELLED}, or PENDING ->
    CANCELLED if the body never starts. ``cancel_requested`` never clears once
    set; ``is_cancelled`` reads it without locking (a monotonic flag), cheap
    enough to poll every iteration of a tight body loop.
    """

    def __init__(self, loop: EventLoop, *,
                 on_progress: Optional[Callable[[Any], None]] = None,
                 on_post: Optional[Callable[[Any], None]] = None,
                 on_cancelled: Optional[Callable[[Any], None]] = None):
        self._loop = loop
        self._on_progress = on_progress
        self._on_post = on_post
        self._on_cancelled = on_cancelled
        self._lock = threading.Lock()
        self._state = TaskState.PENDING
        self._cancel_requested = False
        self._terminal_decided = False
        self._done = threading.Event()

    @property
    def state(self) -> TaskState:
        with self._lock:
            return self._state

    @property
    def cancel_requested(self) -> bool:
        return self._cancel_requested

    def is_cancelled(self) -> bool:
        return self._cancel_requested

    def cancel(self) -> bool:
        """Request cooperative cancellation; False if the task already ended."""
        with self._lock:
            if self._terminal_decided:
                return False
            self._cancel_requested = True
            return True

    def publish_progress(self, value: Any) -> None:
        """Forward a progress value to the loop; dropped after cancellation."""
        if self._cancel_requested:
            return
        with self._lock:
            if self._state is not TaskState.RUNNING:
                return
        if self._on_progress is None:
            return
        callback = self._on_progress
        try:
            self._loop.post(lambda: callback(value))
        except EnqueueOnClosed:
            pass

    def join(self, timeout: Optional[float] = None) -> bool:
        """Wait until the terminal callback has run; True if it has."""
        return self._done.wait(timeout)

    # -- internal ------------------------------------------------------------

    def _mark_running_unless_cancelled(self) -> bool:
        """RUNNING transition at body start; False means skip the body."""
        with self._lock:
            if self._cancel_requested:
                return False
            self._state = TaskState.RUNNING
            return True

    def _finish(self, cancelled: bool, result: Any, inline: bool = False) -> None:
        """Decide and deliver the terminal callback, exactly once."""
        with self._lock:
            if self._terminal_decided:
                return
            self._terminal_decided = True
            self._state = TaskState.CANCELLED if cancelled else TaskState.DONE
        callback = self._on_cancelled if cancelled else self._on_post

        def deliver():
            try:
                if callback is not None:
                    callback(result)
            finally:
                self._done.set()

        if inline:
            deliver()
            return
        try:
            self._loop.post(deliver)
        except EnqueueOnClosed:
            log.warning("loop closed before terminal callback could be delivered")
            self._done.set()


class AsyncTask:
    """One-shot asynchronous activity; execute it on an executor against a loop."""

    def __init__(self, background: Callable[[Any, TaskHandle], Any], *,
                 on_pre: Optional[Callable[[], None]] = None,
                 on_progress: Optional[Callable[[Any], None]] = None,
                 on_post: Optional[Callable[[Any], None]] = None,
                 on_cancelled: Optional[Callable[[Any], None]] = None):
        self.background = background
        self.on_pre = on_pre
        self.on_progress = on_progress
        self.on_post = on_post
        self.on_cancelled = on_cancelled
        self.handle: Optional[TaskHandle] = None
        self._executed = False

    def execute_on(self, executor: TaskExecutor, params: Any,
                   loop: EventLoop) -> TaskHandle:
        return execute_on(self, executor, params, loop)


def execute_on(task: AsyncTask, executor: TaskExecutor, params: Any,
               loop: EventLoop) -> TaskHandle:
    """Run the task's lifecycle: pre (now, on the loop), body (executor), terminal.

    Must be called on the loop thread. ``on_pre`` completes before the body is
    even enqueued, so no progress can precede it.
    """
    loop.require_loop_thread()
    if task._executed:
        raise AlreadyExecuted("task was already executed")
    task._executed = True
    handle = TaskHandle(loop, on_progress=task.on_progress,
                        on_post=task.on_post, on_cancelled=task.on_cancelled)
    task.handle = handle
    if task.on_pre is not None:
        task.on_pre()

    def runner():
        if not handle._mark_running_unless_cancelled():
            handle._finish(cancelled=True, result=None)
            return
        try:
            result = task.background(params, handle)
        except Exception:
            # a crashed body still yields exactly one terminal callback
            log.exception("background body raised")
            handle._finish(cancelled=True, result=None)
            return
        handle._finish(handle._cancel_requested, result)

    executor.submit(runner, on_dropped=lambda: handle._finish(cancelled=True, result=None))
    return handle


@dataclass
class Done:
    """Returned by a chunker unit to signal completion with a result."""

    result: Any = None


class WorkChunker:
    """Long activity split into loop-thread units so other events interleave.

    ``unit`` performs one small step and returns None to continue or
    ``Done(result)``. ``budget`` units run per loop event before the successor
    is re-enqueued; each event first checks for a cancellation request.
    """

    def __init__(self, unit: Callable[[], Optional[Done]], *,
                 budget: int = DEFAULT_CHUNK_BUDGET,
                 on_done: Optional[Callable[[Any], None]] = None,
                 on_cancelled: Optional[Callable[[Any], None]] = None):
        if budget < 1:
            raise ValueError("budget must be >= 1")
        self.unit = unit
        self.budget = budget
        self.on_done = on_done
        self.on_cancelled = on_cancelled


def run_chunked(chunker: WorkChunker, loop: EventLoop) -> TaskHandle:
    """Enqueue the first unit of work; loop-thread callers only."""
    loop.require_loop_thread()
    handle = TaskHandle(loop, on_post=chunker.on_done, on_cancelled=chunker.on_cancelled)

    def pump():
        if handle._cancel_requested:
            handle._finish(cancelled=True, result=None, inline=True)
            return
        if handle.state is TaskState.PENDING:
            handle._mark_running_unless_cancelled()
        for _ in range(chunker.budget):
            out = chunker.unit()
            if out is not None:
                handle._finish(cancelled=False, result=out.result, inline=True)
                return
        loop.post(pump)

    loop.post(pump)
    return handle
