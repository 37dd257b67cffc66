"""Single-threaded event loop with a fully synchronized FIFO event queue.

Producers on any thread enqueue events (or post deferred actions); exactly
one loop thread drains the queue and runs each handler to completion before
taking the next. State owned by the loop can be wrapped in a ConfinedCell,
which raises on any access from another thread.
"""

from __future__ import annotations

import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

log = logging.getLogger(__name__)

POST_SOURCE = "__post__"

DEFAULT_WARN_DEPTH = 10_000


class EnqueueOnClosed(RuntimeError):
    """Enqueue or post attempted after the queue was closed."""


class ConfinementViolation(RuntimeError):
    """Loop-confined state touched from a thread that is not the loop thread."""

    def __init__(self, message: str, offender: Optional[threading.Thread] = None):
        super().__init__(message)
        self.offender = offender


@dataclass
class Event:
    source: str
    payload: Any = None
    seq: int = -1  # assigned by the queue at enqueue time

    def __repr__(self) -> str:
        return f"Event(seq={self.seq}, source={self.source!r}, payload={self.payload!r})"


class EventQueue:
    """FIFO of events, safe to enqueue from any thread.

    Dispatch order equals enqueue order; seq numbers are strictly increasing
    across all producers. Unbounded, with a one-shot warning once the backlog
    exceeds ``warn_depth``. An optional ``coalescer(pending, new)`` predicate
    may drop pending events made redundant by a newly enqueued one; it is
    disabled by default so dispatch stays deterministic.
    """

    def __init__(self, warn_depth: int = DEFAULT_WARN_DEPTH,
                 coalescer: Optional[Callable[[Event, Event], bool]] = None):
        self._cond = threading.Condition()
        self._pending: deque[Event] = deque()
        self._seq = itertools.count()
        self._closed = False
        self._warn_depth = warn_depth
        self._warned = False
        self._coalescer = coalescer

    @property
    def closed(self) -> bool:
        with self._cond:
            return self._closed

    def __len__(self) -> int:
        with self._cond:
            return len(self._pending)

    def enqueue(self, event: Event) -> int:
        with self._cond:
            if self._closed:
                raise EnqueueOnClosed(f"queue closed, rejecting event from {event.source!r}")
            if self._coalescer is not None:
                keep = self._coalescer
                self._pending = deque(p for p in self._pending if not keep(p, event))
            event.seq = next(self._seq)
            self._pending.append(event)
            if not self._warned and len(self._pending) > self._warn_depth:
                self._warned = True
                log.warning("event queue backlog exceeded %d events", self._warn_depth)
            self._cond.notify()
            return event.seq

    def take(self) -> Optional[Event]:
        """Block until an event is available; None once the queue is closed.

        A closed queue returns None even if events remain pending: shutdown
        drains nothing further.
        """
        with self._cond:
            while not self._pending and not self._closed:
                self._cond.wait()
            if self._closed:
                return None
            return self._pending.popleft()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


def _default_error_hook(seq: int, description: str) -> None:
    log.error("handler failure for event seq=%d: %s", seq, description)


class EventLoop:
    """Owns the queue, the listener registry, and the identity of the loop thread.

    At most one listener per source (setting a new one replaces the old).
    ``run()`` must be called exactly once, on the thread that is to become
    the loop thread. A handler failure is caught, reported through the error
    hook, and the loop continues.
    """

    def __init__(self, *, error_hook: Optional[Callable[[int, str], None]] = None,
                 warn_depth: int = DEFAULT_WARN_DEPTH,
                 coalescer: Optional[Callable[[Event, Event], bool]] = None):
        self.queue = EventQueue(warn_depth=warn_depth, coalescer=coalescer)
        self._listeners: dict[str, Callable[[Event], None]] = {}
        self._listener_lock = threading.Lock()
        self._loop_thread: Optional[threading.Thread] = None
        self._started = False
        self._start_lock = threading.Lock()
        self._shutdown = threading.Event()
        self._error_hook = error_hook or _default_error_hook

    # -- listener registry ------------------------------------------------

    def set_listener(self, source: str, callback: Callable[[Event], None]) -> None:
        """Bind the single listener for ``source``, replacing any previous one."""
        with self._listener_lock:
            self._listeners[source] = callback

    def remove_listener(self, source: str) -> None:
        with self._listener_lock:
            self._listeners.pop(source, None)

    # -- producers (any thread) -------------------------------------------

    def enqueue(self, source: str, payload: Any = None) -> int:
        return self.queue.enqueue(Event(source=source, payload=payload))

    def post(self, action: Callable[[], None]) -> int:
        """Schedule ``action`` to run on the loop thread, in queue order."""
        return self.queue.enqueue(Event(source=POST_SOURCE, payload=action))

    # -- the loop thread ---------------------------------------------------

    def run(self) -> None:
        with self._start_lock:
            if self._started:
                raise RuntimeError("run() may be called exactly once per loop")
            self._started = True
            self._loop_thread = threading.current_thread()
        while not self._shutdown.is_set():
            event = self.queue.take()
            if event is None:
                break
            self._dispatch(event)

    def _dispatch(self, event: Event) -> None:
        try:
            if event.source == POST_SOURCE:
                event.payload()
                return
            with self._listener_lock:
                listener = self._listeners.get(event.source)
            if listener is None:
                self._error_hook(event.seq, f"no listener for source {event.source!r}")
                return
            listener(event)
        except Exception as exc:  # catch, report, continue: a bad handler must not kill the loop
            self._error_hook(event.seq, f"{type(exc).__name__}: {exc}")

    def start_thread(self, name: str = "event-loop") -> threading.Thread:
        """Convenience: run the loop on a fresh daemon thread."""
        thread = threading.Thread(target=self.run, name=name, daemon=True)
        thread.start()
        return thread

    def shutdown(self) -> None:
        """Signal the loop to exit after the current handler; closes the queue."""
        self._shutdown.set()
        self.queue.close()

    # -- confinement --------------------------------------------------------

    def is_loop_thread(self) -> bool:
        return threading.current_thread() is self._loop_thread

    def require_loop_thread(self) -> None:
        if not self.is_loop_thread():
            offender = threading.current_thread()
            raise ConfinementViolation(
                f"loop-confined entry point called from {offender.name!r}", offender)


@dataclass
class ConfinedCell:
    """A value readable and writable only on the owning loop's thread."""

    owner: EventLoop
    value: Any = None
    name: str = field(default="cell")

    def assert_confined(self) -> None:
        if not self.owner.is_loop_thread():
            offender = threading.current_thread()
            raise ConfinementViolation(
                f"confined cell {self.name!r} accessed from {offender.name!r}", offender)

    def get(self) -> Any:
        self.assert_confined()
        return self.value

    def set(self, value: Any) -> None:
        self.assert_confined()
        self.value = value
