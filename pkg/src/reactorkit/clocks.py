"""One-shot and recurring timers behind a single clock contract.

ThreadedClock delivers callbacks on its own dedicated timer thread in real
time. FakeClock implements the same contract in virtual time: tests advance
it explicitly and every due firing is delivered synchronously on the calling
thread, in due order, deterministically.

Public control methods take whole seconds (>= 1). At most one recurring and
one one-shot registration are active at a time; the recurring timer is
fixed-delay (the next tick is scheduled relative to completion of the
previous delivery), and the first tick comes one full period after start.
"""

from __future__ import annotations

import abc
import logging
import threading
import time
from typing import Optional

log = logging.getLogger(__name__)


class AlreadyTicking(RuntimeError):
    """start_tick called while a recurring registration is active."""


class ClockListener:
    """Receiver of clock firings; delivered on the clock's delivery thread."""

    def on_tick(self) -> None:
        pass

    def on_timeout(self) -> None:
        pass


def _check_seconds(value: int, what: str) -> int:
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{what} must be a whole number of seconds >= 1, got {value!r}")
    return value


class Clock(abc.ABC):
    """Shared contract of real and fake clocks."""

    @abc.abstractmethod
    def set_listener(self, listener) -> None: ...

    @abc.abstractmethod
    def start_tick(self, period_s: int) -> None: ...

    @abc.abstractmethod
    def stop_tick(self) -> None: ...

    @abc.abstractmethod
    def restart_timeout(self, delay_s: int) -> None: ...


class _Recurring:
    __slots__ = ("period_s", "due")

    def __init__(self, period_s: int, due: float):
        self.period_s = period_s
        self.due = due


class ThreadedClock(Clock):
    """Real-time clock with one dedicated delivery thread.

    Control methods are callable from any thread. Listener exceptions are
    caught and logged, never fatal to the timer thread. ``close()`` joins the
    thread, after which no further delivery can occur; a delivery already in
    flight when ``stop_tick`` returns may still land (real-time tests allow
    a one-firing tolerance for this).
    """

    def __init__(self, name: str = "clock"):
        self._cond = threading.Condition()
        self._listener = None
        self._recurring: Optional[_Recurring] = None
        self._oneshot_due: Optional[float] = None
        self._closed = False
        self._thread = threading.Thread(target=self._run, name=name, daemon=True)
        self._thread.start()

    # -- control (any thread) ----------------------------------------------

    def set_listener(self, listener) -> None:
        with self._cond:
            self._listener = listener

    def start_tick(self, period_s: int) -> None:
        _check_seconds(period_s, "period")
        with self._cond:
            if self._recurring is not None:
                raise AlreadyTicking("a recurring registration is already active")
            self._recurring = _Recurring(period_s, time.monotonic() + period_s)
            self._cond.notify()

    def stop_tick(self) -> None:
        with self._cond:
            self._recurring = None
            self._cond.notify()

    def restart_timeout(self, delay_s: int) -> None:
        _check_seconds(delay_s, "delay")
        with self._cond:
            self._oneshot_due = time.monotonic() + delay_s
            self._cond.notify()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()
        if threading.current_thread() is not self._thread:
            self._thread.join()

    def __enter__(self) -> "ThreadedClock":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- timer thread -------------------------------------------------------

    def _next_firing(self, now: float):
        """(kind, due) of the earliest due registration; ticks win ties."""
        best = None
        if self._recurring is not None:
            best = ("tick", self._recurring.due)
        if self._oneshot_due is not None and (best is None or self._oneshot_due < best[1]):
            best = ("timeout", self._oneshot_due)
        return best

    def _run(self) -> None:
        while True:
            with self._cond:
                while True:
                    if self._closed:
                        return
                    now = time.monotonic()
                    firing = self._next_firing(now)
                    if firing is None:
                        self._cond.wait()
                        continue
                    kind, due = firing
                    if due > now:
                        self._cond.wait(due - now)
                        continue
                    break
                if kind == "timeout":
                    self._oneshot_due = None
                recurring = self._recurring
                listener = self._listener
            # deliver outside the lock: a listener may re-enter control
            # methods, and it may block on other locks we must not hold
            if listener is not None:
                try:
                    if kind == "tick":
                        listener.on_tick()
                    else:
                        listener.on_timeout()
                except Exception:
                    log.exception("clock listener raised on the timer thread")
            if kind == "tick":
                with self._cond:
                    if self._recurring is recurring and recurring is not None:
                        # fixed delay: next tick relative to delivery completion
                        recurring.due = time.monotonic() + recurring.period_s


class FakeClock(Clock):
    """Deterministic clock driven by ``advance``; strictly single-threaded.

    Virtual time is integer milliseconds. ``advance(delta)`` delivers every
    firing that falls due, in due order; when a tick and a timeout share a
    due time, the tick is delivered first. Listener exceptions propagate to
    the caller of ``advance``.
    """

    def __init__(self):
        self._now = 0
        self._listener = None
        self._recurring = None  # [period_ms, due_ms]
        self._oneshot_due: Optional[int] = None
        self._advancing = False

    @property
    def now_ms(self) -> int:
        return self._now

    def set_listener(self, listener) -> None:
        self._listener = listener

    def start_tick(self, period_s: int) -> None:
        _check_seconds(period_s, "period")
        if self._recurring is not None:
            raise AlreadyTicking("a recurring registration is already active")
        self._recurring = [period_s * 1000, self._now + period_s * 1000]

    def stop_tick(self) -> None:
        self._recurring = None

    def restart_timeout(self, delay_s: int) -> None:
        _check_seconds(delay_s, "delay")
        self._oneshot_due = self._now + delay_s * 1000

    def advance(self, delta_ms: int) -> int:
        """Move virtual time forward, delivering due firings; returns the count."""
        if delta_ms < 0:
            raise ValueError("delta_ms must be >= 0")
        if self._advancing:
            raise RuntimeError("advance called concurrently or reentrantly")
        self._advancing = True
        try:
            target = self._now + delta_ms
            fired = 0
            while True:
                tick_due = self._recurring[1] if self._recurring is not None else None
                timeout_due = self._oneshot_due
                kind = None
                if tick_due is not None and tick_due <= target:
                    kind, due = "tick", tick_due
                if timeout_due is not None and timeout_due <= target:
                    if kind is None or timeout_due < due:
                        kind, due = "timeout", timeout_due
                if kind is None:
                    break
                self._now = due
                if kind == "tick":
                    self._recurring[1] += self._recurring[0]
                else:
                    self._oneshot_due = None
                if self._listener is not None:
                    if kind == "tick":
                        self._listener.on_tick()
                    else:
                        self._listener.on_timeout()
                fired += 1
            self._now = target
            return fired
        finally:
            self._advancing = False
