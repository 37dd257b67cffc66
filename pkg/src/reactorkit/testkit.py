"""Deterministic scaffolding for exercising the apps without flaky timing.

LoopPump stands in for a live event loop: actions posted to it are held until
the test explicitly pumps them, on its own thread. UnifiedMock merges the
three dependencies of the timer state machine (time model, clock control, UI
listener) into one recording object. Scenario scripts are replayable line
oriented step lists (click / advance / expect) that run against either a
fake-time environment or, opt-in, a real-time one with sleeps and a one-tick
tolerance — the same script, two environments.
"""

from __future__ import annotations

import itertools
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .clocks import FakeClock, ThreadedClock
from .counter import BoundedCounter, CounterAdapter, CounterViewState
from .timer import (
    ClockToMachine,
    PostedUIListener,
    TimeModel,
    TimerStateMachine,
    TimerView,
)


class UnknownComponent(RuntimeError):
    """A click targeted a component id that does not exist."""


class LoopPump:
    """Queues posted actions until pump() releases them on the caller's thread.

    Actions posted while pumping are held for the next pump, so a run's
    effects are observed one release at a time.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._held: deque[Callable[[], None]] = deque()
        self._seq = itertools.count()
        self._owner = threading.current_thread()

    def post(self, action: Callable[[], None]) -> int:
        with self._lock:
            self._held.append(action)
            return next(self._seq)

    def pump(self) -> int:
        """Run everything held at this moment, in post order; returns the count."""
        with self._lock:
            batch = list(self._held)
            self._held.clear()
        for action in batch:
            action()
        return len(batch)

    def held_count(self) -> int:
        with self._lock:
            return len(self._held)

    def is_loop_thread(self) -> bool:
        return threading.current_thread() is self._owner

    def require_loop_thread(self) -> None:
        if not self.is_loop_thread():
            raise RuntimeError("pump used off its owning thread")


class UnifiedMock:
    """Time model, clock control, and UI listener unified for machine tests.

    Records what the state machine did to each dependency; the test then
    injects events directly and asserts on the recorded values. Attaching a
    clock listener is rejected — this clock never fires on its own.
    """

    def __init__(self):
        self.time_value = -1
        self.state_id: Optional[str] = None
        self.running_time = -1
        self.idle_time = -1
        self.started = False
        self.ringing = False

    # probe accessors
    def get_time(self) -> int:
        return self.time_value

    def get_state(self) -> Optional[str]:
        return self.state_id

    def is_started(self) -> bool:
        return self.started

    def is_ringing(self) -> bool:
        return self.ringing

    # TimerUIUpdateListener contract
    def update_time(self, seconds: int) -> None:
        self.time_value = seconds

    def update_state(self, state_id: str) -> None:
        self.state_id = state_id

    def ring_alarm(self, on: bool) -> None:
        self.ringing = on

    # clock control contract
    def set_listener(self, listener) -> None:
        raise NotImplementedError("mock clock does not deliver events")

    def start_tick(self, period_s: int) -> None:
        self.started = True

    def stop_tick(self) -> None:
        self.started = False

    def restart_timeout(self, delay_s: int) -> None:
        self.idle_time = delay_s

    # time model contract, clamped to [0, 99]
    def reset(self) -> None:
        self.running_time = 0

    def inc(self) -> None:
        if self.running_time != 99:
            self.running_time += 1

    def dec(self) -> None:
        if self.running_time != 0:
            self.running_time -= 1

    def get(self) -> int:
        return self.running_time


# -- scenario scripts ---------------------------------------------------------

CLICK = "click"
ADVANCE = "advance"
EXPECT = "expect"


@dataclass(frozen=True)
class ScenarioStep:
    kind: str
    target: str = ""
    count: int = 1
    ms: int = 0
    key: str = ""
    value: str = ""


def click(target: str, count: int = 1) -> ScenarioStep:
    return ScenarioStep(CLICK, target=target, count=count)


def advance(ms: int) -> ScenarioStep:
    return ScenarioStep(ADVANCE, ms=ms)


def expect(key: str, value: Any) -> ScenarioStep:
    return ScenarioStep(EXPECT, key=key, value=_format_value(value))


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class ScenarioScript:
    """Pure replayable data; identical replays produce identical traces."""

    steps: tuple[ScenarioStep, ...]

    @classmethod
    def of(cls, *steps: ScenarioStep) -> "ScenarioScript":
        return cls(tuple(steps))

    @classmethod
    def parse(cls, text: str) -> "ScenarioScript":
        steps = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 1)
            op = parts[0]
            arg = parts[1].strip() if len(parts) > 1 else ""
            if op == CLICK and arg:
                target, _, count = arg.partition(" ")
                try:
                    steps.append(click(target, int(count) if count.strip() else 1))
                except ValueError:
                    raise ValueError(f"line {lineno}: bad click count in {raw!r}")
            elif op == ADVANCE:
                try:
                    steps.append(advance(int(arg)))
                except ValueError:
                    raise ValueError(f"line {lineno}: advance needs milliseconds, got {arg!r}")
            elif op == EXPECT and "=" in arg:
                key, _, value = arg.partition("=")
                steps.append(ScenarioStep(EXPECT, key=key.strip(), value=value.strip()))
            else:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        return cls(tuple(steps))

    def to_text(self) -> str:
        lines = []
        for step in self.steps:
            if step.kind == CLICK:
                suffix = f" {step.count}" if step.count != 1 else ""
                lines.append(f"click {step.target}{suffix}")
            elif step.kind == ADVANCE:
                lines.append(f"advance {step.ms}")
            else:
                lines.append(f"expect {step.key}={step.value}")
        return "\n".join(lines) + "\n"


@dataclass
class ScenarioResult:
    ok: bool
    trace: list[str] = field(default_factory=list)
    failure: Optional[str] = None


def _values_match(actual: Any, expected: str, tolerance: int) -> bool:
    actual_text = _format_value(actual)
    if actual_text == expected:
        return True
    if tolerance > 0:
        try:
            return abs(int(actual_text) - int(expected)) <= tolerance
        except ValueError:
            return False
    return False


def run_scenario(script: ScenarioScript, env, *, tolerance: int = 0) -> ScenarioResult:
    """Execute steps against an environment; stops at the first failed expect.

    ``tolerance`` loosens integer-valued expectations (real-time runs pass 1,
    fake-time runs demand exactness).
    """
    trace: list[str] = []
    for number, step in enumerate(script.steps, start=1):
        if step.kind == CLICK:
            accepted = True
            for _ in range(step.count):
                accepted = env.perform_click(step.target) and accepted
            label = f"click {step.target}" + (f" x{step.count}" if step.count != 1 else "")
            trace.append(f"{label} -> {_format_value(accepted)}")
        elif step.kind == ADVANCE:
            env.advance(step.ms)
            trace.append(f"advance {step.ms}")
        else:
            actual = env.view().get(step.key)
            if _values_match(actual, step.value, tolerance):
                trace.append(f"expect {step.key}={step.value} ok")
            else:
                message = (f"step {number}: expected {step.key}={step.value}, "
                           f"got {_format_value(actual)}")
                trace.append(f"expect {step.key}={step.value} FAIL "
                             f"(got {_format_value(actual)})")
                return ScenarioResult(False, trace, failure=message)
    return ScenarioResult(True, trace)


# -- environments --------------------------------------------------------------


class CounterScenarioEnv:
    """Counter app wired to a recording view; clicks are adapter events."""

    TARGETS = ("increment", "decrement", "reset")

    def __init__(self, min_value: int = 0, max_value: int = 10):
        self.views: list[CounterViewState] = []
        self.model = BoundedCounter(min_value, max_value)
        self.adapter = CounterAdapter(self.model, self.views.append)
        self.adapter.refresh()

    def perform_click(self, target: str) -> bool:
        if target not in self.TARGETS:
            raise UnknownComponent(f"no such counter control: {target!r}")
        self.adapter.on_event(target)
        return True

    def advance(self, ms: int) -> None:
        pass  # the counter has no autonomous behavior

    def view(self) -> dict:
        return self.views[-1].as_dict()

    def close(self) -> None:
        pass


class TimerScenarioEnv:
    """Timer app against a fake clock, or a real one when real_time is set.

    UI updates travel through a LoopPump exactly as they would through the
    loop; every click/advance pumps afterwards so expects see current state.
    """

    def __init__(self, *, real_time: bool = False, max_time: int = 99,
                 idle_timeout_s: int = 3, tick_period_s: int = 1):
        self.real_time = real_time
        self.pump = LoopPump()
        self.views = []
        self._view = TimerView(sink=self.views.append)
        self.clock = ThreadedClock() if real_time else FakeClock()
        self.machine = TimerStateMachine(
            TimeModel(max_time),
            self.clock,
            PostedUIListener(self.pump.post, self._view),
            idle_timeout_s=idle_timeout_s,
            tick_period_s=tick_period_s,
        )
        self.clock.set_listener(ClockToMachine(self.machine))
        self.machine.start()
        self.pump.pump()

    def perform_click(self, target: str) -> bool:
        if target != "button":
            raise UnknownComponent(f"no such timer control: {target!r}")
        self.machine.on_button_press()
        self.pump.pump()
        return True

    def advance(self, ms: int) -> None:
        if self.real_time:
            time.sleep(ms / 1000.0)
        else:
            self.clock.advance(ms)
        self.pump.pump()

    def view(self) -> dict:
        state = self._view.current().as_dict()
        state["time"] = self._view.seconds
        return state

    def close(self) -> None:
        if isinstance(self.clock, ThreadedClock):
            self.clock.close()
