"""Countdown timer: time model, three-state machine, and UI update contract.

The state machine is a monitor object: button presses arrive from the loop
thread while ticks and timeouts arrive from a clock's delivery thread, so
every entry point serializes on one internal lock. UI updates go out through
a listener whose implementations are expected to reschedule onto the loop
(see PostedUIListener); the machine itself never touches confined state.

States and their duties:
  stopped  entry resets the time to zero; a press adds one second (capped)
           and re-arms the idle one-shot; the one-shot firing starts the run.
  running  entry starts the recurring tick, exit stops it; each tick counts
           down one second and zero rings the alarm; a press cancels.
  ringing  entry turns the alarm on, exit turns it off; a press stops it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable

from .clocks import Clock

STOPPED = "stopped"
RUNNING = "running"
RINGING = "ringing"

DEFAULT_MAX_TIME = 99
DEFAULT_IDLE_TIMEOUT_S = 3
DEFAULT_TICK_PERIOD_S = 1

BUTTON_LABELS = {
    STOPPED: "add time",
    RUNNING: "cancel",
    RINGING: "stop alarm",
}


class TimeModel:
    """Remaining seconds, clamped to [0, max_time]; inc/dec saturate silently."""

    def __init__(self, max_time: int = DEFAULT_MAX_TIME):
        if max_time < 1:
            raise ValueError("max_time must be >= 1")
        self.max_time = max_time
        self._running_time = 0

    def reset(self) -> None:
        self._running_time = 0

    def inc(self) -> None:
        if self._running_time != self.max_time:
            self._running_time += 1

    def dec(self) -> None:
        if self._running_time != 0:
            self._running_time -= 1

    def get(self) -> int:
        return self._running_time


class TimerUIUpdateListener:
    """UI update contract; implementations deliver on the loop thread."""

    def update_time(self, seconds: int) -> None:
        pass

    def update_state(self, state_id: str) -> None:
        pass

    def ring_alarm(self, on: bool) -> None:
        pass


class PostedUIListener(TimerUIUpdateListener):
    """Reschedules every UI update through a poster (loop.post or pump.post).

    This is the adapter's half of the single-threaded rule: state-machine
    callbacks may arrive on a clock thread and must not touch the view there.
    """

    def __init__(self, poster: Callable[[Callable[[], None]], object],
                 inner: TimerUIUpdateListener):
        self._post = poster
        self._inner = inner

    def update_time(self, seconds: int) -> None:
        self._post(lambda: self._inner.update_time(seconds))

    def update_state(self, state_id: str) -> None:
        self._post(lambda: self._inner.update_state(state_id))

    def ring_alarm(self, on: bool) -> None:
        self._post(lambda: self._inner.ring_alarm(on))


@dataclass(frozen=True)
class TimerViewState:
    display: str  # zero-padded two digits, "00".."99"
    state: str
    ringing: bool
    button_label: str

    def as_dict(self) -> dict:
        return {
            "display": self.display,
            "state": self.state,
            "ringing": self.ringing,
            "button_label": self.button_label,
        }


def project_timer_view(state_id: str, seconds: int, ringing: bool) -> TimerViewState:
    return TimerViewState(
        display=f"{seconds:02d}",
        state=state_id,
        ringing=ringing,
        button_label=BUTTON_LABELS[state_id],
    )


class TimerView(TimerUIUpdateListener):
    """Accumulates UI updates into the latest view state and emits it to a sink."""

    def __init__(self, sink: Callable[[TimerViewState], None] = lambda _: None):
        self._sink = sink
        self.seconds = 0
        self.state_id = STOPPED
        self.ringing = False

    def current(self) -> TimerViewState:
        return project_timer_view(self.state_id, self.seconds, self.ringing)

    def _emit(self) -> None:
        self._sink(self.current())

    def update_time(self, seconds: int) -> None:
        self.seconds = seconds
        self._emit()

    def update_state(self, state_id: str) -> None:
        self.state_id = state_id
        self._emit()

    def ring_alarm(self, on: bool) -> None:
        self.ringing = on
        self._emit()


class _State:
    id = ""

    def on_entry(self, sm: "TimerStateMachine") -> None:
        pass

    def on_exit(self, sm: "TimerStateMachine") -> None:
        pass

    # events a state does not declare are ignored
    def on_button_press(self, sm: "TimerStateMachine") -> None:
        pass

    def on_tick(self, sm: "TimerStateMachine") -> None:
        pass

    def on_timeout(self, sm: "TimerStateMachine") -> None:
        pass


class _Boot(_State):
    """Initial pseudo-state; exists only to be exited at start()."""


class _Stopped(_State):
    id = STOPPED

    def on_entry(self, sm):
        sm.time_model.reset()
        sm._update_time()

    def on_button_press(self, sm):
        sm.clock.restart_timeout(sm.idle_timeout_s)
        sm.time_model.inc()
        sm._update_time()

    def on_timeout(self, sm):
        # countdown only starts with time on the clock
        if sm.time_model.get() > 0:
            sm._set_state(_RUNNING)


class _Running(_State):
    id = RUNNING

    def on_entry(self, sm):
        sm.clock.start_tick(sm.tick_period_s)

    def on_exit(self, sm):
        sm.clock.stop_tick()

    def on_button_press(self, sm):
        sm._set_state(_STOPPED)

    def on_tick(self, sm):
        sm.time_model.dec()
        sm._update_time()
        if sm.time_model.get() == 0:
            sm._set_state(_RINGING)


class _Ringing(_State):
    id = RINGING

    def on_entry(self, sm):
        sm.ui.ring_alarm(True)

    def on_exit(self, sm):
        sm.ui.ring_alarm(False)

    def on_button_press(self, sm):
        sm._set_state(_STOPPED)


_STOPPED = _Stopped()
_RUNNING = _Running()
_RINGING = _Ringing()


class TimerStateMachine:
    """Monitor object around the three timer states.

    Entry points (start, on_button_press, on_tick, on_timeout) may be called
    from any thread and are mutually exclusive. The machine drives the clock's
    control methods and reports through the UI listener; clock firings are fed
    back in by whoever wires the clock's listener to on_tick/on_timeout.
    """

    def __init__(self, time_model: TimeModel, clock: Clock, ui: TimerUIUpdateListener,
                 idle_timeout_s: int = DEFAULT_IDLE_TIMEOUT_S,
                 tick_period_s: int = DEFAULT_TICK_PERIOD_S):
        self.time_model = time_model
        self.clock = clock
        self.ui = ui
        self.idle_timeout_s = idle_timeout_s
        self.tick_period_s = tick_period_s
        self._lock = threading.RLock()
        self._state: _State = _Boot()
        self._started = False

    @property
    def state_id(self) -> str:
        with self._lock:
            return self._state.id

    def start(self) -> None:
        """Boot into the stopped state so its entry actions run once."""
        with self._lock:
            if self._started:
                raise RuntimeError("state machine already started")
            self._started = True
            self._set_state(_STOPPED)

    def on_button_press(self) -> None:
        with self._lock:
            self._state.on_button_press(self)

    def on_tick(self) -> None:
        with self._lock:
            self._state.on_tick(self)

    def on_timeout(self) -> None:
        with self._lock:
            self._state.on_timeout(self)

    # -- internal, always under the lock --------------------------------------

    def _set_state(self, next_state: _State) -> None:
        self._state.on_exit(self)
        self._state = next_state
        self.ui.update_state(next_state.id)
        next_state.on_entry(self)

    def _update_time(self) -> None:
        self.ui.update_time(self.time_model.get())


class ClockToMachine:
    """Clock listener that feeds firings into a state machine's entry points."""

    def __init__(self, sm: TimerStateMachine):
        self._sm = sm

    def on_tick(self) -> None:
        self._sm.on_tick()

    def on_timeout(self) -> None:
        self._sm.on_timeout()
