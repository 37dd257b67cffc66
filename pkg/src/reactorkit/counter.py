"""Bounded click counter: passive model, view projection, and mediating adapter.

The model guards its data invariant (min <= value <= max) by raising on
out-of-range mutations. The adapter is the only component that touches both
model and view sink: it ignores events for controls that the projected view
has disabled, and emits exactly one view update per handled event.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

from .reactor import EventLoop

log = logging.getLogger(__name__)

INCREMENT = "increment"
DECREMENT = "decrement"
RESET = "reset"
COUNTER_EVENTS = (INCREMENT, DECREMENT, RESET)


class CounterFull(RuntimeError):
    """increment called with the counter at its maximum."""


class CounterEmpty(RuntimeError):
    """decrement called with the counter at its minimum."""


class BoundedCounter:
    """Integer counter guaranteed to stay within [min_value, max_value]."""

    def __init__(self, min_value: int = 0, max_value: int = 10):
        if min_value > max_value:
            raise ValueError(f"min {min_value} exceeds max {max_value}")
        self.min_value = min_value
        self.max_value = max_value
        self._value = min_value

    def get(self) -> int:
        return self._value

    def is_full(self) -> bool:
        return self._value == self.max_value

    def is_empty(self) -> bool:
        return self._value == self.min_value

    def increment(self) -> None:
        if self.is_full():
            raise CounterFull(f"counter already at maximum {self.max_value}")
        self._value += 1

    def decrement(self) -> None:
        if self.is_empty():
            raise CounterEmpty(f"counter already at minimum {self.min_value}")
        self._value -= 1

    def reset(self) -> None:
        """Back to the minimum (zero for the default configuration)."""
        self._value = self.min_value

    def save_state(self) -> int:
        return self._value

    def restore_state(self, value: int) -> None:
        if not self.min_value <= value <= self.max_value:
            raise ValueError(f"saved value {value} outside [{self.min_value}, {self.max_value}]")
        self._value = value


@dataclass(frozen=True)
class CounterViewState:
    displayed: int
    inc_enabled: bool
    dec_enabled: bool
    reset_enabled: bool = True

    def as_dict(self) -> dict:
        return {
            "value": self.displayed,
            "inc": self.inc_enabled,
            "dec": self.dec_enabled,
            "reset": self.reset_enabled,
        }


def project_view(model: BoundedCounter) -> CounterViewState:
    """Pure projection of the model: controls afford exactly the legal moves."""
    return CounterViewState(
        displayed=model.get(),
        inc_enabled=not model.is_full(),
        dec_enabled=not model.is_empty(),
        reset_enabled=True,
    )


class CounterAdapter:
    """Mediates events to the model and pushes one view state per event.

    Loop-thread confined when a loop is supplied; the model itself carries no
    synchronization because it is only ever touched here. Events targeting a
    disabled control are ignored (the view cannot produce them, but external
    injection can) and still refresh the view.
    """

    def __init__(self, model: BoundedCounter,
                 view_sink: Callable[[CounterViewState], None],
                 loop: Optional[EventLoop] = None):
        self.model = model
        self._view_sink = view_sink
        self._loop = loop

    def on_event(self, name: str) -> None:
        if self._loop is not None:
            self._loop.require_loop_thread()
        if name == INCREMENT:
            if self.model.is_full():
                log.info("increment ignored: counter full")
            else:
                self.model.increment()
        elif name == DECREMENT:
            if self.model.is_empty():
                log.info("decrement ignored: counter empty")
            else:
                self.model.decrement()
        elif name == RESET:
            self.model.reset()
        else:
            raise ValueError(f"unknown counter event {name!r}")
        self.refresh()

    def refresh(self) -> None:
        self._view_sink(project_view(self.model))

    def save_state(self) -> int:
        return self.model.save_state()

    def restore_state(self, value: int) -> None:
        self.model.restore_state(value)
        self.refresh()
