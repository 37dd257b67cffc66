"""reactorkit: a single-threaded event-loop runtime with timers and async tasks.

The core pieces are the event loop (reactor), clocks, and the task kit; on
top of those sit three small interactive apps (bounded counter, countdown
timer, prime checker), a deterministic test kit, and a gateway that exposes
the apps over a JSON wire protocol.
"""

from .clocks import AlreadyTicking, ClockListener, FakeClock, ThreadedClock
from .counter import (
    BoundedCounter,
    CounterAdapter,
    CounterEmpty,
    CounterFull,
    CounterViewState,
    project_view,
)
from .prime import PrimeChecker, PrimeResult, RunMode, Verdict, is_prime
from .reactor import (
    ConfinedCell,
    ConfinementViolation,
    EnqueueOnClosed,
    Event,
    EventLoop,
    EventQueue,
)
from .tasks import (
    AlreadyExecuted,
    AsyncTask,
    Done,
    ExecutorShutDown,
    TaskExecutor,
    TaskHandle,
    TaskState,
    WorkChunker,
    execute_on,
    run_chunked,
)
from .timer import TimeModel, TimerStateMachine, TimerView, project_timer_view

__all__ = [
    "AlreadyExecuted",
    "AlreadyTicking",
    "AsyncTask",
    "BoundedCounter",
    "ClockListener",
    "ConfinedCell",
    "ConfinementViolation",
    "CounterAdapter",
    "CounterEmpty",
    "CounterFull",
    "CounterViewState",
    "Done",
    "EnqueueOnClosed",
    "Event",
    "EventLoop",
    "EventQueue",
    "ExecutorShutDown",
    "FakeClock",
    "PrimeChecker",
    "PrimeResult",
    "RunMode",
    "TaskExecutor",
    "TaskHandle",
    "TaskState",
    "ThreadedClock",
    "TimeModel",
    "TimerStateMachine",
    "TimerView",
    "Verdict",
    "WorkChunker",
    "execute_on",
    "is_prime",
    "project_timer_view",
    "project_view",
    "run_chunked",
]
